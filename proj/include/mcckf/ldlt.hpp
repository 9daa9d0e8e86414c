#pragma once

// Symmetric-indefinite LDL^T factorization (Bunch-Kaufman partial pivoting)
// and the low-rank trim that extracts (L0, M0, alpha) from the block-diagonal
// factor. Eigen's LDLT is not used because the trim needs the explicit
// 1x1/2x2 block structure and per-block spectral magnitudes.

#include <vector>

#include "mcckf/matrix.hpp"

namespace mcckf {

// P*A*P^T = L*D*L^T with unit-lower-triangular L and block-diagonal D
// (1x1 and 2x2 blocks). perm[p] is the original row index placed at
// position p, i.e. (P*A*P^T)(i,j) = A(perm[i], perm[j]).
struct LdlFactorization {
  std::vector<int> perm;
  Mat L;  // n x n, unit diagonal, zero strict upper triangle
  Mat D;  // n x n, symmetric block diagonal
  std::vector<int> blockSizes;  // entries in {1,2}, summing to n

  long n() const { return L.rows(); }
  // L*D*L^T, equal to P*A*P^T within tolerance.
  Mat permutedReconstruct() const;
  // P^T*L*D*L^T*P, equal to the (symmetrized) input A within tolerance.
  Mat reconstruct() const;
  // P^T*L: row perm[p] of the result is row p of L.
  Mat unpermutedL() const;
};

// Rank-revealed factors A ~ L*M*L^T with alpha retained scalar dimensions.
struct LowRankFactors {
  Mat L;      // n x alpha
  Mat M;      // alpha x alpha symmetric
  int alpha = 0;

  Mat product() const;  // L*M*L^T (n x n; zero matrix when alpha == 0)
};

// Factorizes the symmetrized input; throws AsymmetryError when the input
// deviates from symmetry by more than asymTol*(1+||A||_F). Handles
// indefinite and singular A; n = 0 is valid and yields empty factors.
LdlFactorization ldlt_bunch_kaufman(const Mat& a, double asymTol = 1e-8);

// Solves A*x = b via an existing factorization (all D blocks must be
// nonsingular); throws ConditioningError on a singular block.
Mat ldlt_solve(const LdlFactorization& f, const Mat& b);

// Drops blocks of D whose spectral magnitude (|d| for 1x1, larger
// eigenvalue magnitude for 2x2) is <= relTol * max block magnitude; 2x2
// blocks are kept or dropped whole. relTol < 0 selects the default
// n * 1e-12. The retained columns of P^T*L become L0 and the retained
// blocks become M0.
LowRankFactors low_rank_trim(const LdlFactorization& f, double relTol = -1.0);

}  // namespace mcckf
