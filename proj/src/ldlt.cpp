#include "mcckf/ldlt.hpp"

#include <cmath>

#include "mcckf/errors.hpp"

namespace mcckf {

namespace {

// Classical Bunch-Kaufman threshold (1+sqrt(17))/8: minimizes the bound on
// element growth over the 1x1/2x2 pivot choice.
const double kAlphaBk = (1.0 + std::sqrt(17.0)) / 8.0;

void swapSym(Mat& w, Mat& l, std::vector<int>& perm, long col, long s, long t) {
  if (s == t) return;
  w.row(s).swap(w.row(t));
  w.col(s).swap(w.col(t));
  // Interchanges also apply to the already-computed multiplier rows.
  if (col > 0) {
    for (long j = 0; j < col; ++j) std::swap(l(s, j), l(t, j));
  }
  std::swap(perm[static_cast<size_t>(s)], perm[static_cast<size_t>(t)]);
}

}  // namespace

Mat LdlFactorization::permutedReconstruct() const { return L * D * L.transpose(); }

Mat LdlFactorization::unpermutedL() const {
  const long nn = n();
  Mat out(nn, nn);
  for (long p = 0; p < nn; ++p) out.row(perm[static_cast<size_t>(p)]) = L.row(p);
  return out;
}

Mat LdlFactorization::reconstruct() const {
  const Mat ptl = unpermutedL();
  return ptl * D * ptl.transpose();
}

Mat LowRankFactors::product() const {
  if (alpha == 0) return Mat::Zero(L.rows(), L.rows());
  return L * M * L.transpose();
}

LdlFactorization ldlt_bunch_kaufman(const Mat& a, double asymTol) {
  if (a.rows() != a.cols())
    throw ShapeError("ldlt_bunch_kaufman: matrix must be square");
  const long n = a.rows();
  Mat w = (n == 0) ? Mat(0, 0) : require_symmetric(a, asymTol, "ldlt input");

  LdlFactorization f;
  f.perm.resize(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) f.perm[static_cast<size_t>(i)] = static_cast<int>(i);
  f.L = Mat::Identity(n, n);
  f.D = Mat::Zero(n, n);

  long k = 0;
  while (k < n) {
    bool pivot2 = false;
    if (k < n - 1) {
      const double absAkk = std::abs(w(k, k));
      // Largest subdiagonal entry of column k and its row.
      long r = k + 1;
      double omega1 = 0.0;
      for (long i = k + 1; i < n; ++i) {
        const double v = std::abs(w(i, k));
        if (v > omega1) {
          omega1 = v;
          r = i;
        }
      }
      if (omega1 > 0.0 && absAkk < kAlphaBk * omega1) {
        // Largest off-diagonal entry of column r within the active block.
        double omegaR = 0.0;
        for (long i = k; i < n; ++i) {
          if (i == r) continue;
          omegaR = std::max(omegaR, std::abs(w(i, r)));
        }
        if (absAkk * omegaR >= kAlphaBk * omega1 * omega1) {
          // 1x1 pivot on the current diagonal entry.
        } else if (std::abs(w(r, r)) >= kAlphaBk * omegaR) {
          swapSym(w, f.L, f.perm, k, k, r);  // 1x1 pivot after interchange
        } else {
          swapSym(w, f.L, f.perm, k, k + 1, r);
          pivot2 = true;
        }
      }
      // omega1 == 0: zero subdiagonal column, a 1x1 pivot (possibly zero)
      // needs no elimination work beyond recording w(k,k).
    }

    if (!pivot2) {
      const double d = w(k, k);
      f.D(k, k) = d;
      if (d != 0.0) {
        for (long i = k + 1; i < n; ++i) f.L(i, k) = w(i, k) / d;
        for (long j = k + 1; j < n; ++j)
          for (long i = j; i < n; ++i) {
            w(i, j) -= f.L(i, k) * d * f.L(j, k);
            w(j, i) = w(i, j);
          }
      }
      // d == 0 implies the whole subdiagonal column is zero (pivot search
      // above would otherwise have selected an interchange), so L's column
      // stays e_k and the trailing block is untouched.
      f.blockSizes.push_back(1);
      k += 1;
    } else {
      const double b11 = w(k, k), b21 = w(k + 1, k), b22 = w(k + 1, k + 1);
      const double det = b11 * b22 - b21 * b21;
      if (det == 0.0)
        throw ConditioningError("ldlt_bunch_kaufman: singular 2x2 pivot", k);
      f.D(k, k) = b11;
      f.D(k + 1, k) = f.D(k, k + 1) = b21;
      f.D(k + 1, k + 1) = b22;
      const double i11 = b22 / det, i21 = -b21 / det, i22 = b11 / det;
      for (long i = k + 2; i < n; ++i) {
        const double c1 = w(i, k), c2 = w(i, k + 1);
        f.L(i, k) = c1 * i11 + c2 * i21;
        f.L(i, k + 1) = c1 * i21 + c2 * i22;
      }
      for (long j = k + 2; j < n; ++j)
        for (long i = j; i < n; ++i) {
          w(i, j) -= f.L(i, k) * w(j, k) + f.L(i, k + 1) * w(j, k + 1);
          w(j, i) = w(i, j);
        }
      f.blockSizes.push_back(2);
      k += 2;
    }
  }
  return f;
}

Mat ldlt_solve(const LdlFactorization& f, const Mat& b) {
  const long n = f.n();
  if (b.rows() != n) throw ShapeError("ldlt_solve: rhs row count mismatch");
  // Permute rows: y = P*b.
  Mat y(n, b.cols());
  for (long p = 0; p < n; ++p) y.row(p) = b.row(f.perm[static_cast<size_t>(p)]);
  // Forward substitution with unit-lower L.
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < i; ++j) y.row(i) -= f.L(i, j) * y.row(j);
  // Block-diagonal solve.
  long k = 0;
  for (int bs : f.blockSizes) {
    if (bs == 1) {
      const double d = f.D(k, k);
      if (d == 0.0) throw ConditioningError("ldlt_solve: zero 1x1 block", k);
      y.row(k) /= d;
      k += 1;
    } else {
      const double b11 = f.D(k, k), b21 = f.D(k + 1, k), b22 = f.D(k + 1, k + 1);
      const double det = b11 * b22 - b21 * b21;
      if (det == 0.0) throw ConditioningError("ldlt_solve: singular 2x2 block", k);
      const Mat r1 = y.row(k), r2 = y.row(k + 1);
      y.row(k) = (b22 * r1 - b21 * r2) / det;
      y.row(k + 1) = (-b21 * r1 + b11 * r2) / det;
      k += 2;
    }
  }
  // Back substitution with L^T.
  for (long i = n - 1; i >= 0; --i)
    for (long j = i + 1; j < n; ++j) y.row(i) -= f.L(j, i) * y.row(j);
  // Unpermute: x = P^T*y.
  Mat x(n, b.cols());
  for (long p = 0; p < n; ++p) x.row(f.perm[static_cast<size_t>(p)]) = y.row(p);
  return x;
}

LowRankFactors low_rank_trim(const LdlFactorization& f, double relTol) {
  const long n = f.n();
  if (relTol < 0.0) {
    if (relTol != -1.0) throw ConfigError("low_rank_trim: relTol must be >= 0");
    relTol = static_cast<double>(n) * 1e-12;
  }

  // Spectral magnitude per block: |d| for 1x1; the larger |eigenvalue| for
  // 2x2 ((a+c)/2 +/- sqrt(((a-c)/2)^2 + b^2)).
  std::vector<double> mag;
  std::vector<long> start;
  long k = 0;
  double maxMag = 0.0;
  for (int bs : f.blockSizes) {
    start.push_back(k);
    double m;
    if (bs == 1) {
      m = std::abs(f.D(k, k));
    } else {
      const double mean = 0.5 * (f.D(k, k) + f.D(k + 1, k + 1));
      const double disc = std::hypot(0.5 * (f.D(k, k) - f.D(k + 1, k + 1)),
                                     f.D(k + 1, k));
      m = std::max(std::abs(mean + disc), std::abs(mean - disc));
    }
    mag.push_back(m);
    maxMag = std::max(maxMag, m);
    k += bs;
  }

  std::vector<size_t> keep;
  long alpha = 0;
  for (size_t bi = 0; bi < f.blockSizes.size(); ++bi) {
    if (maxMag > 0.0 && mag[bi] > relTol * maxMag) {
      keep.push_back(bi);
      alpha += f.blockSizes[bi];
    }
  }

  LowRankFactors out;
  out.alpha = static_cast<int>(alpha);
  out.L = Mat::Zero(n, alpha);
  out.M = Mat::Zero(alpha, alpha);
  const Mat ptl = f.unpermutedL();
  long col = 0;
  for (size_t bi : keep) {
    const int bs = f.blockSizes[bi];
    const long s = start[bi];
    out.L.middleCols(col, bs) = ptl.middleCols(s, bs);
    out.M.block(col, col, bs, bs) = f.D.block(s, s, bs, bs);
    col += bs;
  }
  out.M = 0.5 * (out.M + out.M.transpose());
  return out;
}

}  // namespace mcckf
