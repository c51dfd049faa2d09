#pragma once

// Brute-force reference computations for the test suites.  Everything here is
// deliberately independent of the library's solver paths: dense grids plus
// local golden-ratio polish, direct enumeration, and divided differences.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracles {

// Dense-grid maximum of f over [lo, hi] with local golden polish around the
// best grid point.  Good to ~ (hi-lo)/n^2 for smooth unimodal pieces.
inline double grid_max(const std::function<double(double)>& f, double lo, double hi, int n,
                       double* arg = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  double best_t = lo;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double a = std::max(lo, best_t - (hi - lo) / n);
  double b = std::min(hi, best_t + (hi - lo) / n);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 120 && (b - a) > 1e-14 * (1.0 + std::fabs(b)); ++i) {
    const double c = b - (b - a) * invphi;
    const double d = a + (b - a) * invphi;
    if (f(c) >= f(d)) b = d;
    else a = c;
  }
  const double t = 0.5 * (a + b);
  const double v = f(t);
  if (arg) *arg = v > best ? t : best_t;
  return std::max(v, best);
}

inline double grid_min(const std::function<double(double)>& f, double lo, double hi, int n,
                       double* arg = nullptr) {
  double v = grid_max([&](double t) { return -f(t); }, lo, hi, n, arg);
  return -v;
}

// sup_{t >= 0} { s t - psi(t) } over a capped range; the objective is concave
// for the penalty families so the polish is reliable.
inline double conjugate(const std::function<double(double)>& psi, double s, double t_hi,
                        int n = 200000) {
  return grid_max([&](double t) { return s * t - psi(t); }, 0.0, t_hi, n);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Enumerates basic solutions of  maximize c^T x  s.t.  A x <= b, x >= 0
// (n variables, m rows) by trying every choice of n active constraints from
// the m + n available ones.  Exponential, fine for n <= 6.
inline double enumerate_lp_max(const std::vector<std::vector<double>>& A,
                               const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size();
  const std::size_t total = m + n;  // row constraints then x_j >= 0
  std::vector<int> pick(n);
  double best = -std::numeric_limits<double>::infinity();

  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t k) {
    if (k == n) {
      // Solve the n x n active system.
      std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
      std::vector<double> rhs(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const int ci = pick[i];
        if (ci < static_cast<int>(m)) {
          M[i] = A[ci];
          rhs[i] = b[ci];
        } else {
          M[i][ci - m] = 1.0;
          rhs[i] = 0.0;
        }
      }
      // Gaussian elimination with partial pivoting.
      for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r2 = col + 1; r2 < n; ++r2)
          if (std::fabs(M[r2][col]) > std::fabs(M[piv][col])) piv = r2;
        if (std::fabs(M[piv][col]) < 1e-11) return;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r2 = 0; r2 < n; ++r2) {
          if (r2 == col) continue;
          const double f = M[r2][col] / M[col][col];
          for (std::size_t k2 = col; k2 < n; ++k2) M[r2][k2] -= f * M[col][k2];
          rhs[r2] -= f * rhs[col];
        }
      }
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / M[i][i];
      for (double xi : x)
        if (xi < -1e-9) return;
      for (std::size_t r2 = 0; r2 < m; ++r2) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += A[r2][j] * x[j];
        if (lhs > b[r2] + 1e-9) return;
      }
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c[j] * x[j];
      best = std::max(best, v);
      return;
    }
    for (std::size_t i = start; i < total; ++i) {
      pick[k] = static_cast<int>(i);
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace oracles
