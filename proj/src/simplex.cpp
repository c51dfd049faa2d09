#include "otdro/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace otdro {

namespace {

// Solve M y = rhs by Gaussian elimination with partial pivoting.
std::vector<double> gauss_solve(std::vector<std::vector<double>> M, std::vector<double> rhs) {
  const std::size_t m = M.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
    if (std::fabs(M[piv][col]) < 1e-13)
      throw std::runtime_error("simplex: singular basis matrix");
    std::swap(M[piv], M[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = M[r][col] / M[col][col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < m; ++k) M[r][k] -= f * M[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = rhs[i] / M[i][i];
  return y;
}

}  // namespace

SimplexResult simplex_max(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b, const std::vector<double>& c,
                          std::vector<int> basis, double tol, int max_iter) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (basis.size() != m) throw std::invalid_argument("simplex: basis size must equal rows");

  auto basis_matrix = [&]() {
    std::vector<std::vector<double>> B(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) B[i][j] = A[i][basis[j]];
    return B;
  };
  auto transpose = [](const std::vector<std::vector<double>>& M) {
    std::vector<std::vector<double>> T(M.size(), std::vector<double>(M.size()));
    for (std::size_t i = 0; i < M.size(); ++i)
      for (std::size_t j = 0; j < M.size(); ++j) T[j][i] = M[i][j];
    return T;
  };

  SimplexResult res;
  std::vector<double> xb = gauss_solve(basis_matrix(), b);
  for (double v : xb)
    if (v < -1e-8) throw std::invalid_argument("simplex: initial basis is infeasible");

  for (int iter = 0; iter < max_iter; ++iter) {
    const auto B = basis_matrix();
    std::vector<double> cb(m);
    for (std::size_t i = 0; i < m; ++i) cb[i] = c[basis[i]];
    const std::vector<double> y = gauss_solve(transpose(B), cb);

    // Bland: entering variable = lowest index with positive reduced cost.
    int entering = -1;
    for (std::size_t j = 0; j < n; ++j) {
      bool in_basis = false;
      for (int bi : basis)
        if (bi == static_cast<int>(j)) {
          in_basis = true;
          break;
        }
      if (in_basis) continue;
      double rc = c[j];
      for (std::size_t i = 0; i < m; ++i) rc -= y[i] * A[i][j];
      if (rc > tol) {
        entering = static_cast<int>(j);
        break;
      }
    }
    if (entering < 0) {
      res.status = SimplexResult::Status::Optimal;
      res.iterations = iter;
      break;
    }

    std::vector<double> col(m);
    for (std::size_t i = 0; i < m; ++i) col[i] = A[i][entering];
    const std::vector<double> d = gauss_solve(basis_matrix(), col);

    // Ratio test with Bland tie-breaking on the leaving variable index.
    int leave = -1;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (d[i] > tol) {
        const double ratio = std::max(xb[i], 0.0) / d[i];
        if (leave < 0 || ratio < best_ratio - 1e-12 ||
            (std::fabs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[leave])) {
          leave = static_cast<int>(i);
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) {
      res.status = SimplexResult::Status::Unbounded;
      res.iterations = iter;
      return res;
    }
    basis[leave] = entering;
    xb = gauss_solve(basis_matrix(), b);
    res.iterations = iter + 1;
    if (iter + 1 == max_iter) res.status = SimplexResult::Status::IterationLimit;
  }

  res.x.assign(n, 0.0);
  double val = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    res.x[basis[i]] = xb[i];
    val += c[basis[i]] * xb[i];
  }
  res.value = val;
  return res;
}

}  // namespace otdro
