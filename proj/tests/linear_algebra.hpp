#pragma once

// Test-only dense least squares via the normal equations.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Ordinary least squares with an intercept; returns [w_0..w_{d-1}, b].
inline std::vector<double> least_squares(const std::vector<std::vector<std::uint8_t>>& xs,
                                         const std::vector<double>& ts) {
  const std::size_t p = xs.front().size() + 1;
  std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
  std::vector<double> atb(p, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row(xs[i].begin(), xs[i].end());
    row.push_back(1.0);
    for (std::size_t r = 0; r < p; ++r) {
      atb[r] += row[r] * ts[i];
      for (std::size_t c = 0; c < p; ++c) ata[r][c] += row[r] * row[c];
    }
  }
  return solve(ata, atb);
}

}  // namespace oracle
