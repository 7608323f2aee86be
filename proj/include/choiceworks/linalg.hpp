#ifndef CHOICEWORKS_LINALG_HPP
#define CHOICEWORKS_LINALG_HPP

#include "choiceworks/geometry.hpp"

#include <optional>
#include <vector>

namespace cw {

using Matrix = std::vector<Vec>;  // row-major

// Exact determinant by fraction-aware Gaussian elimination.
inline Scalar det(Matrix m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw Error(Error::Code::DimensionMismatch, "det: not square");
  Scalar result = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return Scalar(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      result = -result;
    }
    result *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      Scalar f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return result;
}

// Solves m x = b exactly; nullopt when m is singular.
inline std::optional<Vec> solve(Matrix m, Vec b) {
  const std::size_t n = m.size();
  if (b.size() != n) throw Error(Error::Code::DimensionMismatch, "solve: size mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Scalar f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return x;
}

// Determinant enclosure for a matrix of interval entries, by cofactor
// expansion along the first row. Sizes stay small (<= 5) in this library.
inline Interval interval_det(const std::vector<std::vector<Interval>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return Interval(Scalar(1), Scalar(1));
  if (n == 1) return m[0][0];
  Interval acc(Scalar(0), Scalar(0));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Interval>> minor;
    minor.reserve(n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Interval> row;
      row.reserve(n - 1);
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    Interval term = m[0][j] * interval_det(minor);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace cw

#endif  // CHOICEWORKS_LINALG_HPP
