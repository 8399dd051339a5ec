#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace polygon_gpt {

/// Global comparison tolerance for geometric matching.
inline constexpr double kTolerance = 1e-9;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double &operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, const Vec3 &a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

inline constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double max_abs_diff(const Vec3 &a, const Vec3 &b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

inline bool is_finite(const Vec3 &v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

/// Row-major 3x3 real matrix.
struct Mat3 {
  std::array<double, 9> a{};

  constexpr double operator()(std::size_t r, std::size_t c) const { return a[3 * r + c]; }
  constexpr double &operator()(std::size_t r, std::size_t c) { return a[3 * r + c]; }

  static constexpr Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

  constexpr Mat3 transposed() const {
    Mat3 t;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend constexpr Mat3 operator*(const Mat3 &l, const Mat3 &r) {
    Mat3 m;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += l(i, k) * r(k, j);
        m(i, j) = s;
      }
    return m;
  }
  friend constexpr Vec3 operator*(const Mat3 &m, const Vec3 &v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z, m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
            m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
  }
  friend constexpr Mat3 operator+(const Mat3 &l, const Mat3 &r) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = l.a[i] + r.a[i];
    return m;
  }
  friend constexpr Mat3 operator-(const Mat3 &l, const Mat3 &r) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = l.a[i] - r.a[i];
    return m;
  }
  friend constexpr Mat3 operator*(double s, const Mat3 &r) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = s * r.a[i];
    return m;
  }
  friend constexpr bool operator==(const Mat3 &, const Mat3 &) = default;
};

inline Mat3 outer(const Vec3 &a, const Vec3 &b) {
  Mat3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = a[r] * b[c];
  return m;
}

/// Frobenius pairing Tr[lᵀ r].
inline double frobenius(const Mat3 &l, const Mat3 &r) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += l.a[i] * r.a[i];
  return s;
}

/// aᵀ m b
inline double bilinear(const Vec3 &a, const Mat3 &m, const Vec3 &b) { return dot(a, m * b); }

inline double max_abs_diff(const Mat3 &l, const Mat3 &r) {
  double d = 0.0;
  for (std::size_t i = 0; i < 9; ++i) d = std::max(d, std::abs(l.a[i] - r.a[i]));
  return d;
}

// Dense square systems (the vertex solver works on 9x9).
template <std::size_t N> using SquareMatrix = std::array<std::array<double, N>, N>;

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting. Returns nullopt when a pivot falls
/// below `relative_pivot` times the largest absolute entry of `m`.
template <std::size_t N>
std::optional<std::array<double, N>> solve_linear(SquareMatrix<N> m, std::array<double, N> rhs,
                                                  double relative_pivot = kTolerance) {
  double scale = 0.0;
  for (const auto &row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::nullopt;
  const double threshold = relative_pivot * scale;

  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < threshold) return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < N; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < N; ++c) s -= m[i][c] * x[c];
    x[i] = s / m[i][i];
  }
  return x;
}

/// Numerical rank of a set of row vectors (Gaussian elimination with absolute pivot threshold).
template <std::size_t N, typename Rows> std::size_t matrix_rank(Rows rows, double tolerance = kTolerance) {
  std::size_t rank = 0;
  const std::size_t count = rows.size();
  for (std::size_t col = 0; col < N && rank < count; ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < count; ++r)
      if (std::abs(rows[r][col]) > std::abs(rows[pivot][col])) pivot = r;
    if (std::abs(rows[pivot][col]) <= tolerance) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = rank + 1; r < count; ++r) {
      const double f = rows[r][col] / rows[rank][col];
      for (std::size_t c = col; c < N; ++c) rows[r][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

} // namespace polygon_gpt
