#pragma once

// Elementary regular-polygon model: pure states on a regular n-gon lifted to z = 1, the extremal
// effects of its dual cone, and the dihedral group of reversible transformations.
//
// Indices follow the 1..n convention throughout; `wrap_index` maps any integer into 1..n.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "polygon_gpt/errors.hpp"
#include "polygon_gpt/linalg.hpp"

namespace polygon_gpt {

enum class Parity { even, odd };

/// Maps an arbitrary integer onto 1..n, returning n where the remainder is zero.
inline int wrap_index(long long i, int n) {
  long long r = i % n;
  if (r <= 0) r += n;
  return static_cast<int>(r);
}

struct PolygonModel {
  int n = 0;
  double r_n = 0.0;
  Parity parity = Parity::even;
  std::vector<Vec3> states;             ///< ω_1..ω_n, stored at [i-1]
  std::vector<Vec3> ray_effects;        ///< e_1..e_n
  std::vector<Vec3> complement_effects; ///< ē_i = u - e_i; ray-extremal only for even n
  Vec3 unit{0.0, 0.0, 1.0};
  Vec3 null{0.0, 0.0, 0.0};

  const Vec3 &state(int i) const { return states[static_cast<std::size_t>(wrap_index(i, n) - 1)]; }
  const Vec3 &effect(int i) const { return ray_effects[static_cast<std::size_t>(wrap_index(i, n) - 1)]; }
  const Vec3 &complement_effect(int i) const {
    return complement_effects[static_cast<std::size_t>(wrap_index(i, n) - 1)];
  }
  bool complements_are_ray_extremal() const { return parity == Parity::even; }
};

inline PolygonModel build_model(int n) {
  if (n < 4) throw InvalidParameter("polygon model requires n >= 4, got " + std::to_string(n));
  using std::numbers::pi;
  PolygonModel m;
  m.n = n;
  m.parity = (n % 2 == 0) ? Parity::even : Parity::odd;
  m.r_n = std::sqrt(1.0 / std::cos(pi / n));
  const double r = m.r_n;
  m.states.reserve(static_cast<std::size_t>(n));
  m.ray_effects.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double phi = 2.0 * pi * i / n;
    m.states.push_back({r * std::cos(phi), r * std::sin(phi), 1.0});
    if (m.parity == Parity::even) {
      const double psi = (2.0 * i - 1.0) * pi / n;
      m.ray_effects.push_back(0.5 * Vec3{r * std::cos(psi), r * std::sin(psi), 1.0});
    } else {
      m.ray_effects.push_back((1.0 / (1.0 + r * r)) * Vec3{r * std::cos(phi), r * std::sin(phi), 1.0});
    }
  }
  for (const auto &e : m.ray_effects) m.complement_effects.push_back(m.unit - e);
  return m;
}

/// Outcome probability e(ω) = eᵀω.
inline double effect_value(const Vec3 &e, const Vec3 &w) { return dot(e, w); }

/// u - e
inline Vec3 complement(const PolygonModel &model, const Vec3 &e) { return model.unit - e; }

/// Rotation (sign = +1) or reflection (sign = -1) by 2πk/n.
struct LocalTransform {
  int k = 0;
  int s = 1;
  Mat3 matrix = Mat3::identity();

  friend bool operator==(const LocalTransform &a, const LocalTransform &b) { return a.k == b.k && a.s == b.s; }
};

inline LocalTransform transformation(const PolygonModel &model, int k, int s) {
  if (k < 1 || k > model.n)
    throw InvalidParameter("transformation index k must lie in 1.." + std::to_string(model.n));
  if (s != 1 && s != -1) throw InvalidParameter("transformation sign must be +1 or -1");
  const double theta = 2.0 * std::numbers::pi * k / model.n;
  const double c = std::cos(theta), sn = std::sin(theta);
  LocalTransform t{k, s, Mat3{{c, -s * sn, 0.0, sn, s * c, 0.0, 0.0, 0.0, 1.0}}};
  return t;
}

/// All 2n transformations, rotations first: (k=1..n, +1) then (k=1..n, -1).
inline std::vector<LocalTransform> transformations(const PolygonModel &model) {
  std::vector<LocalTransform> out;
  out.reserve(2 * static_cast<std::size_t>(model.n));
  for (int s : {1, -1})
    for (int k = 1; k <= model.n; ++k) out.push_back(transformation(model, k, s));
  return out;
}

/// Group product a∘b (b applied first), using T_k^s T_m^t = T_{k+s·m}^{s·t}.
inline LocalTransform compose(const PolygonModel &model, const LocalTransform &a, const LocalTransform &b) {
  return transformation(model, wrap_index(a.k + a.s * b.k, model.n), a.s * b.s);
}

namespace detail {
inline std::vector<int> match_permutation(const PolygonModel &model, const Mat3 &m, const std::vector<Vec3> &set,
                                          const char *what) {
  std::vector<int> perm(set.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec3 image = m * set[i];
    for (std::size_t j = 0; j < set.size(); ++j)
      if (max_abs_diff(image, set[j]) < kTolerance) {
        perm[i] = static_cast<int>(j) + 1;
        break;
      }
    if (perm[i] == 0)
      throw InternalInconsistency(std::string("transformation does not permute the ") + what + " of the " +
                                  std::to_string(model.n) + "-gon");
  }
  return perm;
}
} // namespace detail

/// π with T·e_i = e_{π(i)}; returned 1-based as perm[i-1].
inline std::vector<int> effect_permutation(const PolygonModel &model, const LocalTransform &t) {
  return detail::match_permutation(model, t.matrix, model.ray_effects, "ray effects");
}

/// π with T·ω_i = ω_{π(i)}.
inline std::vector<int> vertex_permutation(const PolygonModel &model, const LocalTransform &t) {
  return detail::match_permutation(model, t.matrix, model.states, "vertices");
}

/// Node ids 0..n-1 are e_1..e_n, n..2n-1 are ē_1..ē_n.
struct OrthogonalityGraph {
  int n = 0;
  std::vector<std::vector<int>> adjacency;

  static int effect_node(int i, int n) { return wrap_index(i, n) - 1; }
  static int complement_node(int i, int n) { return n + wrap_index(i, n) - 1; }
};

inline OrthogonalityGraph orthogonality_graph(const PolygonModel &model) {
  if (model.parity != Parity::odd)
    throw Unsupported("orthogonality graph is only defined for odd polygons");
  const int n = model.n;
  std::vector<Vec3> nodes = model.ray_effects;
  nodes.insert(nodes.end(), model.complement_effects.begin(), model.complement_effects.end());
  OrthogonalityGraph g{n, std::vector<std::vector<int>>(nodes.size())};
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = 0; b < nodes.size(); ++b)
      if (a != b && std::abs(dot(nodes[a], nodes[b])) < kTolerance) g.adjacency[a].push_back(static_cast<int>(b));
  return g;
}

} // namespace polygon_gpt
