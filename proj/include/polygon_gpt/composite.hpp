#pragma once

// States and effects of the maximal bipartite composition of two identical polygon systems,
// represented as 3x3 matrices (a state Φ pairs with a product effect e ⊗ f as eᵀ Φ f).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polygon_gpt/errors.hpp"
#include "polygon_gpt/linalg.hpp"
#include "polygon_gpt/polygon.hpp"

namespace polygon_gpt {

struct BipartiteState {
  Mat3 m;
  friend bool operator==(const BipartiteState &, const BipartiteState &) = default;
};

/// Product effects are e fᵀ; entangled effects use general matrices.
struct BipartiteEffect {
  Mat3 m;
};

/// Row-major 9-entry form used for serialization.
inline std::array<double, 9> row_major(const BipartiteState &phi) { return phi.m.a; }

inline BipartiteState state_from_row_major(const std::vector<double> &v) {
  if (v.size() != 9) throw InvalidParameter("a bipartite state needs exactly 9 row-major entries");
  BipartiteState phi;
  for (std::size_t i = 0; i < 9; ++i) {
    if (!std::isfinite(v[i])) throw InvalidParameter("state entries must be finite");
    phi.m.a[i] = v[i];
  }
  return phi;
}

inline BipartiteState product_state(const Vec3 &wa, const Vec3 &wb) { return {outer(wa, wb)}; }
inline BipartiteEffect product_effect(const Vec3 &e, const Vec3 &f) { return {outer(e, f)}; }

inline double joint_prob(const Vec3 &e, const Vec3 &f, const BipartiteState &phi) { return bilinear(e, phi.m, f); }
inline double joint_prob(const BipartiteEffect &eff, const BipartiteState &phi) { return frobenius(eff.m, phi.m); }

/// Smallest value eᵢᵀ Φ eⱼ over the n² ray-extremal product effects.
inline double min_product_effect_value(const BipartiteState &phi, const PolygonModel &model) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto &e : model.ray_effects) {
    const Vec3 row{dot(e, Vec3{phi.m(0, 0), phi.m(1, 0), phi.m(2, 0)}), dot(e, Vec3{phi.m(0, 1), phi.m(1, 1), phi.m(2, 1)}),
                   dot(e, Vec3{phi.m(0, 2), phi.m(1, 2), phi.m(2, 2)})};
    for (const auto &f : model.ray_effects) lo = std::min(lo, dot(row, f));
  }
  return lo;
}

inline double normalization(const BipartiteState &phi) { return phi.m(2, 2); }

inline bool is_valid_state(const BipartiteState &phi, const PolygonModel &model, double tol = kTolerance) {
  for (double v : phi.m.a)
    if (!std::isfinite(v)) return false;
  return std::abs(normalization(phi) - 1.0) < tol && min_product_effect_value(phi, model) >= -tol;
}

/// A bipartite effect is proper on the maximal composition when it yields values in [0, 1] on all
/// extreme product states.
inline bool is_valid_on_product_states(const BipartiteEffect &eff, const PolygonModel &model,
                                       double tol = kTolerance) {
  for (const auto &wa : model.states)
    for (const auto &wb : model.states) {
      const double p = bilinear(wa, eff.m, wb);
      if (p < -tol || p > 1.0 + tol) return false;
    }
  return true;
}

/// T_A Φ T_Bᵀ
inline BipartiteState apply_local(const LocalTransform &ta, const LocalTransform &tb, const BipartiteState &phi) {
  return {ta.matrix * phi.m * tb.matrix.transposed()};
}

inline BipartiteState swap(const BipartiteState &phi) { return {phi.m.transposed()}; }

inline bool is_symmetric(const BipartiteState &phi, double tol = kTolerance) {
  return max_abs_diff(phi.m, phi.m.transposed()) < tol;
}

/// Symmetric and positive semidefinite (all principal minors non-negative).
inline bool is_inner_product_state(const BipartiteState &phi, double tol = kTolerance) {
  if (!is_symmetric(phi, tol)) return false;
  const Mat3 &m = phi.m;
  for (std::size_t i = 0; i < 3; ++i)
    if (m(i, i) < -tol) return false;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (m(i, i) * m(j, j) - m(i, j) * m(j, i) < -tol) return false;
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  return det >= -tol;
}

/// Indices (i, j) with Φ = ω_i ω_jᵀ, if any.
inline std::optional<std::pair<int, int>> match_product_state(const BipartiteState &phi, const PolygonModel &model,
                                                              double tol = kTolerance) {
  for (int i = 1; i <= model.n; ++i)
    for (int j = 1; j <= model.n; ++j)
      if (max_abs_diff(phi.m, outer(model.state(i), model.state(j))) < tol) return std::make_pair(i, j);
  return std::nullopt;
}

inline bool is_product_state(const BipartiteState &phi, const PolygonModel &model) {
  return match_product_state(phi, model).has_value();
}

/// Number of tight product-effect facets and the rank of their normals (rank 8 certifies a vertex
/// of the normalized 8-dimensional state polytope).
struct FacetCertificate {
  std::size_t tight = 0;
  std::size_t rank = 0;
  bool is_vertex() const { return rank >= 8; }
};

inline FacetCertificate facet_certificate(const BipartiteState &phi, const PolygonModel &model,
                                          double tol = kTolerance) {
  std::vector<std::array<double, 9>> rows;
  for (const auto &e : model.ray_effects)
    for (const auto &f : model.ray_effects)
      if (std::abs(bilinear(e, phi.m, f)) < tol) rows.push_back(outer(e, f).a);
  FacetCertificate cert;
  cert.tight = rows.size();
  cert.rank = matrix_rank<9>(std::move(rows));
  return cert;
}

/// Dedup key: entries rounded to 1e-7.
using StateKey = std::array<std::int64_t, 9>;

inline StateKey state_key(const BipartiteState &phi) {
  StateKey k{};
  for (std::size_t i = 0; i < 9; ++i) k[i] = std::llround(phi.m.a[i] * 1e7);
  return k;
}

struct NamedState {
  std::string name;
  BipartiteState state;
};

/// Maximally entangled analogue: identity (odd n) or rotation by π/n (even n).
inline BipartiteState phi_j(int n) {
  if (n % 2 == 1) return {Mat3::identity()};
  const double c = std::cos(std::numbers::pi / n), s = std::sin(std::numbers::pi / n);
  return {Mat3{{c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0}}};
}

/// Pentagon non-maximally entangled representative.
inline BipartiteState phi_h() {
  const double r = build_model(5).r_n;
  const double c = std::cos(std::numbers::pi / 5), s = std::sin(std::numbers::pi / 5);
  const double off = -std::pow(r, 6) * s / (8.0 * (1.0 + r * r));
  const double edge = -std::pow(r, 3) / (4.0 * s);
  return {Mat3{{-c, off, 0.0, off, c, edge, 0.0, edge, 1.0}}};
}

namespace detail {
inline double hex_r() { return build_model(6).r_n; }
} // namespace detail

/// Hexagon Φ_III with the signs of its (1,3), (2,3), (3,1), (3,2) entries given explicitly. The
/// printed matrix is signs = {+1, +1, -1, -1}.
inline BipartiteState phi_iii_variant(const std::array<int, 4> &signs) {
  const double r = detail::hex_r();
  const double a = 2.0 / (3.0 * r * r * r), b = 1.0 / (2.0 * r);
  return {Mat3{{-1.0 / (3.0 * r * r), -1.0 / std::pow(r, 4), signs[0] * a, -1.0 / std::pow(r, 4), 0.0, signs[1] * b,
                signs[2] * a, signs[3] * b, 1.0}}};
}

inline constexpr std::array<int, 4> kPhiIIIPrintedSigns{1, 1, -1, -1};

/// The six hexagon class representatives, in order I..VI.
inline std::vector<NamedState> hexagon_library() {
  const double r = detail::hex_r();
  const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
  std::vector<NamedState> lib;
  lib.push_back({"Phi_I", phi_j(6)});
  lib.push_back({"Phi_II", {Mat3{{1.0 / (15.0 * r2), 0.7, 2.0 / (3.0 * r3), 0.7, 1.0 / (5.0 * r2), 3.0 / (5.0 * r),
                                  2.0 / (3.0 * r3), 3.0 / (5.0 * r), 1.0}}}});
  lib.push_back({"Phi_III", phi_iii_variant(kPhiIIIPrintedSigns)});
  lib.push_back({"Phi_IV", {Mat3{{1.0 / (7.0 * r2), 9.0 / 14.0, 10.0 / (21.0 * r3), 11.0 / 14.0, 1.0 / (7.0 * r2),
                                  5.0 / (7.0 * r), 6.0 / (7.0 * r3), 3.0 / (7.0 * r), 1.0}}}});
  lib.push_back({"Phi_V", {Mat3{{1.0 / (7.0 * r2), 11.0 / 14.0, 6.0 / (7.0 * r3), 9.0 / 14.0, 1.0 / (7.0 * r2),
                                 3.0 / (7.0 * r), 10.0 / (21.0 * r3), 5.0 / (7.0 * r), 1.0}}}});
  lib.push_back({"Phi_VI", {Mat3{{-1.0 / (2.0 * r2), -1.0 / r4, 1.0 / (3.0 * r3), -1.0 / r4, 1.0 / (2.0 * r2),
                                  -1.0 / (2.0 * r), 1.0 / (3.0 * r3), -1.0 / (2.0 * r), 1.0}}}});
  return lib;
}

/// Named entangled states known for the n-gon: {Φ_J} for every n, plus Φ_H (n = 5) and Φ_I..Φ_VI (n = 6).
inline std::vector<NamedState> canonical_entangled_states(int n) {
  if (n < 4) throw InvalidParameter("polygon model requires n >= 4");
  if (n == 5) return {{"Phi_J", phi_j(5)}, {"Phi_H", phi_h()}};
  if (n == 6) return hexagon_library();
  return {{"Phi_J", phi_j(n)}};
}

/// Looks up a library state by name; accepts "Phi_X" or the bare suffix "X".
inline std::optional<BipartiteState> find_named_state(int n, const std::string &name) {
  for (const auto &ns : canonical_entangled_states(n))
    if (ns.name == name || ns.name == "Phi_" + name) return ns.state;
  if (n == 6 && (name == "J" || name == "Phi_J")) return phi_j(6);
  return std::nullopt;
}

/// One sign assignment of Φ_III's third row/column and how it fares as a state.
struct SignVariantReport {
  std::array<int, 4> signs{};
  bool valid = false;
  bool extreme = false;
  bool symmetric = false;
  bool printed = false;
};

/// Tests all 16 sign assignments of Φ_III's off-diagonal third row/column entries.
inline std::vector<SignVariantReport> phi_iii_sign_resolution() {
  const PolygonModel model = build_model(6);
  std::vector<SignVariantReport> out;
  for (int mask = 0; mask < 16; ++mask) {
    std::array<int, 4> signs{};
    for (int b = 0; b < 4; ++b) signs[static_cast<std::size_t>(b)] = (mask >> (3 - b)) & 1 ? -1 : 1;
    const BipartiteState phi = phi_iii_variant(signs);
    SignVariantReport rep;
    rep.signs = signs;
    rep.valid = is_valid_state(phi, model);
    rep.extreme = rep.valid && facet_certificate(phi, model).is_vertex();
    rep.symmetric = is_symmetric(phi);
    rep.printed = signs == kPhiIIIPrintedSigns;
    out.push_back(rep);
  }
  return out;
}

} // namespace polygon_gpt
