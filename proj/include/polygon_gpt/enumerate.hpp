#pragma once

// Vertex enumeration of the maximal bipartite composition and partition of its entangled vertices
// into classes under local reversible transformations.
//
// Pipeline: orbit representatives of 8-subsets of product effects -> unique intersection point of
// their 8 facet hyperplanes with the normalization hyperplane -> positivity against every product
// effect -> orbit expansion and dedup.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polygon_gpt/composite.hpp"
#include "polygon_gpt/errors.hpp"
#include "polygon_gpt/parallel.hpp"
#include "polygon_gpt/symmetry.hpp"

namespace polygon_gpt {

inline constexpr double kRankPivot = 1e-9;
inline constexpr double kPositivityTolerance = 1e-9;

enum class CandidateStatus { rank_deficient, positivity_violated, extreme };

inline const char *to_string(CandidateStatus s) {
  switch (s) {
  case CandidateStatus::rank_deficient: return "rank_deficient";
  case CandidateStatus::positivity_violated: return "positivity_violated";
  case CandidateStatus::extreme: return "extreme";
  }
  return "?";
}

struct CandidateSolution {
  EffectSubset subset;
  std::optional<BipartiteState> state;
  CandidateStatus status = CandidateStatus::rank_deficient;
};

/// Intersects the 8 facet hyperplanes eᵢᵀΦfⱼ = 0 of `subset` with Φ₃₃ = 1.
inline CandidateSolution solve_candidate(const PolygonModel &model, const EffectSubset &subset) {
  if (subset.size() != kSubsetSize)
    throw InvalidParameter("candidate subsets must contain exactly 8 product effects");
  const int n = model.n;
  SquareMatrix<9> system{};
  std::array<double, 9> rhs{};
  std::size_t row = 0;
  for (int idx : subset.indices()) {
    const int i = (idx - 1) / n + 1, j = (idx - 1) % n + 1;
    if (i > n) throw InvalidParameter("subset index exceeds n²");
    system[row++] = outer(model.effect(i), model.effect(j)).a;
  }
  system[8][8] = 1.0;
  rhs[8] = 1.0;

  CandidateSolution out{subset, std::nullopt, CandidateStatus::rank_deficient};
  const auto x = solve_linear<9>(system, rhs, kRankPivot);
  if (!x) return out;
  BipartiteState phi{Mat3{*x}};
  out.state = phi;
  out.status = min_product_effect_value(phi, model) >= -kPositivityTolerance ? CandidateStatus::extreme
                                                                            : CandidateStatus::positivity_violated;
  return out;
}

struct EnumerationOptions {
  RepresentativeChoice representative = RepresentativeChoice::minimal;
  unsigned workers = 1;
};

struct Enumeration {
  int n = 0;
  std::size_t representatives = 0; ///< orbit representatives examined
  std::size_t unique_solutions = 0; ///< representatives with a unique intersection point
  std::size_t feasible_solutions = 0; ///< ... that also satisfy positivity
  std::vector<BipartiteState> vertices; ///< sorted by state key
};

/// Confirms every vertex is a valid state lying on facets of rank 8; throws otherwise.
inline void certify_vertices(const std::vector<BipartiteState> &vertices, const PolygonModel &model) {
  for (const auto &v : vertices) {
    if (!is_valid_state(v, model, kPositivityTolerance))
      throw InternalInconsistency("enumerated vertex violates positivity or normalization");
    if (!facet_certificate(v, model).is_vertex())
      throw InternalInconsistency("enumerated vertex is not cut out by facets of rank 8");
  }
}

inline Enumeration enumerate_extreme_states(const SymmetryGroup &group, const EnumerationOptions &options = {}) {
  const PolygonModel &model = group.model();
  const std::vector<OrbitSummary> reps = orbit_representatives(group, options.representative);

  std::vector<CandidateSolution> solutions(reps.size());
  parallel_for(reps.size(), options.workers,
               [&](std::size_t i) { solutions[i] = solve_candidate(model, reps[i].representative); });

  Enumeration result;
  result.n = group.n();
  result.representatives = reps.size();
  std::map<StateKey, BipartiteState> vertices;
  for (const auto &sol : solutions) {
    if (sol.status == CandidateStatus::rank_deficient) continue;
    ++result.unique_solutions;
    if (sol.status != CandidateStatus::extreme) continue;
    ++result.feasible_solutions;
    // The vertex set only ever grows by whole orbits, so a known state means a known orbit.
    if (vertices.contains(state_key(*sol.state))) continue;
    for (const auto &image : state_orbit(group, *sol.state)) vertices.emplace(state_key(image), image);
  }
  result.vertices.reserve(vertices.size());
  for (auto &[key, v] : vertices) result.vertices.push_back(v);
  certify_vertices(result.vertices, model);
  return result;
}

inline std::vector<BipartiteState> enumerate_extreme_states(int n) {
  return enumerate_extreme_states(SymmetryGroup(n)).vertices;
}

struct EntanglementClass {
  int id = 0;
  BipartiteState representative; ///< member with the smallest state key
  std::vector<BipartiteState> members;
  std::size_t size = 0;
  std::optional<std::string> matched_name;
  bool symmetric = false;                ///< some member is a symmetric matrix
  bool representative_symmetric = false;
  std::optional<int> swap_related_to;    ///< class that Swap maps this class onto, when different
  bool swap_closed = false;              ///< Swap maps the class onto itself
};

namespace detail {
/// Key lookup with a tolerance scan as fallback for states sitting on a rounding boundary.
inline std::optional<std::size_t> find_class(const std::map<StateKey, std::size_t> &owner,
                                             const std::vector<EntanglementClass> &classes, const BipartiteState &s) {
  if (const auto it = owner.find(state_key(s)); it != owner.end()) return it->second;
  for (const auto &c : classes)
    for (const auto &m : c.members)
      if (max_abs_diff(m.m, s.m) < 1e-7) return static_cast<std::size_t>(c.id);
  return std::nullopt;
}
} // namespace detail

/// Partitions the entangled vertices into D2n x D2n orbits (Swap excluded) and labels each class
/// with the library state it contains.
inline std::vector<EntanglementClass> classify_entangled(const std::vector<BipartiteState> &states,
                                                         const SymmetryGroup &group,
                                                         const std::vector<NamedState> &library) {
  const PolygonModel &model = group.model();
  std::vector<BipartiteState> entangled;
  for (const auto &s : states)
    if (!is_product_state(s, model)) entangled.push_back(s);
  std::sort(entangled.begin(), entangled.end(),
            [](const BipartiteState &a, const BipartiteState &b) { return state_key(a) < state_key(b); });

  std::map<StateKey, std::size_t> owner;
  std::vector<EntanglementClass> classes;
  for (const auto &s : entangled) {
    if (owner.contains(state_key(s))) continue;
    EntanglementClass c;
    c.id = static_cast<int>(classes.size());
    c.members = state_orbit(group, s);
    c.representative = c.members.front();
    c.size = c.members.size();
    c.representative_symmetric = is_symmetric(c.representative);
    for (const auto &m : c.members) {
      c.symmetric = c.symmetric || is_symmetric(m);
      owner.emplace(state_key(m), classes.size());
    }
    classes.push_back(std::move(c));
  }
  for (const auto &s : entangled)
    if (!owner.contains(state_key(s)))
      throw InternalInconsistency("entangled vertex set is not closed under local transformations");

  for (auto &c : classes) {
    const auto target = detail::find_class(owner, classes, swap(c.representative));
    if (!target) throw InternalInconsistency("vertex set is not closed under Swap");
    if (*target == static_cast<std::size_t>(c.id))
      c.swap_closed = true;
    else
      c.swap_related_to = static_cast<int>(*target);
  }
  for (const auto &named : library) {
    const auto target = detail::find_class(owner, classes, named.state);
    if (!target) throw InternalInconsistency(named.name + " was not found among the enumerated entangled vertices");
    auto &c = classes[*target];
    c.matched_name = c.matched_name ? *c.matched_name + "," + named.name : named.name;
  }
  return classes;
}

inline std::vector<EntanglementClass> classify_entangled(const std::vector<BipartiteState> &states, int n) {
  return classify_entangled(states, SymmetryGroup(n), canonical_entangled_states(n));
}

inline std::size_t count_product_states(const std::vector<BipartiteState> &states, const PolygonModel &model) {
  return static_cast<std::size_t>(
      std::count_if(states.begin(), states.end(), [&](const BipartiteState &s) { return is_product_state(s, model); }));
}

} // namespace polygon_gpt
