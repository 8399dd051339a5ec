#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>

#include "oracles.hpp"
#include "polygon_gpt/enumerate.hpp"

using namespace polygon_gpt;

namespace {

/// Enumerations are reused across tests; n = 6 takes a few seconds.
const Enumeration &cached(int n) {
  static std::map<int, Enumeration> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, enumerate_extreme_states(SymmetryGroup(n))).first;
  return it->second;
}

std::set<StateKey> keys(const std::vector<BipartiteState> &v) {
  std::set<StateKey> out;
  for (const auto &s : v) out.insert(state_key(s));
  return out;
}

std::vector<std::size_t> sorted_sizes(const std::vector<EntanglementClass> &classes) {
  std::vector<std::size_t> out;
  for (const auto &c : classes) out.push_back(c.size);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(SolveCandidate, RequiresEightEffects) {
  const PolygonModel m = build_model(5);
  EXPECT_THROW(solve_candidate(m, EffectSubset::from_indices({1, 2, 3})), InvalidParameter);
}

TEST(SolveCandidate, ProductVertex) {
  // Facets through ω₁ω₁ᵀ: e_i ⊗ e_j with e_i(ω₁) = 0 or e_j(ω₁) = 0.
  const PolygonModel m = build_model(5);
  std::vector<int> zero;
  for (int i = 1; i <= 5; ++i)
    if (std::abs(dot(m.effect(i), m.state(1))) < 1e-12) zero.push_back(i);
  ASSERT_EQ(zero.size(), 2U);
  std::vector<int> idx;
  for (int i : zero)
    for (int j = 1; j <= 5; ++j) idx.push_back(product_index(5, i, j));
  for (int j : zero)
    for (int i = 1; i <= 5; ++i)
      if (std::find(zero.begin(), zero.end(), i) == zero.end()) idx.push_back(product_index(5, i, j));
  // 10 + 6 facets pass through the vertex; pick 8 that pin it down.
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  bool found = false;
  for (std::uint64_t mask : oracle::all_subsets(static_cast<int>(idx.size()))) {
    std::vector<int> pick;
    for (std::size_t b = 0; b < idx.size(); ++b)
      if ((mask >> b) & 1U) pick.push_back(idx[b]);
    const CandidateSolution sol = solve_candidate(m, EffectSubset::from_indices(pick));
    if (sol.status == CandidateStatus::rank_deficient) continue;
    EXPECT_EQ(sol.status, CandidateStatus::extreme);
    EXPECT_LT(max_abs_diff(sol.state->m, product_state(m.state(1), m.state(1)).m), 1e-9);
    found = true;
    break;
  }
  EXPECT_TRUE(found);
}

TEST(SolveCandidate, RankDeficientWhenHyperplanesShareALine) {
  // All eight facets from Alice's e₁ row: e₁ ⊗ e_j only spans a 3-dimensional space.
  const PolygonModel m = build_model(5);
  const CandidateSolution sol = solve_candidate(m, EffectSubset::from_indices({1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_NE(sol.status, CandidateStatus::extreme);
  const CandidateSolution row = solve_candidate(
      build_model(6), EffectSubset::from_indices({1, 2, 3, 4, 5, 6, 7, 13}));
  EXPECT_EQ(row.status, CandidateStatus::rank_deficient);
  EXPECT_FALSE(row.state);
  EXPECT_STREQ(to_string(row.status), "rank_deficient");
}

TEST(SolveCandidate, PhiJAmongPentagonSolutions) {
  const SymmetryGroup g(5);
  bool found = false;
  for (const auto &o : orbit_representatives(g)) {
    const CandidateSolution sol = solve_candidate(g.model(), o.representative);
    if (sol.status != CandidateStatus::extreme) continue;
    for (const auto &image : state_orbit(g, *sol.state)) found = found || max_abs_diff(image.m, phi_j(5).m) < 1e-9;
    if (found) break;
  }
  EXPECT_TRUE(found);
}

TEST(Enumerate, Square) {
  const Enumeration &e = cached(4);
  const PolygonModel m = build_model(4);
  EXPECT_EQ(e.vertices.size(), 24U);
  EXPECT_EQ(count_product_states(e.vertices, m), 16U);
  const auto classes = classify_entangled(e.vertices, 4);
  ASSERT_EQ(classes.size(), 1U);
  EXPECT_EQ(classes[0].size, 8U);
  EXPECT_EQ(classes[0].matched_name, "Phi_J");
}

TEST(Enumerate, Pentagon) {
  const auto t0 = std::chrono::steady_clock::now();
  const Enumeration &e = cached(5);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 120.0);
  const PolygonModel m = build_model(5);
  EXPECT_EQ(e.representatives, 11103U);
  EXPECT_EQ(e.vertices.size(), 135U);
  EXPECT_EQ(count_product_states(e.vertices, m), 25U);
  const auto classes = classify_entangled(e.vertices, 5);
  EXPECT_EQ(sorted_sizes(classes), (std::vector<std::size_t>{10, 100}));
  for (const auto &c : classes) {
    ASSERT_TRUE(c.matched_name);
    EXPECT_EQ(*c.matched_name, c.size == 10 ? "Phi_J" : "Phi_H");
    EXPECT_TRUE(c.swap_closed);
  }
}

TEST(Enumerate, Hexagon) {
  const Enumeration &e = cached(6);
  const PolygonModel m = build_model(6);
  EXPECT_EQ(count_product_states(e.vertices, m), 36U);
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j)
      EXPECT_TRUE(keys(e.vertices).contains(state_key(product_state(m.state(i), m.state(j)))));
  const auto classes = classify_entangled(e.vertices, 6);
  ASSERT_EQ(classes.size(), 6U);
  std::set<std::string> names;
  std::size_t total = 0;
  for (const auto &c : classes) {
    ASSERT_TRUE(c.matched_name);
    EXPECT_EQ(c.matched_name->find(','), std::string::npos) << "two library states share a class";
    names.insert(*c.matched_name);
    total += c.size;
  }
  EXPECT_EQ(names.size(), 6U);
  EXPECT_EQ(total, e.vertices.size() - 36);
  // Swap exchanges the Φ_IV and Φ_V classes and fixes every other class.
  auto by_name = [&](const std::string &name) {
    return *std::find_if(classes.begin(), classes.end(), [&](const auto &c) { return c.matched_name == name; });
  };
  EXPECT_EQ(by_name("Phi_IV").swap_related_to, by_name("Phi_V").id);
  EXPECT_EQ(by_name("Phi_V").swap_related_to, by_name("Phi_IV").id);
  for (const char *name : {"Phi_I", "Phi_II", "Phi_III", "Phi_VI"}) EXPECT_TRUE(by_name(name).swap_closed) << name;
}

TEST(Enumerate, MatchesBruteForceSquare) {
  const auto ref = oracle::brute_vertices(4);
  std::set<StateKey> expected;
  for (const auto &[k, v] : ref) expected.insert(k);
  EXPECT_EQ(keys(cached(4).vertices), expected);
}

TEST(Enumerate, MatchesBruteForcePentagon) {
  const auto ref = oracle::brute_vertices(5);
  std::set<StateKey> expected;
  for (const auto &[k, v] : ref) expected.insert(k);
  EXPECT_EQ(expected.size(), 135U);
  EXPECT_EQ(keys(cached(5).vertices), expected);
}

TEST(Enumerate, RepresentativeChoiceDoesNotMatter) {
  for (int n : {4, 5}) {
    const SymmetryGroup g(n);
    const auto lo = enumerate_extreme_states(g, {RepresentativeChoice::minimal, 1});
    const auto hi = enumerate_extreme_states(g, {RepresentativeChoice::maximal, 1});
    EXPECT_EQ(keys(lo.vertices), keys(hi.vertices)) << n;
  }
}

TEST(Enumerate, WorkerCountDoesNotMatter) {
  const SymmetryGroup g(5);
  const auto one = enumerate_extreme_states(g, {RepresentativeChoice::minimal, 1});
  const auto four = enumerate_extreme_states(g, {RepresentativeChoice::minimal, 4});
  ASSERT_EQ(one.vertices.size(), four.vertices.size());
  for (std::size_t i = 0; i < one.vertices.size(); ++i) EXPECT_EQ(one.vertices[i], four.vertices[i]);
}

TEST(Enumerate, CertifiedAndClosedUnderFullGroup) {
  for (int n : {4, 5, 6}) {
    const SymmetryGroup g(n);
    const auto &vs = cached(n).vertices;
    const auto all = keys(vs);
    for (const auto &v : vs) {
      EXPECT_TRUE(is_valid_state(v, g.model(), kPositivityTolerance));
      EXPECT_TRUE(facet_certificate(v, g.model()).is_vertex());
      EXPECT_TRUE(all.contains(state_key(swap(v))));
      if (n < 6) {
        for (const auto &el : g.elements()) ASSERT_TRUE(all.contains(state_key(apply_local(el, v))));
      }
    }
  }
}

TEST(CertifyVertices, RejectsNonVertex) {
  const PolygonModel m = build_model(5);
  const BipartiteState mix{0.5 * (phi_j(5).m + phi_h().m)};
  EXPECT_THROW(certify_vertices({mix}, m), InternalInconsistency);
  EXPECT_THROW(certify_vertices({BipartiteState{2.0 * phi_j(5).m}}, m), InternalInconsistency);
  EXPECT_NO_THROW(certify_vertices({phi_j(5), phi_h()}, m));
}

TEST(Classify, MissingLibraryStateIsInconsistent) {
  const SymmetryGroup g(5);
  const auto j_orbit = keys(state_orbit(g, phi_j(5)));
  std::vector<BipartiteState> only_j;
  for (const auto &s : cached(5).vertices)
    if (j_orbit.contains(state_key(s)) || is_product_state(s, g.model())) only_j.push_back(s);
  ASSERT_EQ(only_j.size(), 35U);
  EXPECT_THROW(classify_entangled(only_j, g, canonical_entangled_states(5)), InternalInconsistency);
  EXPECT_NO_THROW(classify_entangled(only_j, g, {{"Phi_J", phi_j(5)}}));
}

TEST(Classify, ClassMembersAreConnected) {
  const SymmetryGroup g(5);
  for (const auto &c : classify_entangled(cached(5).vertices, g, canonical_entangled_states(5))) {
    EXPECT_EQ(keys(c.members), keys(state_orbit(g, c.representative)));
    EXPECT_EQ(c.representative, c.members.front());
    for (const auto &mbr : c.members) EXPECT_FALSE(is_product_state(mbr, g.model()));
  }
}
