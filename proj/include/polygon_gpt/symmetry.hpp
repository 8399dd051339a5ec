#pragma once

// The local symmetry group D2n x D2n acting on 8-element subsets of the n² product effects, with
// orbit representatives and Burnside orbit counting.
//
// Product effect e_i ⊗ e_j has 1-based index n(i-1)+j and lives at bit n(i-1)+(j-1) of a subset mask.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "polygon_gpt/composite.hpp"
#include "polygon_gpt/errors.hpp"
#include "polygon_gpt/polygon.hpp"

namespace polygon_gpt {

inline constexpr int kSubsetSize = 8;
inline constexpr int kMaxSymmetryN = 8; // n² must fit a 64-bit mask

/// 8-element subset of product-effect positions.
struct EffectSubset {
  std::uint64_t mask = 0;

  int size() const { return std::popcount(mask); }
  bool contains(int index1) const { return (mask >> (index1 - 1)) & 1U; }
  /// 1-based product-effect indices in ascending order.
  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::uint64_t m = mask; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
    return out;
  }
  static EffectSubset from_indices(const std::vector<int> &indices1) {
    EffectSubset s;
    for (int i : indices1) s.mask |= std::uint64_t{1} << (i - 1);
    return s;
  }
  friend auto operator<=>(const EffectSubset &, const EffectSubset &) = default;
};

inline int product_index(int n, int i, int j) { return n * (i - 1) + j; }

struct GroupElement {
  LocalTransform alice;
  LocalTransform bob;
  std::vector<std::uint8_t> position_map; ///< bit p of a subset moves to bit position_map[p]
};

struct OrbitSummary {
  EffectSubset representative;
  std::size_t size = 0;
};

enum class RepresentativeChoice { minimal, maximal };

class SymmetryGroup {
public:
  explicit SymmetryGroup(int n) : model_(build_model(n)) {
    if (n > kMaxSymmetryN)
      throw InvalidParameter("symmetry engine supports n <= " + std::to_string(kMaxSymmetryN));
    local_ = transformations(model_);
    for (const auto &t : local_) local_perm_.push_back(effect_permutation(model_, t));
    elements_.reserve(local_.size() * local_.size());
    for (std::size_t a = 0; a < local_.size(); ++a)
      for (std::size_t b = 0; b < local_.size(); ++b) {
        GroupElement g{local_[a], local_[b], std::vector<std::uint8_t>(static_cast<std::size_t>(n * n))};
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j)
            g.position_map[static_cast<std::size_t>(product_index(n, i, j) - 1)] = static_cast<std::uint8_t>(
                product_index(n, local_perm_[a][static_cast<std::size_t>(i - 1)], local_perm_[b][static_cast<std::size_t>(j - 1)]) -
                1);
        elements_.push_back(std::move(g));
      }
  }

  int n() const { return model_.n; }
  int effect_count() const { return model_.n * model_.n; }
  const PolygonModel &model() const { return model_; }
  const std::vector<GroupElement> &elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<LocalTransform> &local_transforms() const { return local_; }

  /// Position of T_{k}^{s} in `local_transforms()`.
  std::size_t local_index(int k, int s) const {
    return static_cast<std::size_t>((s == 1 ? 0 : model_.n) + k - 1);
  }
  std::size_t element_index(int ka, int sa, int kb, int sb) const {
    return local_index(ka, sa) * local_.size() + local_index(kb, sb);
  }
  const GroupElement &element(int ka, int sa, int kb, int sb) const { return elements_[element_index(ka, sa, kb, sb)]; }
  const GroupElement &identity() const { return element(model_.n, 1, model_.n, 1); }

  /// g∘h (h applied first).
  const GroupElement &multiply(const GroupElement &g, const GroupElement &h) const {
    const LocalTransform a = compose(model_, g.alice, h.alice);
    const LocalTransform b = compose(model_, g.bob, h.bob);
    return element(a.k, a.s, b.k, b.s);
  }

private:
  PolygonModel model_;
  std::vector<LocalTransform> local_;
  std::vector<std::vector<int>> local_perm_;
  std::vector<GroupElement> elements_;
};

/// All 4n² elements, ordered by (Alice transform, Bob transform) with rotations before reflections.
inline std::vector<GroupElement> group_elements(int n) { return SymmetryGroup(n).elements(); }

inline EffectSubset act(const GroupElement &g, const EffectSubset &s) {
  std::uint64_t out = 0;
  for (std::uint64_t m = s.mask; m != 0; m &= m - 1)
    out |= std::uint64_t{1} << g.position_map[static_cast<std::size_t>(std::countr_zero(m))];
  return {out};
}

inline BipartiteState apply_local(const GroupElement &g, const BipartiteState &phi) {
  return apply_local(g.alice, g.bob, phi);
}

inline EffectSubset canonical_form(const SymmetryGroup &group, const EffectSubset &s) {
  EffectSubset best = s;
  for (const auto &g : group.elements()) best = std::min(best, act(g, s));
  return best;
}

inline bool is_canonical(const SymmetryGroup &group, const EffectSubset &s) {
  for (const auto &g : group.elements())
    if (act(g, s) < s) return false;
  return true;
}

inline std::size_t orbit_size(const SymmetryGroup &group, const EffectSubset &s) {
  std::vector<std::uint64_t> images;
  images.reserve(group.order());
  for (const auto &g : group.elements()) images.push_back(act(g, s).mask);
  std::sort(images.begin(), images.end());
  return static_cast<std::size_t>(std::unique(images.begin(), images.end()) - images.begin());
}

namespace detail {

using Binomials = std::array<std::array<std::uint64_t, kSubsetSize + 1>, 65>;

inline const Binomials &binomials() {
  static const Binomials table = [] {
    Binomials c{};
    for (std::size_t m = 0; m < c.size(); ++m) {
      c[m][0] = 1;
      for (std::size_t k = 1; k <= kSubsetSize && k <= m; ++k)
        c[m][k] = c[m - 1][k - 1] + (k <= m - 1 ? c[m - 1][k] : 0);
    }
    return c;
  }();
  return table;
}

/// Position of an 8-subset in increasing-integer order (combinatorial number system).
inline std::uint64_t subset_rank(std::uint64_t mask) {
  const auto &c = binomials();
  std::uint64_t rank = 0;
  std::size_t k = 1;
  for (std::uint64_t m = mask; m != 0; m &= m - 1, ++k) rank += c[static_cast<std::size_t>(std::countr_zero(m))][k];
  return rank;
}

/// Next mask with the same popcount (Gosper). Returns 0 past the last subset of `bits` positions.
inline std::uint64_t next_subset(std::uint64_t x, int bits) {
  const std::uint64_t c = x & (~x + 1);
  const std::uint64_t r = x + c;
  if (r == 0) return 0;
  const std::uint64_t next = (((r ^ x) >> 2) / c) | r;
  if (bits < 64 && (next >> bits) != 0) return 0;
  return next;
}

inline std::uint64_t first_subset() { return (std::uint64_t{1} << kSubsetSize) - 1; }

} // namespace detail

inline std::uint64_t total_subsets(int n) { return detail::binomials()[static_cast<std::size_t>(n * n)][kSubsetSize]; }

/// Calls `visit(OrbitSummary)` once per orbit of 8-subsets, in ascending order of the minimal orbit
/// member. With `RepresentativeChoice::maximal` the reported representative is the largest member.
///
/// Subsets are scanned in increasing integer order; the first unvisited subset of an orbit is its
/// minimum, and its whole orbit is marked visited in a bitmap indexed by subset rank.
template <typename Visitor>
void for_each_orbit(const SymmetryGroup &group, Visitor &&visit,
                    RepresentativeChoice choice = RepresentativeChoice::minimal) {
  const int bits = group.effect_count();
  const std::uint64_t total = total_subsets(group.n());
  if (total > (std::uint64_t{1} << 31))
    throw InvalidParameter("orbit streaming needs a visited bitmap that is too large for n = " +
                           std::to_string(group.n()));
  std::vector<std::uint64_t> visited((total + 63) / 64, 0);
  std::vector<std::uint64_t> images;
  images.reserve(group.order());
  std::uint64_t rank = 0;
  for (std::uint64_t s = detail::first_subset(); s != 0; s = detail::next_subset(s, bits), ++rank) {
    if ((visited[rank >> 6] >> (rank & 63)) & 1U) continue;
    images.clear();
    for (const auto &g : group.elements()) images.push_back(act(g, {s}).mask);
    std::sort(images.begin(), images.end());
    images.erase(std::unique(images.begin(), images.end()), images.end());
    for (std::uint64_t m : images) {
      const std::uint64_t r = detail::subset_rank(m);
      visited[r >> 6] |= std::uint64_t{1} << (r & 63);
    }
    OrbitSummary summary{{choice == RepresentativeChoice::minimal ? images.front() : images.back()}, images.size()};
    visit(summary);
  }
}

inline std::vector<OrbitSummary> orbit_representatives(const SymmetryGroup &group,
                                                       RepresentativeChoice choice = RepresentativeChoice::minimal) {
  std::vector<OrbitSummary> out;
  for_each_orbit(group, [&](const OrbitSummary &o) { out.push_back(o); }, choice);
  return out;
}

/// Cycle lengths of g's action on the n² product effects.
inline std::vector<int> cycle_type(const GroupElement &g) {
  const std::size_t size = g.position_map.size();
  std::vector<bool> seen(size, false);
  std::vector<int> lengths;
  for (std::size_t start = 0; start < size; ++start) {
    if (seen[start]) continue;
    int len = 0;
    for (std::size_t p = start; !seen[p]; p = g.position_map[p]) {
      seen[p] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

/// Number of 8-subsets fixed by g: selections of whole cycles whose lengths sum to 8.
inline std::uint64_t fixed_subset_count(const GroupElement &g) {
  std::array<std::uint64_t, kSubsetSize + 1> ways{};
  ways[0] = 1;
  for (int len : cycle_type(g))
    for (int t = kSubsetSize; t >= len; --t) ways[static_cast<std::size_t>(t)] += ways[static_cast<std::size_t>(t - len)];
  return ways[kSubsetSize];
}

inline std::uint64_t burnside_orbit_count(const SymmetryGroup &group) {
  std::uint64_t sum = 0;
  for (const auto &g : group.elements()) sum += fixed_subset_count(g);
  if (sum % group.order() != 0)
    throw InternalInconsistency("fixed-point total " + std::to_string(sum) + " is not divisible by the group order");
  return sum / group.order();
}

inline std::uint64_t burnside_orbit_count(int n) { return burnside_orbit_count(SymmetryGroup(n)); }

/// Local transform for row/column `a` of the fixed-point table: rotations r^0..r^{n-1} followed by
/// reflections r^0 f..r^{n-1} f, where f reverses the effect labels (e_i -> e_{n+1-i}).
inline LocalTransform table_transform(const PolygonModel &model, int a) {
  const int n = model.n;
  return a < n ? transformation(model, wrap_index(a, n), 1) : transformation(model, wrap_index(a - n, n), -1);
}

/// 2n x 2n grid of fixed-subset counts; for n = 4 the row/column order is I, r, r², r³, f, rf, r²f, r³f.
inline std::vector<std::vector<std::uint64_t>> fixed_point_table(const SymmetryGroup &group) {
  const int size = 2 * group.n();
  std::vector<std::vector<std::uint64_t>> table(static_cast<std::size_t>(size),
                                                std::vector<std::uint64_t>(static_cast<std::size_t>(size)));
  for (int a = 0; a < size; ++a)
    for (int b = 0; b < size; ++b) {
      const LocalTransform ta = table_transform(group.model(), a), tb = table_transform(group.model(), b);
      table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          fixed_subset_count(group.element(ta.k, ta.s, tb.k, tb.s));
    }
  return table;
}

/// {g Φ} over the group, deduplicated and sorted by state key.
inline std::vector<BipartiteState> state_orbit(const SymmetryGroup &group, const BipartiteState &phi) {
  std::map<StateKey, BipartiteState> seen;
  for (const auto &g : group.elements()) {
    BipartiteState image = apply_local(g, phi);
    seen.emplace(state_key(image), image);
  }
  std::vector<BipartiteState> out;
  out.reserve(seen.size());
  for (auto &[key, state] : seen) out.push_back(state);
  return out;
}

} // namespace polygon_gpt
