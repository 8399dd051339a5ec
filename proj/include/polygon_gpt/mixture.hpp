#pragma once

// Noisy bipartite states: Hardy nonlocality surviving product-state admixture, and the gap between
// the entanglement and CHSH-violation thresholds of Werner-type mixtures pΦ_J + (1-p) u⊗u.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polygon_gpt/composite.hpp"
#include "polygon_gpt/errors.hpp"
#include "polygon_gpt/nonlocality.hpp"
#include "polygon_gpt/parallel.hpp"

namespace polygon_gpt {

/// weight·base + (1 - weight)·noise
struct NoisyState {
  BipartiteState base;
  BipartiteState noise;
  double weight = 1.0;

  BipartiteState mixed() const { return {weight * base.m + (1.0 - weight) * noise.m}; }
};

/// u ⊗ u: the single nonzero entry is (3,3).
inline BipartiteState maximally_mixed() { return product_state(Vec3{0, 0, 1}, Vec3{0, 0, 1}); }

inline BipartiteState werner_state(int n, double p) { return NoisyState{phi_j(n), maximally_mixed(), p}.mixed(); }

/// Entangled effect E_ab and its complement u⊗u - E_ab.
inline std::pair<BipartiteEffect, BipartiteEffect> entangled_effect(int n) {
  const PolygonModel model = build_model(n);
  BipartiteEffect e;
  if (model.parity == Parity::odd) {
    e.m = (1.0 / (1.0 + model.r_n * model.r_n)) * Mat3::identity();
  } else {
    const double c = std::cos(std::numbers::pi / n), s = std::sin(std::numbers::pi / n);
    e.m = 0.5 * Mat3{{-c, -s, 0.0, s, -c, 0.0, 0.0, 0.0, 1.0}};
  }
  const BipartiteEffect bar{maximally_mixed().m - e.m};
  return {e, bar};
}

/// Sufficient entanglement test: some entangled effect takes a negative value on Φ.
inline bool witness_entanglement(const BipartiteState &phi, int n, double tol = kTolerance) {
  const auto [e, bar] = entangled_effect(n);
  return joint_prob(e, phi) < -tol || joint_prob(bar, phi) < -tol;
}

struct ThresholdReport {
  int n = 0;
  double b_max = 0.0;        ///< max CHSH of Φ_J
  double p_e = 0.0;          ///< witness detects entanglement for p > p_e
  double p_nl = 0.0;         ///< CHSH is violated for p > p_nl (exact, from the tuple-wise scan)
  double p_nl_formula = 0.0; ///< closed form in terms of b_max alone
  bool gap_exists = false;   ///< p_e < p_nl
};

/// Smallest p in [0, 1] at which max |CHSH| of p·signal + (1-p)·noise reaches 2. Every tuple's
/// CHSH value is affine in p, so the crossing is computed per tuple in closed form.
inline std::optional<double> chsh_crossing(const BipartiteState &signal, const BipartiteState &noise,
                                           const PolygonModel &model, unsigned workers = 1) {
  const detail::ProbabilityTable ts(signal, model), tn(noise, model);
  const std::size_t m = ts.measurements.size();
  std::vector<std::vector<double>> cs(m, std::vector<double>(m)), cn(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      cs[i][j] = ts.correlator(i, j);
      cn[i][j] = tn.correlator(i, j);
    }
  std::vector<double> partial(m, 2.0);
  parallel_for(m, workers, [&](std::size_t i1) {
    double best = 2.0; // sentinel: no crossing in [0, 1]
    for (std::size_t i2 = 0; i2 < m; ++i2)
      for (std::size_t j1 = 0; j1 < m; ++j1)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          const double a = cs[i1][j1] + cs[i1][j2] + cs[i2][j1] - cs[i2][j2];
          const double b = cn[i1][j1] + cn[i1][j2] + cn[i2][j1] - cn[i2][j2];
          if (std::abs(b) >= 2.0) {
            best = 0.0;
            continue;
          }
          for (double target : {2.0, -2.0}) {
            if (a == b) continue;
            const double p = (target - b) / (a - b);
            if (p >= 0.0 && p <= 1.0) best = std::min(best, p);
          }
        }
    partial[i1] = best;
  });
  const double p = *std::min_element(partial.begin(), partial.end());
  if (p > 1.0) return std::nullopt;
  return p;
}

inline ThresholdReport noise_thresholds(const PolygonModel &model, double b_max, unsigned workers = 1) {
  if (!(b_max > 0.0)) throw InvalidParameter("b_max must be positive");
  ThresholdReport rep;
  rep.n = model.n;
  rep.b_max = b_max;
  const double r2 = model.r_n * model.r_n;
  if (model.parity == Parity::odd) {
    rep.p_e = r2 / 2.0;
    rep.p_nl_formula = 8.0 * r2 / (b_max * (r2 + 1.0) * (r2 + 1.0) + (r2 - 1.0) * (r2 - 1.0));
  } else {
    rep.p_e = 0.5;
    rep.p_nl_formula = 2.0 / b_max;
  }
  const auto crossing = chsh_crossing(phi_j(model.n), maximally_mixed(), model, workers);
  if (!crossing) throw InternalInconsistency("Werner-type mixture never violates CHSH for n = " + std::to_string(model.n));
  rep.p_nl = *crossing;
  rep.gap_exists = rep.p_e < rep.p_nl - kTolerance;
  return rep;
}

/// Thresholds with b_max taken from a live CHSH scan of Φ_J.
inline ThresholdReport noise_thresholds(int n, unsigned workers = 1) {
  const PolygonModel model = build_model(n);
  return noise_thresholds(model, chsh_max(phi_j(n), model, workers).value, workers);
}

struct MixedHardy {
  HardyWitness witness;
  std::pair<int, int> product{0, 0}; ///< (i, j) of the admixed ω_i ⊗ ω_j
  NoisyState state;
  Behaviour behaviour;
};

namespace detail {
inline void check_weight(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidParameter("mixing weight must lie in (0, 1]");
}

inline MixedHardy evaluate_mixed_hardy(const PolygonModel &model, const BipartiteState &base, std::pair<int, int> product,
                                       double epsilon, const std::array<MeasurementLabel, 4> &labels) {
  MixedHardy out;
  out.product = product;
  out.state = {base, product_state(model.state(product.first), model.state(product.second)), epsilon};
  auto meas = [&](const MeasurementLabel &l) { return measurement(model, l.index, l.flipped); };
  out.behaviour = behaviour(out.state.mixed(), meas(labels[0]), meas(labels[1]), meas(labels[2]), meas(labels[3]));
  const auto success = hardy_check(out.behaviour);
  if (!success) throw InternalInconsistency("mixed state does not satisfy the Hardy conditions");
  out.witness = {labels, *success, hardy_residuals(out.behaviour)};
  return out;
}
} // namespace detail

/// εΦ_J + (1-ε) ω_r ⊗ ω_s for even n, with (r, s) the first product state (row-major) that vanishes on
/// all four Hardy cells of an optimal Φ_J tuple.
inline MixedHardy hardy_mixed_even(int n, double epsilon) {
  const PolygonModel model = build_model(n);
  if (model.parity != Parity::even) throw Unsupported("hardy_mixed_even requires an even polygon");
  detail::check_weight(epsilon);
  const HardyScan scan = hardy_scan(phi_j(n), model);
  if (!scan.best) throw InternalInconsistency("Φ_J shows no Hardy witness for n = " + std::to_string(n));
  auto meas = [&](const MeasurementLabel &l) { return measurement(model, l.index, l.flipped); };
  for (const auto &w : scan.ties)
    for (int r = 1; r <= n; ++r)
      for (int s = 1; s <= n; ++s) {
        const Behaviour b = behaviour(product_state(model.state(r), model.state(s)), meas(w.labels[0]),
                                      meas(w.labels[1]), meas(w.labels[2]), meas(w.labels[3]));
        const auto res = hardy_residuals(b);
        if (std::max({res[0], res[1], res[2], b(1, 1, 1, 1)}) > kHardyTolerance) continue;
        return detail::evaluate_mixed_hardy(model, phi_j(n), {r, s}, epsilon, w.labels);
      }
  throw InternalInconsistency("no product state annihilates the Hardy cells of an optimal Φ_J tuple");
}

/// Product states for which εΦ_H + (1-ε) ω_i ⊗ ω_j keeps a Hardy witness.
inline const std::vector<std::pair<int, int>> &pentagon_product_choices() {
  static const std::vector<std::pair<int, int>> choices{{3, 4}, {3, 5}, {4, 3}, {4, 4}, {5, 3}};
  return choices;
}

/// Measurement tuple (M1, M2, N1, N2) used for each admissible pentagon product admixture.
inline std::array<MeasurementLabel, 4> pentagon_mixed_tuple(std::pair<int, int> product) {
  const MeasurementLabel e1{1, false}, e2bar{2, true}, e5{5, false};
  if (product == std::pair{3, 5}) return {e1, e5, e1, e2bar};
  // Mirror image of the (3,5) tuple under Swap.
  if (product == std::pair{5, 3}) return {e1, e2bar, e1, e5};
  if (product == std::pair{3, 4} || product == std::pair{4, 3} || product == std::pair{4, 4})
    return {e1, e2bar, e1, e2bar};
  throw Unsupported("product state w" + std::to_string(product.first) + "⊗w" + std::to_string(product.second) +
                    " is not an admissible pentagon admixture");
}

inline MixedHardy hardy_mixed_pentagon(double epsilon, std::pair<int, int> product) {
  detail::check_weight(epsilon);
  const auto labels = pentagon_mixed_tuple(product);
  return detail::evaluate_mixed_hardy(build_model(5), phi_h(), product, epsilon, labels);
}

} // namespace polygon_gpt
