#pragma once

// Two-party, two-setting, two-outcome behaviours obtained from bipartite polygon states, and
// exhaustive Hardy / CHSH searches over the extremal dichotomic measurements {e_i, ē_i}.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "polygon_gpt/composite.hpp"
#include "polygon_gpt/parallel.hpp"
#include "polygon_gpt/polygon.hpp"

namespace polygon_gpt {

inline constexpr double kHardyTolerance = 1e-9;
inline constexpr double kTieTolerance = 1e-9;

/// Which extreme effect carries the "+" outcome: e_index, or its complement when `flipped`.
struct MeasurementLabel {
  int index = 1;
  bool flipped = false;

  friend auto operator<=>(const MeasurementLabel &, const MeasurementLabel &) = default;
};

/// Human-readable label, e.g. "{e1,ebar1}" (odd n) or "{e1,e4}" (even n, where ē_i = e_{i+n/2}).
inline std::string to_string(const MeasurementLabel &l, int n) {
  auto name = [n](int i, bool bar) {
    if (!bar) return "e" + std::to_string(i);
    if (n % 2 == 0) return "e" + std::to_string(wrap_index(i + n / 2, n));
    return "ebar" + std::to_string(i);
  };
  return "{" + name(l.index, l.flipped) + "," + name(l.index, !l.flipped) + "}";
}

struct DichotomicMeasurement {
  Vec3 plus;
  Vec3 minus;
  MeasurementLabel label;
};

inline DichotomicMeasurement measurement(const PolygonModel &model, int index, bool flipped = false) {
  const Vec3 &e = model.effect(index);
  const Vec3 bar = model.complement_effect(index);
  return flipped ? DichotomicMeasurement{bar, e, {wrap_index(index, model.n), true}}
                 : DichotomicMeasurement{e, bar, {wrap_index(index, model.n), false}};
}

/// Even-gon measurement written as {e_plus, e_minus}; requires e_plus + e_minus = u.
inline DichotomicMeasurement measurement_from_pair(const PolygonModel &model, int plus, int minus) {
  if (model.parity != Parity::even || wrap_index(plus + model.n / 2, model.n) != wrap_index(minus, model.n))
    throw InvalidParameter("{e" + std::to_string(plus) + ",e" + std::to_string(minus) +
                           "} is not a dichotomic measurement of the " + std::to_string(model.n) + "-gon");
  return measurement(model, plus, false);
}

/// {(e_i, ē_i), (ē_i, e_i)} for i = 1..n, in that interleaved order (2n entries).
inline std::vector<DichotomicMeasurement> measurement_set(const PolygonModel &model) {
  std::vector<DichotomicMeasurement> out;
  out.reserve(2 * static_cast<std::size_t>(model.n));
  for (int i = 1; i <= model.n; ++i) {
    out.push_back(measurement(model, i, false));
    out.push_back(measurement(model, i, true));
  }
  return out;
}

/// p(a,b|x,y): rows M1N1, M1N2, M2N1, M2N2; columns (+,+), (+,-), (-,+), (-,-).
struct Behaviour {
  std::array<std::array<double, 4>, 4> p{};
  std::array<MeasurementLabel, 4> labels{}; ///< M1, M2, N1, N2

  static constexpr std::size_t row(int x, int y) { return static_cast<std::size_t>(2 * (x - 1) + (y - 1)); }
  double operator()(int x, int y, int a, int b) const {
    return p[row(x, y)][static_cast<std::size_t>((a > 0 ? 0 : 2) + (b > 0 ? 0 : 1))];
  }
};

inline Behaviour behaviour(const BipartiteState &phi, const DichotomicMeasurement &m1, const DichotomicMeasurement &m2,
                           const DichotomicMeasurement &n1, const DichotomicMeasurement &n2) {
  Behaviour b;
  b.labels = {m1.label, m2.label, n1.label, n2.label};
  const std::array<const DichotomicMeasurement *, 2> alice{&m1, &m2}, bob{&n1, &n2};
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) {
      const auto &ma = *alice[static_cast<std::size_t>(x - 1)];
      const auto &nb = *bob[static_cast<std::size_t>(y - 1)];
      b.p[Behaviour::row(x, y)] = {joint_prob(ma.plus, nb.plus, phi), joint_prob(ma.plus, nb.minus, phi),
                                   joint_prob(ma.minus, nb.plus, phi), joint_prob(ma.minus, nb.minus, phi)};
    }
  return b;
}

/// Largest deviation from no-signaling and block normalization.
inline double no_signaling_violation(const Behaviour &b) {
  double worst = 0.0;
  for (const auto &blk : b.p) worst = std::max(worst, std::abs(blk[0] + blk[1] + blk[2] + blk[3] - 1.0));
  for (int x = 1; x <= 2; ++x) {
    const auto &y1 = b.p[Behaviour::row(x, 1)], &y2 = b.p[Behaviour::row(x, 2)];
    worst = std::max(worst, std::abs((y1[0] + y1[1]) - (y2[0] + y2[1])));
  }
  for (int y = 1; y <= 2; ++y) {
    const auto &x1 = b.p[Behaviour::row(1, y)], &x2 = b.p[Behaviour::row(2, y)];
    worst = std::max(worst, std::abs((x1[0] + x1[2]) - (x2[0] + x2[2])));
  }
  return worst;
}

/// The three Hardy zero cells: p(+,+|M1N2), p(+,+|M2N1), p(-,-|M2N2).
inline std::array<double, 3> hardy_residuals(const Behaviour &b) {
  return {b(1, 2, 1, 1), b(2, 1, 1, 1), b(2, 2, -1, -1)};
}

/// Success p(+,+|M1N1) when all three zero cells vanish and the success is strictly positive.
inline std::optional<double> hardy_check(const Behaviour &b, double tol = kHardyTolerance) {
  for (double r : hardy_residuals(b))
    if (r > tol) return std::nullopt;
  const double success = b(1, 1, 1, 1);
  if (success <= tol) return std::nullopt;
  return success;
}

struct HardyWitness {
  std::array<MeasurementLabel, 4> labels{}; ///< M1, M2, N1, N2
  double success = 0.0;
  std::array<double, 3> residuals{};
};

struct HardyScan {
  std::optional<HardyWitness> best;
  std::vector<HardyWitness> ties; ///< every witness within kTieTolerance of the best, sorted by labels
  /// Largest p(+,+|M1N1) over tuples meeting the three zero constraints, positive or not.
  double max_constrained_success = -1.0;
};

namespace detail {

/// Joint probabilities of every (Alice effect, Bob effect) pair with effects indexed as
/// e_1..e_n, ē_1..ē_n, plus the index pair each measurement uses.
struct ProbabilityTable {
  std::vector<DichotomicMeasurement> measurements;
  std::vector<std::array<std::size_t, 2>> effect_of; ///< (plus, minus) effect ids per measurement
  std::vector<std::vector<double>> p;

  ProbabilityTable(const BipartiteState &phi, const PolygonModel &model) : measurements(measurement_set(model)) {
    std::vector<Vec3> effects = model.ray_effects;
    effects.insert(effects.end(), model.complement_effects.begin(), model.complement_effects.end());
    p.assign(effects.size(), std::vector<double>(effects.size()));
    for (std::size_t a = 0; a < effects.size(); ++a)
      for (std::size_t b = 0; b < effects.size(); ++b) p[a][b] = joint_prob(effects[a], effects[b], phi);
    const auto n = static_cast<std::size_t>(model.n);
    for (const auto &m : measurements) {
      const std::size_t e = static_cast<std::size_t>(m.label.index - 1), bar = n + e;
      effect_of.push_back(m.label.flipped ? std::array<std::size_t, 2>{bar, e} : std::array<std::size_t, 2>{e, bar});
    }
  }
  double correlator(std::size_t ma, std::size_t nb) const {
    const auto &a = effect_of[ma], &b = effect_of[nb];
    return p[a[0]][b[0]] - p[a[0]][b[1]] - p[a[1]][b[0]] + p[a[1]][b[1]];
  }
};

} // namespace detail

/// Exhaustive Hardy search over all ordered (M1, M2, N1, N2) drawn from `measurement_set`.
inline HardyScan hardy_scan(const BipartiteState &phi, const PolygonModel &model, unsigned workers = 1) {
  const detail::ProbabilityTable table(phi, model);
  const std::size_t m = table.measurements.size();

  std::vector<HardyScan> partial(m);
  parallel_for(m, workers, [&](std::size_t i1) {
    HardyScan &local = partial[i1];
    const std::size_t a1 = table.effect_of[i1][0];
    for (std::size_t i2 = 0; i2 < m; ++i2)
      for (std::size_t j1 = 0; j1 < m; ++j1)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          const auto a2 = table.effect_of[i2], b1 = table.effect_of[j1], b2 = table.effect_of[j2];
          const std::array<double, 3> res{table.p[a1][b2[0]], table.p[a2[0]][b1[0]], table.p[a2[1]][b2[1]]};
          if (res[0] > kHardyTolerance || res[1] > kHardyTolerance || res[2] > kHardyTolerance) continue;
          const double success = table.p[a1][b1[0]];
          local.max_constrained_success = std::max(local.max_constrained_success, success);
          if (success <= kHardyTolerance) continue;
          HardyWitness w{{table.measurements[i1].label, table.measurements[i2].label, table.measurements[j1].label,
                          table.measurements[j2].label},
                         success,
                         res};
          if (!local.best || success > local.best->success + kTieTolerance) {
            local.best = w;
            local.ties.clear();
            local.ties.push_back(w);
          } else if (success > local.best->success - kTieTolerance) {
            if (success > local.best->success) local.best = w;
            local.ties.push_back(w);
          }
        }
  });

  HardyScan out;
  for (const auto &part : partial) {
    out.max_constrained_success = std::max(out.max_constrained_success, part.max_constrained_success);
    if (part.best && (!out.best || part.best->success > out.best->success)) out.best = part.best;
  }
  if (!out.best) return out;
  for (const auto &part : partial)
    for (const auto &w : part.ties)
      if (w.success > out.best->success - kTieTolerance) out.ties.push_back(w);
  std::sort(out.ties.begin(), out.ties.end(),
            [](const HardyWitness &a, const HardyWitness &b) { return a.labels < b.labels; });
  out.best = out.ties.front();
  return out;
}

/// ⟨xy⟩ = Σ ab p(a,b|x,y)
inline double correlator(const Behaviour &b, int x, int y) {
  const auto &blk = b.p[Behaviour::row(x, y)];
  return blk[0] - blk[1] - blk[2] + blk[3];
}

/// ⟨11⟩ + ⟨12⟩ + ⟨21⟩ - ⟨22⟩
inline double chsh_value(const Behaviour &b) {
  return correlator(b, 1, 1) + correlator(b, 1, 2) + correlator(b, 2, 1) - correlator(b, 2, 2);
}

struct ChshResult {
  double value = 0.0;  ///< max |CHSH|
  double signed_value = 0.0;
  std::array<MeasurementLabel, 4> labels{};
};

/// Maximum |CHSH| over all ordered measurement 4-tuples; the first maximizer in scan order is reported.
inline ChshResult chsh_max(const BipartiteState &phi, const PolygonModel &model, unsigned workers = 1) {
  const detail::ProbabilityTable table(phi, model);
  const std::size_t m = table.measurements.size();
  std::vector<std::vector<double>> corr(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) corr[i][j] = table.correlator(i, j);

  std::vector<ChshResult> partial(m);
  std::vector<char> any(m, 0);
  parallel_for(m, workers, [&](std::size_t i1) {
    ChshResult best;
    bool found = false;
    for (std::size_t i2 = 0; i2 < m; ++i2)
      for (std::size_t j1 = 0; j1 < m; ++j1)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          const double v = corr[i1][j1] + corr[i1][j2] + corr[i2][j1] - corr[i2][j2];
          if (!found || std::abs(v) > best.value) {
            found = true;
            best = {std::abs(v), v,
                    {table.measurements[i1].label, table.measurements[i2].label, table.measurements[j1].label,
                     table.measurements[j2].label}};
          }
        }
    partial[i1] = best;
    any[i1] = found ? 1 : 0;
  });
  ChshResult out;
  bool found = false;
  for (std::size_t i = 0; i < m; ++i)
    if (any[i] && (!found || partial[i].value > out.value)) {
      out = partial[i];
      found = true;
    }
  return out;
}

struct QuantumReference {
  double hardy_quantum_max = 0.0;
  double tsirelson = 0.0;
};

inline QuantumReference quantum_reference_constants() {
  return {(5.0 * std::sqrt(5.0) - 11.0) / 2.0, 2.0 * std::sqrt(2.0)};
}

/// Hardy success beyond the optimal quantum value.
inline bool is_post_quantum(double hardy_success) {
  return hardy_success > quantum_reference_constants().hardy_quantum_max + kHardyTolerance;
}

} // namespace polygon_gpt
