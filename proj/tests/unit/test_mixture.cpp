#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "polygon_gpt/mixture.hpp"

using namespace polygon_gpt;

namespace {

// Witness value on the Werner family, evaluated with Eigen rather than the library.
double oracle_witness(int n, double p) {
  oracle::Mat phi = oracle::Mat::Zero();
  phi(2, 2) = 1.0 - p;
  if (n % 2) {
    phi += p * oracle::Mat::Identity();
    const double bar = 1.0 - phi.trace() / (1.0 + oracle::r2(n));
    return bar;
  }
  const double c = std::cos(std::numbers::pi / n), s = std::sin(std::numbers::pi / n);
  oracle::Mat j, e;
  j << c, s, 0, -s, c, 0, 0, 0, 1;
  e << -c, -s, 0, s, -c, 0, 0, 0, 1;
  phi += p * j;
  return 0.5 * e.cwiseProduct(phi).sum();
}

} // namespace

TEST(MaximallyMixed, UniformOnRays) {
  for (int n : {4, 5, 6}) {
    const PolygonModel m = build_model(n);
    const double single = n % 2 ? 1.0 / (1.0 + oracle::r2(n)) : 0.5;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) EXPECT_NEAR(joint_prob(m.effect(i), m.effect(j), maximally_mixed()), single * single, 1e-12);
  }
  const PolygonModel p = build_model(5);
  EXPECT_NEAR(joint_prob(p.effect(1), p.effect(3), maximally_mixed()), 0.2, 1e-12);
  EXPECT_TRUE(is_valid_state(maximally_mixed(), p));
}

TEST(Werner, EndpointsAndValidity) {
  for (int n = 4; n <= 8; ++n) {
    const PolygonModel m = build_model(n);
    EXPECT_EQ(werner_state(n, 1.0), phi_j(n));
    EXPECT_EQ(werner_state(n, 0.0), maximally_mixed());
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) EXPECT_TRUE(is_valid_state(werner_state(n, p), m)) << n << " " << p;
  }
}

TEST(EntangledEffect, ValidOnProductsNegativeOnPhiJ) {
  for (int n = 4; n <= 9; ++n) {
    const PolygonModel m = build_model(n);
    const auto [e, bar] = entangled_effect(n);
    EXPECT_TRUE(is_valid_on_product_states(e, m)) << n;
    EXPECT_TRUE(is_valid_on_product_states(bar, m)) << n;
    EXPECT_LT(max_abs_diff(e.m + bar.m, maximally_mixed().m), 1e-15);
    const double on_j = std::min(joint_prob(e, phi_j(n)), joint_prob(bar, phi_j(n)));
    EXPECT_LT(on_j, -1e-3) << n;
    EXPECT_NEAR(on_j, oracle_witness(n, 1.0), 1e-12) << n;
    EXPECT_TRUE(witness_entanglement(phi_j(n), n));
    for (int i = 1; i <= n; ++i) EXPECT_FALSE(witness_entanglement(product_state(m.state(i), m.state(1)), n));
  }
  const auto [e4, bar4] = entangled_effect(4);
  EXPECT_NEAR(joint_prob(e4, phi_j(4)), -0.5, 1e-12);
}

TEST(EntangledEffect, WitnessFlipsAtPE) {
  for (int n = 4; n <= 8; ++n) {
    const double pe = n % 2 ? oracle::r2(n) / 2.0 : 0.5;
    EXPECT_FALSE(witness_entanglement(werner_state(n, pe - 0.01), n)) << n;
    EXPECT_TRUE(witness_entanglement(werner_state(n, pe + 0.01), n)) << n;
  }
}

TEST(NoiseThresholds, PentagonValues) {
  const ThresholdReport r = noise_thresholds(5);
  EXPECT_EQ(r.n, 5);
  EXPECT_NEAR(r.p_e, (std::sqrt(5.0) - 1.0) / 2.0, 1e-12);
  EXPECT_NEAR(r.p_e, 0.618034, 1e-6);
  EXPECT_NEAR(r.b_max, 2.68328, 1e-5);
  EXPECT_NEAR(r.p_nl, 0.747454, 1e-6);
  EXPECT_NEAR(r.p_nl_formula, 0.734, 1e-3);
  EXPECT_TRUE(r.gap_exists);
}

TEST(NoiseThresholds, AgreeWithBisectionOracles) {
  for (int n = 4; n <= 8; ++n) {
    const PolygonModel m = build_model(n);
    const ThresholdReport r = noise_thresholds(n, 2);
    const double pe = oracle::bisect([&](double p) { return oracle_witness(n, p) < 0.0; }, 0.0, 1.0);
    const double pnl = oracle::bisect([&](double p) { return chsh_max(werner_state(n, p), m).value > 2.0; }, 0.0, 1.0);
    EXPECT_NEAR(r.p_e, pe, 1e-6) << n;
    EXPECT_NEAR(r.p_nl, pnl, 1e-6) << n;
    EXPECT_EQ(r.gap_exists, n != 4) << n;
    EXPECT_LE(r.p_e, r.p_nl + 1e-9) << n;
    if (n % 2 == 0) {
      EXPECT_NEAR(r.p_nl_formula, 2.0 / r.b_max, 1e-12);
    }
  }
}

TEST(NoiseThresholds, SquareHasNoGap) {
  const ThresholdReport r = noise_thresholds(4);
  EXPECT_NEAR(r.b_max, 4.0, 1e-9);
  EXPECT_NEAR(r.p_e, 0.5, 1e-12);
  EXPECT_NEAR(r.p_nl, 0.5, 1e-9);
  EXPECT_FALSE(r.gap_exists);
}

TEST(NoiseThresholds, RejectsNonPositiveBound) {
  const PolygonModel m = build_model(5);
  EXPECT_THROW(noise_thresholds(m, 0.0), InvalidParameter);
  EXPECT_THROW(noise_thresholds(m, -1.0), InvalidParameter);
  EXPECT_THROW(noise_thresholds(m, std::numeric_limits<double>::quiet_NaN()), InvalidParameter);
}

TEST(ChshCrossing, LocalNoiseAloneCrossesAtZero) {
  const PolygonModel m = build_model(4);
  EXPECT_NEAR(*chsh_crossing(phi_j(4), phi_j(4), m), 0.0, 1e-12);
  EXPECT_FALSE(chsh_crossing(maximally_mixed(), maximally_mixed(), m));
}

TEST(HardyMixedEven, SuccessScalesWithWeight) {
  for (int n : {4, 6, 8}) {
    const double full = std::pow(std::sin(std::numbers::pi / n), 2);
    const PolygonModel m = build_model(n);
    for (double eps : {0.1, 0.5, 1.0}) {
      const MixedHardy h = hardy_mixed_even(n, eps);
      EXPECT_NEAR(h.witness.success, eps * full, 1e-9) << n << " " << eps;
      for (double r : h.witness.residuals) EXPECT_LE(r, kHardyTolerance);
      EXPECT_TRUE(is_valid_state(h.state.mixed(), m));
      EXPECT_EQ(h.state.weight, eps);
      EXPECT_LT(no_signaling_violation(h.behaviour), 1e-12);
    }
  }
}

TEST(HardyMixedEven, HexagonHalfWeight) {
  const MixedHardy h = hardy_mixed_even(6, 0.5);
  EXPECT_NEAR(h.witness.success, 0.125, 1e-12);
  EXPECT_EQ(h.product, (std::pair{1, 2}));
}

TEST(HardyMixedEven, Errors) {
  EXPECT_THROW(hardy_mixed_even(5, 0.5), Unsupported);
  EXPECT_THROW(hardy_mixed_even(4, 0.0), InvalidParameter);
  EXPECT_THROW(hardy_mixed_even(4, 1.5), InvalidParameter);
  EXPECT_THROW(hardy_mixed_even(4, std::numeric_limits<double>::quiet_NaN()), InvalidParameter);
}

TEST(HardyMixedPentagon, AllAdmissibleProducts) {
  const double unit = 1 - 4 * std::sqrt(5.0) / 10;
  const PolygonModel m = build_model(5);
  EXPECT_EQ(pentagon_product_choices().size(), 5U);
  for (const auto &prod : pentagon_product_choices())
    for (double eps : {0.1, 0.5, 1.0}) {
      const MixedHardy h = hardy_mixed_pentagon(eps, prod);
      EXPECT_NEAR(h.witness.success, eps * unit, 1e-12);
      EXPECT_TRUE(is_valid_state(h.state.mixed(), m));
      EXPECT_EQ(h.product, prod);
    }
  EXPECT_NEAR(hardy_mixed_pentagon(0.5, {5, 3}).witness.success, 0.0527864, 1e-7);
}

TEST(HardyMixedPentagon, BehaviourIsAffineInWeight) {
  for (const auto &prod : pentagon_product_choices()) {
    const Behaviour lo = hardy_mixed_pentagon(0.2, prod).behaviour, hi = hardy_mixed_pentagon(0.8, prod).behaviour;
    const Behaviour mid = hardy_mixed_pentagon(0.5, prod).behaviour;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(mid.p[r][c], 0.5 * (lo.p[r][c] + hi.p[r][c]), 1e-12);
  }
}

TEST(HardyMixedPentagon, SwapMirrorsTuple) {
  const auto a = pentagon_mixed_tuple({3, 5}), b = pentagon_mixed_tuple({5, 3});
  EXPECT_EQ(a[0], b[2]);
  EXPECT_EQ(a[1], b[3]);
  EXPECT_EQ(a[2], b[0]);
  EXPECT_EQ(a[3], b[1]);
}

TEST(HardyMixedPentagon, Errors) {
  EXPECT_THROW(hardy_mixed_pentagon(0.5, {1, 1}), Unsupported);
  EXPECT_THROW(hardy_mixed_pentagon(0.5, {2, 5}), Unsupported);
  EXPECT_THROW(hardy_mixed_pentagon(0.0, {3, 4}), InvalidParameter);
  EXPECT_THROW(hardy_mixed_pentagon(-0.1, {3, 4}), InvalidParameter);
}
