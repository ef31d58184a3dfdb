#include <gtest/gtest.h>

#include <random>

#include "cdmkit/stability.hpp"
#include "oracles.hpp"
#include "reference_data.hpp"

namespace {

using namespace cdmkit;

const std::vector<double> kStdGamma{2.5, 2, 2, 2, 2};

TEST(StabilityIndices, Quadratic) {
  const auto p = stability_indices(Polynomial({1, 2, 1}));
  EXPECT_DOUBLE_EQ(*p.gamma_at(1), 4.0);
  EXPECT_DOUBLE_EQ(p.tau, 2.0);
  EXPECT_DOUBLE_EQ(*p.tau_at(1), 0.5);
  // Both neighbours are the infinite end indices.
  EXPECT_DOUBLE_EQ(*p.gamma_star_at(1), 0.0);
}

TEST(StabilityIndices, StandardFormSixthOrder) {
  const auto p = stability_indices(Polynomial({1562.5, 3125, 2500, 1000, 200, 20, 1}));
  EXPECT_DOUBLE_EQ(p.tau, 2.0);
  ASSERT_EQ(p.gamma.size(), 5u);
  for (int i = 1; i <= 5; ++i) EXPECT_NEAR(*p.gamma_at(i), kStdGamma[static_cast<std::size_t>(i - 1)], 1e-12);
  EXPECT_NEAR(*p.gamma_star_at(1), 0.5, 1e-12);
  EXPECT_NEAR(*p.gamma_star_at(2), 1.0 / 2 + 1.0 / 2.5, 1e-12);
  EXPECT_NEAR(*p.gamma_star_at(5), 0.5, 1e-12);
}

TEST(StabilityIndices, LongitudinalHoverTimeConstant) {
  const auto p = stability_indices(Polynomial(reference::kLongVerDen));
  EXPECT_NEAR(p.tau, 11.0203 / 0.9581, 1e-12);
  EXPECT_NEAR(p.tau, 11.502, 1e-3);
}

TEST(StabilityIndices, Preconditions) {
  EXPECT_THROW(stability_indices(Polynomial({1, 1})), std::invalid_argument);
  EXPECT_THROW(stability_indices(Polynomial::constant(5)), std::invalid_argument);
  EXPECT_THROW(stability_indices(Polynomial({0, 1, 1})), std::invalid_argument);
}

TEST(StabilityIndices, ZeroInteriorCoefficientIsUndefined) {
  const auto p = stability_indices(Polynomial({1, 2, 0, 1, 1}));
  EXPECT_FALSE(p.gamma_at(1).has_value());
  EXPECT_FALSE(p.gamma_at(3).has_value());
  EXPECT_TRUE(p.gamma_at(2).has_value());
  EXPECT_DOUBLE_EQ(*p.gamma_at(2), 0.0);
  EXPECT_EQ(p.undefined_indices(), (std::vector<int>{1, 3}));
}

TEST(SynthTarget, Examples) {
  EXPECT_EQ(synth_target(6, 2.0, kStdGamma, 1562.5), Polynomial({1562.5, 3125, 2500, 1000, 200, 20, 1}));
  const Polynomial q = synth_target(2, 1.0, {2.0}, 1.0);
  EXPECT_EQ(q, Polynomial({1, 1, 0.5}));
  const Polynomial lon = synth_target(6, 1.5, kStdGamma, 8779.149);
  EXPECT_NEAR(lon[0], 8779.149, 1e-9);
  EXPECT_NEAR(lon[6], 1.0, 1e-6);
}

TEST(SynthTarget, MatchesProductOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> g(1.2, 4.0), t(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 6;
    std::vector<double> gamma(static_cast<std::size_t>(n - 1));
    for (double& x : gamma) x = g(rng);
    const double tau = t(rng);
    const auto want = oracle::target_by_product(n, tau, gamma, 3.0);
    const Polynomial got = synth_target(n, tau, gamma, 3.0);
    for (int i = 0; i <= n; ++i) EXPECT_LE(oracle::rel_err(got[i], want[static_cast<std::size_t>(i)]), 1e-12);
  }
}

TEST(SynthTarget, RejectsBadInputs) {
  EXPECT_THROW(synth_target(1, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(synth_target(3, 0.0, {2, 2}), std::invalid_argument);
  EXPECT_THROW(synth_target(3, 1.0, {2, -1}), std::invalid_argument);
  EXPECT_THROW(synth_target(3, 1.0, {2}), std::invalid_argument);
  EXPECT_THROW(synth_target(3, 1.0, {2, 2}, 0.0), std::invalid_argument);
}

TEST(StandardGammas, Shape) {
  EXPECT_EQ(standard_gammas(6), kStdGamma);
  EXPECT_EQ(standard_gammas(2), std::vector<double>{2.5});
}

TEST(CheckStability, Examples) {
  const auto v = check_stability(synth_target(6, 2.0, kStdGamma, 1562.5));
  EXPECT_TRUE(v.stable_applicable);
  EXPECT_TRUE(v.sufficiently_stable);
  EXPECT_FALSE(v.sufficiently_unstable);
  ASSERT_EQ(v.margins.size(), 3u);
  EXPECT_NEAR(*v.margins[1], 2.0 - 1.12 * 1.0, 1e-12);

  const auto u = check_stability(Polynomial({1, 1, 1, 1}));
  EXPECT_TRUE(u.unstable_applicable);
  EXPECT_TRUE(u.sufficiently_unstable);
  EXPECT_FALSE(u.stable_applicable);

  EXPECT_FALSE(check_stability(Polynomial(reference::kLatDirDen)).sufficiently_stable);
}

TEST(CheckStability, LowDegreeIsNotApplicable) {
  const auto v = check_stability(Polynomial({1, 2, 1}));
  EXPECT_FALSE(v.stable_applicable);
  EXPECT_FALSE(v.unstable_applicable);
  EXPECT_FALSE(v.sufficiently_stable);
  EXPECT_FALSE(v.sufficiently_unstable);
}

TEST(CoefficientDiagram, Series) {
  const auto d = coefficient_diagram({{"D", Polynomial({0.9, 11.02, 41.4, 321.7, 31.65, 1})}});
  ASSERT_EQ(d.size(), 1u);
  ASSERT_EQ(d[0].points.size(), 6u);
  EXPECT_DOUBLE_EQ(d[0].points[3].coefficient, 321.7);
  EXPECT_EQ(d[0].points[3].sign, 1);
  EXPECT_TRUE(d[0].profile.has_value());

  const auto one = coefficient_diagram({{"one", Polynomial::constant(1.0)}});
  ASSERT_EQ(one[0].points.size(), 1u);
  EXPECT_EQ(one[0].points[0].index, 0);
  EXPECT_DOUBLE_EQ(one[0].points[0].coefficient, 1.0);
  EXPECT_FALSE(one[0].profile.has_value());

  const auto lat = coefficient_diagram({{"lat", Polynomial(reference::kLatDirDen)}});
  EXPECT_EQ(lat[0].points[1].sign, -1);
  EXPECT_DOUBLE_EQ(lat[0].points[1].abs_coefficient, 17.8504);

  EXPECT_THROW(coefficient_diagram({}), std::invalid_argument);
}

TEST(CoefficientDiagram, SpeedTargetRisesThenFalls) {
  const auto d = coefficient_diagram({{"P", Polynomial(reference::kSpeedTarget)}});
  const auto& pts = d[0].points;
  ASSERT_EQ(pts.size(), 7u);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].coefficient > pts[peak].coefficient) peak = i;
  }
  for (std::size_t i = 0; i < peak; ++i) EXPECT_LT(pts[i].coefficient, pts[i + 1].coefficient);
  for (std::size_t i = peak; i + 1 < pts.size(); ++i) EXPECT_GT(pts[i].coefficient, pts[i + 1].coefficient);
}

TEST(StabilityProperty, TargetRoundTrip) {
  std::mt19937_64 rng(200);
  std::uniform_real_distribution<double> g(1.2, 4.0), t(0.1, 10.0), a(0.1, 1e4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    std::vector<double> gamma(static_cast<std::size_t>(n - 1));
    for (double& x : gamma) x = g(rng);
    const double tau = t(rng);
    const auto prof = stability_indices(synth_target(n, tau, gamma, a(rng)));
    EXPECT_LE(oracle::rel_err(prof.tau, tau), 1e-10);
    for (int i = 1; i < n; ++i) {
      EXPECT_LE(oracle::rel_err(*prof.gamma_at(i), gamma[static_cast<std::size_t>(i - 1)]), 1e-10);
    }
    // tau_i / tau_{i-1} = 1 / gamma_i
    for (int i = 2; i < n; ++i) {
      EXPECT_LE(oracle::rel_err(*prof.tau_at(i) / *prof.tau_at(i - 1), 1.0 / *prof.gamma_at(i)), 1e-10);
    }
  }
}

TEST(StabilityProperty, ScaleInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0), c(-100.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> coeffs(3 + rng() % 6);
    for (double& x : coeffs) x = u(rng);
    const Polynomial p(coeffs);
    double k = c(rng);
    if (k == 0.0) k = 1.0;
    const auto a = stability_indices(p);
    const auto b = stability_indices(scale(p, k));
    EXPECT_LE(oracle::rel_err(a.tau, b.tau), 1e-15);
    for (std::size_t i = 0; i < a.gamma.size(); ++i) {
      EXPECT_LE(oracle::rel_err(*a.gamma[i], *b.gamma[i]), 1e-15);
      EXPECT_LE(oracle::rel_err(*a.gamma_star[i], *b.gamma_star[i]), 1e-15);
    }
  }
}

TEST(StabilityProperty, StandardFormAlwaysPasses) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> t(0.1, 10.0), a(0.1, 1e4);
  for (int n = 4; n <= 12; ++n) {
    for (int k = 0; k < 5; ++k) {
      EXPECT_TRUE(check_stability(synth_target(n, t(rng), standard_gammas(n), a(rng))).sufficiently_stable);
    }
  }
}

TEST(StabilityProperty, PositiveCoefficientsGivePositiveGammas) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> coeffs(3 + rng() % 6);
    for (double& x : coeffs) x = u(rng);
    for (const auto& g : stability_indices(Polynomial(coeffs)).gamma) EXPECT_GT(*g, 0.0);
  }
}

}  // namespace
