#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "cdmkit/errors.hpp"
#include "cdmkit/squared.hpp"
#include "cdmkit/stability.hpp"
#include "oracles.hpp"
#include "reference_data.hpp"

namespace {

using namespace cdmkit;

TEST(SquarePoly, Examples) {
  EXPECT_EQ(square_poly(Polynomial({1, 1})).in_omega(), Polynomial({1, 1}));
  const auto lon = square_poly(Polynomial(reference::kLongVerDen));
  const auto lat = square_poly(Polynomial(reference::kLatDirDen));
  for (int i = 0; i <= 5; ++i) {
    EXPECT_LE(oracle::rel_err(lon[i], reference::kLongVerDenSq[static_cast<std::size_t>(i)]), 1e-3) << i;
    EXPECT_LE(oracle::rel_err(lat[i], reference::kLatDirDenSq[static_cast<std::size_t>(i)]), 1e-3) << i;
  }
  EXPECT_EQ(square_poly(synth_target(6, 2.0, {2.5, 2, 2, 2, 2}, 1562.5)).in_omega(),
            Polynomial(reference::kLatDirTargetSq));
}

TEST(SquarePoly, MatchesConvolutionOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(1 + rng() % 10);
    for (double& x : c) x = u(rng);
    c.back() = 1.0;
    const auto want = oracle::squared_by_convolution(c);
    const auto got = square_poly(Polynomial(c));
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_NEAR(got[static_cast<int>(i)], want[i], 1e-12 * std::max(1.0, std::abs(want[i])));
    }
  }
}

TEST(SquaredProperty, EvaluationIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> c(2 + rng() % 7);
    for (double& x : c) x = u(rng);
    const Polynomial p(c);
    const SquaredPolynomial pp = square_poly(p);
    EXPECT_EQ(pp.degree(), p.degree());
    EXPECT_EQ(pp[pp.degree()], p.leading() * p.leading());
    EXPECT_EQ(pp[0], p[0] * p[0]);
    for (int k = 0; k < 20; ++k) {
      const Complex z(u(rng), u(rng));
      const Complex want = p.eval(-z) * p.eval(z);
      EXPECT_LE(std::abs(pp.eval_s(z) - want), 1e-8 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(SquaredProperty, StandardFormHasNoSecondHighestTerm) {
  for (double tau : {0.3, 1.0, 1.5, 2.0, 7.0}) {
    for (int n = 3; n <= 9; ++n) {
      Polynomial p = synth_target(n, tau, standard_gammas(n));
      p = scale(p, 1.0 / p.leading());
      const auto pp = square_poly(p);
      EXPECT_NEAR(pp[n - 1], 0.0, 1e-10 * std::abs(pp[n - 2])) << "n=" << n << " tau=" << tau;
    }
  }
}

TEST(SquareRoot, Examples) {
  EXPECT_LE(max_relative_coefficient_error(square_root_poly(SquaredPolynomial{1, 1}), Polynomial({1, 1})), 1e-12);
  const Polynomial lat = square_root_poly(SquaredPolynomial(Polynomial(reference::kLatDirTargetSq)));
  const auto prof = stability_indices(lat);
  EXPECT_NEAR(prof.tau, 2.0, 1e-8);
  const std::vector<double> g{2.5, 2, 2, 2, 2};
  for (int i = 1; i <= 5; ++i) EXPECT_NEAR(*prof.gamma_at(i), g[static_cast<std::size_t>(i - 1)], 1e-7);
  EXPECT_NEAR(lat[0], 1562.5, 1e-6);
}

TEST(SquareRoot, Errors) {
  // Omega = 1 root: s = +-i.
  EXPECT_THROW(square_root_poly(SquaredPolynomial{-1, 1}), DomainError);
  EXPECT_THROW(square_root_poly(SquaredPolynomial{0, 1}), DomainError);
  EXPECT_THROW(square_root_poly(SquaredPolynomial{1, -1}), std::invalid_argument);
}

TEST(SquareRootProperty, RoundTrip) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int degree = 1 + trial % 8;
    const Polynomial p(oracle::random_stable_poly(rng, degree));
    const Polynomial back = square_root_poly(square_poly(p));
    EXPECT_LE(max_relative_coefficient_error(back, p), 1e-6) << "trial " << trial;
    for (const Complex r : roots(back)) EXPECT_LT(r.real(), 0.0);
  }
}

TEST(AugmentIntegrator, Examples) {
  PlantTF p;
  p.den = Polynomial({1, 1});
  p.nums["y"] = Polynomial::constant(2.0);
  EXPECT_EQ(augment_integrator(p, 0).den, p.den);
  EXPECT_EQ(augment_integrator(p, 1).den, Polynomial({0, 1, 1}));
  EXPECT_EQ(augment_integrator(p, 1).nums, p.nums);
  PlantTF lon;
  lon.den = Polynomial(reference::kLongVerDen);
  const auto a = augment_integrator(lon, 1).den;
  EXPECT_EQ(a.degree(), 6);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 0.9581);
  EXPECT_THROW(augment_integrator(p, -1), std::invalid_argument);
}

TEST(RecoverWeights, TrivialPlant) {
  const auto f = recover_weights(SquaredPolynomial{1, 1}, SquaredPolynomial{1}, SquaredPolynomial{1}, 1, 0);
  EXPECT_EQ(f.qu.size(), 2u);
  EXPECT_NEAR(f.qu[0], 1.0, 1e-14);
  EXPECT_NEAR(f.qu[1], 1.0, 1e-14);
  EXPECT_TRUE(f.qy.empty());
  EXPECT_FALSE(f.q_indefinite);
}

TEST(RecoverWeights, ForwardBackward) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> w(0.1, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int np = 1 + trial % 5;
    const int nc = trial % 3;
    const Polynomial den(oracle::random_stable_poly(rng, np));
    const SquaredPolynomial aa = square_poly(den);
    const SquaredPolynomial bb = square_poly(Polynomial::constant(w(rng)));
    std::vector<double> qu(static_cast<std::size_t>(nc) + 1), qy(static_cast<std::size_t>(np));
    for (double& x : qu) x = w(rng);
    for (double& x : qy) x = w(rng);
    const Polynomial pp = Polynomial(qu) * aa.in_omega() + Polynomial(qy) * bb.in_omega();
    const auto f = recover_weights(SquaredPolynomial(pp), aa, bb, nc, np);
    for (std::size_t i = 0; i < qu.size(); ++i) EXPECT_LE(oracle::rel_err(f.qu[i], qu[i]), 1e-9);
    for (std::size_t i = 0; i < qy.size(); ++i) EXPECT_LE(oracle::rel_err(f.qy[i], qy[i]), 1e-9);
    EXPECT_FALSE(f.q_indefinite);
    EXPECT_TRUE(f.warnings.empty());
  }
}

TEST(RecoverWeights, LongitudinalHover) {
  const SquaredPolynomial pp(Polynomial(reference::kLongVerTargetSq));
  const SquaredPolynomial aa(Polynomial(reference::kLongVerDenSq));
  const auto f = recover_weights(pp, aa, SquaredPolynomial{1}, 1, 5);
  EXPECT_EQ(f.nc, 1);
  EXPECT_EQ(f.np, 5);
  EXPECT_LE(f.residual, 1e-9);
  EXPECT_LT(f.qu[0], 0.0);
  EXPECT_TRUE(f.q_indefinite);
  EXPECT_FALSE(f.warnings.empty());
  // The constant row fixes qy0 once qu0 is known.
  EXPECT_NEAR(f.qy[0], reference::kLongVerTargetSq[0] - f.qu[0] * reference::kLongVerDenSq[0], 1e-3);
  for (int i = 0; i < 10; ++i) {
    const double om = -4.0 + 0.9 * i;
    const double lhs = pp.eval_omega(om).real();
    const double rhs = Polynomial(f.qu).eval(om) * aa.eval_omega(om).real() + Polynomial(f.qy).eval(om);
    EXPECT_LE(std::abs(lhs - rhs), 1e-6 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(RecoverWeights, Errors) {
  EXPECT_THROW(recover_weights(SquaredPolynomial{1, 1}, SquaredPolynomial{1}, SquaredPolynomial{1}, 1, 1),
               std::invalid_argument);
  // Numerator and denominator with identical Omega structure: rank deficient.
  EXPECT_THROW(recover_weights(SquaredPolynomial{2, 1}, SquaredPolynomial{1, 1}, SquaredPolynomial{1, 1}, 0, 1),
               DomainError);
  // Overdetermined matching with no exact solution.
  EXPECT_THROW(recover_weights(SquaredPolynomial{1, 0, 1}, SquaredPolynomial{1, 1, 1}, SquaredPolynomial{0, 0, 1}, 1, 1),
               DomainError);
}

TEST(AssembleQ, Bookkeeping) {
  HoverFormulation f;
  f.nc = 1;
  f.np = 2;
  f.qu = {1.0, 7.0};  // qu_1 is R and stays out of Q
  f.qy = {2.0, 3.0};
  const Eigen::MatrixXd q = assemble_Q(f);
  ASSERT_EQ(q.rows(), 3);
  EXPECT_EQ(Eigen::VectorXd(q.diagonal()), Eigen::Vector3d(1.0, 3.0, 2.0));
  EXPECT_EQ((q - Eigen::MatrixXd(q.diagonal().asDiagonal())).norm(), 0.0);

  f.qy = {0.0, 0.0};
  EXPECT_EQ(assemble_Q(f).bottomRightCorner(2, 2).norm(), 0.0);
  f.qy = {1.0};
  EXPECT_THROW(assemble_Q(f), std::invalid_argument);
}

TEST(HoverDesign, DimensionsAndStateOrdering) {
  const Polynomial den(reference::kLongVerDen);
  const auto d = hover_design(den, 1.0, 1, synth_target(6, 1.5, {2.5, 2, 2, 2, 2}, 8779.149));
  EXPECT_EQ(d.Q.rows(), 6);
  EXPECT_EQ(d.system.states(), 6);
  EXPECT_EQ(d.system.state_labels.front(), "u0");
  EXPECT_EQ(d.system.state_labels.back(), "y0");
  EXPECT_NEAR(d.R(0, 0), 1.0, 1e-6);
  // Open-loop characteristic polynomial of the augmented chain is s * A_p(s).
  Eigen::EigenSolver<Eigen::MatrixXd> es(d.system.A);
  for (int i = 0; i < 6; ++i) {
    const Complex lam = es.eigenvalues()(i);
    EXPECT_LE(std::abs(lam * den.eval(lam)), 1e-6 * std::max(1.0, std::pow(std::abs(lam), 6)));
  }
  EXPECT_THROW(hover_design(den, 1.0, 1, Polynomial({1, 1})), std::invalid_argument);
}

}  // namespace
