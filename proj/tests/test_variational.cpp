#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vofc/instances.hpp"
#include "vofc/variational.hpp"

using namespace vofc;

namespace {

const Interval kUnit{0.0, 1.0};
const Rect2 kSquare{kUnit, kUnit};

double zero5(double, double, double, double, double) { return 0.0; }

Lagrangian identity_u() {
  return {[](double, double, double u, double, double) { return u; },
          [](double, double, double, double, double) { return 1.0; }, zero5, zero5};
}

SmoothFn2 bubble() {
  return {[](double x, double y) { return x * (1 - x) * y * (1 - y); },
          SmoothFn2::Function([](double x, double y) { return (1 - 2 * x) * y * (1 - y); }),
          SmoothFn2::Function([](double x, double y) { return x * (1 - x) * (1 - 2 * y); })};
}

SmoothFn2 linear(double c1, double c2) {
  return {[=](double x, double y) { return c1 * x + c2 * y; }, SmoothFn2::Function([=](double, double) { return c1; }),
          SmoothFn2::Function([=](double, double) { return c2; })};
}

/// q·(u², d₁², d₂², u·d₁, t₁·d₂, u) with random weights; convex parts kept positive.
Lagrangian random_lagrangian(instances::Rng& rng) {
  const double q0 = instances::uniform(rng, 0.5, 2), q1 = instances::uniform(rng, 0.5, 2),
               q2 = instances::uniform(rng, 0.5, 2), q3 = instances::uniform(rng, -0.5, 0.5),
               q4 = instances::uniform(rng, -1, 1), q5 = instances::uniform(rng, -1, 1);
  return {[=](double t1, double, double u, double d1, double d2) {
            return q0 * u * u + q1 * d1 * d1 + q2 * d2 * d2 + q3 * u * d1 + q4 * t1 * d2 + q5 * u;
          },
          [=](double, double, double u, double d1, double) { return 2 * q0 * u + q3 * d1 + q5; },
          [=](double, double, double u, double d1, double) { return 2 * q1 * d1 + q3 * u; },
          [=](double t1, double, double, double, double d2) { return 2 * q2 * d2 + q4 * t1; }};
}

}  // namespace

TEST(Lagrangian, PresetsValidateAndBadPartialsAreRejected) {
  EXPECT_NO_THROW(Lagrangian::quadratic());
  EXPECT_NO_THROW(Lagrangian::dirichlet());
  EXPECT_NO_THROW(Lagrangian::string(SmoothFn1::constant(1.0), 2.0));
  EXPECT_THROW(Lagrangian::string(SmoothFn1::constant(1.0), 0.0), DomainError);
  EXPECT_THROW(Lagrangian::string(SmoothFn1::constant(1.0), -1.0), DomainError);
  EXPECT_THROW(Lagrangian([](double, double, double u, double, double) { return u * u; },
                          [](double, double, double u, double, double) { return u; }, zero5, zero5),
               ConfigurationError);
}

TEST(BoundaryData, CornerCompatibility) {
  const BoundaryData ok = BoundaryData::constant(2.0);
  EXPECT_NO_THROW(ok.check_corners(kSquare));
  BoundaryData bad = ok;
  bad.top = SmoothFn1::constant(2.5);
  EXPECT_THROW(bad.check_corners(kSquare), DomainError);
  EXPECT_THROW(coons_lift(bad, kSquare), DomainError);
}

TEST(CoonsLift, ReproducesEdgesAndSumsOfUnivariateTerms) {
  const Rect2 rect{{-1.0, 2.0}, {0.5, 1.5}};
  const SmoothFn2 psi([](double x, double y) { return 1 + x + y * y + 2 * x * y; },
                      SmoothFn2::Function([](double, double y) { return 1 + 2 * y; }),
                      SmoothFn2::Function([](double x, double y) { return 2 * y + 2 * x; }));
  const SmoothFn2 lift = coons_lift(BoundaryData::from_function(psi, rect), rect);
  for (double x : {-1.0, -0.3, 0.8, 2.0}) {
    for (double y : {0.5, 0.9, 1.5}) {
      EXPECT_NEAR(lift(x, y), psi(x, y), 1e-13);
      EXPECT_NEAR(lift.partial(1, x, y), psi.partial(1, x, y), 1e-12);
      EXPECT_NEAR(lift.partial(2, x, y), psi.partial(2, x, y), 1e-12);
    }
  }
}

TEST(CoonsLift, EdgeDerivativeFallback) {
  const BoundaryData psi{SmoothFn1([](double x) { return std::sin(x); }), SmoothFn1([](double y) { return std::sin(1.0) * (1 - y); }),
                         SmoothFn1([](double) { return 0.0; }), SmoothFn1([](double) { return 0.0; })};
  const SmoothFn2 lift = coons_lift(psi, kSquare);
  EXPECT_NO_THROW(check_derivative_consistency(lift, kSquare, 1e-6));
  EXPECT_NEAR(lift(0.3, 0.0), std::sin(0.3), 1e-15);
}

TEST(RitzBasis, ModesVanishOnBoundary) {
  const RitzBasis basis(SmoothFn2::constant(0), 3, kSquare);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const SmoothFn2 phi = basis.phi(j);
    for (double s : {0.0, 0.25, 0.6, 1.0}) {
      EXPECT_NEAR(phi(s, 0.0), 0.0, 1e-15);
      EXPECT_NEAR(phi(s, 1.0), 0.0, 1e-15);
      EXPECT_NEAR(phi(0.0, s), 0.0, 1e-15);
      EXPECT_NEAR(phi(1.0, s), 0.0, 1e-15);
    }
  }
  EXPECT_EQ(basis.mode(0), std::make_pair(1, 1));
  EXPECT_EQ(basis.mode(5), std::make_pair(2, 3));
  EXPECT_THROW(RitzBasis(SmoothFn2::constant(0), 0, kSquare), DomainError);
}

TEST(RitzBasis, FastFieldMatchesGeneralOperators) {
  const Rect2 rect{{0.0, 2.0}, {-1.0, 1.0}};
  const VariableOrder a1([](double t, double tau) { return 0.3 + 0.1 * t + 0.05 * tau; }, rect.t1);
  const VariableOrder a2 = VariableOrder::constant(0.45, rect.t2);
  const SmoothFn2 psi([](double x, double y) { return 1 + x * y + 0.3 * x * x; },
                      SmoothFn2::Function([](double x, double y) { return y + 0.6 * x; }),
                      SmoothFn2::Function([](double x, double) { return x; }));
  const RitzBasis basis(coons_lift(BoundaryData::from_function(psi, rect), rect), 3, rect);
  instances::Rng rng(8);
  std::vector<double> c(basis.size());
  for (double& x : c) x = instances::uniform(rng, -1, 1);
  const RitzExpansion u(basis, c);
  const CaputoField fast = caputo_field(u, a1, a2);
  const CaputoField general = caputo_field(u.as_function(), a1, a2, rect);
  for (int i = 0; i < 10; ++i) {
    const Point2 p{instances::uniform(rng, 0, 2), instances::uniform(rng, -1, 1)};
    const FieldValue x = fast(p), y = general(p);
    EXPECT_NEAR(x.u, y.u, 1e-13);
    EXPECT_NEAR(x.d1, y.d1, 1e-11);
    EXPECT_NEAR(x.d2, y.d2, 1e-11);
  }
  EXPECT_THROW(RitzExpansion(basis, {1.0}), DomainError);
}

TEST(FunctionalEval, Examples) {
  const auto half = VariableOrder::constant(0.5, kUnit);
  const RitzExpansion ones(RitzBasis(coons_lift(BoundaryData::constant(1.0), kSquare), 2, kSquare), std::vector<double>(4, 0.0));
  EXPECT_NEAR(functional_eval(identity_u(), ones, half, half, 12), 1.0, 1e-13);
  EXPECT_NEAR(functional_eval(Lagrangian::dirichlet(), SmoothFn2::constant(3.0), half, half, kSquare, 12), 0.0, 1e-15);
  const Lagrangian d1([](double, double, double, double d, double) { return d; }, zero5,
                      [](double, double, double, double, double) { return 1.0; }, zero5);
  EXPECT_NEAR(functional_eval(d1, linear(1, 0), half, half, kSquare, 20), 0.75225277806367504926, 1e-9);
}

TEST(StringAction, Examples) {
  const auto half = VariableOrder::constant(0.5, kUnit);
  const SmoothFn1 sigma = SmoothFn1::constant(1.0);
  EXPECT_EQ(string_action(sigma, 1.0, caputo_field(SmoothFn2::constant(0), half, half, kSquare), kSquare, 8), 0.0);
  EXPECT_EQ(string_action(sigma, 1.0, caputo_field(SmoothFn2::constant(4), half, half, kSquare), kSquare, 8), 0.0);
  // u(t, x) = x with time along axis 1 and space along axis 2.
  EXPECT_NEAR(string_action(sigma, 1.0, caputo_field(linear(0, 1), half, half, kSquare), kSquare, 20),
              2.0 / std::numbers::pi, 1e-10);
  EXPECT_THROW(string_action(sigma, 0.0, caputo_field(linear(0, 1), half, half, kSquare), kSquare, 8), DomainError);
}

TEST(ElResidual, Examples) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  const ResidualField r0 = el_residual(Lagrangian::dirichlet(), caputo_field(SmoothFn2::constant(2.5), a, a, kSquare), a, a, kSquare, 5);
  ASSERT_EQ(r0.values.size(), 25u);
  for (double v : r0.values) EXPECT_LE(std::abs(v), 1e-8);

  const Lagrangian u2([](double, double, double u, double, double) { return u * u; },
                      [](double, double, double u, double, double) { return 2 * u; }, zero5, zero5);
  for (double v : el_residual(u2, caputo_field(SmoothFn2::constant(0), a, a, kSquare), a, a, kSquare, 4).values) EXPECT_EQ(v, 0.0);

  const ResidualField r1 = el_residual(identity_u(), caputo_field(bubble(), a, a, kSquare), a, a, kSquare, 4);
  for (double v : r1.values) EXPECT_NEAR(v, 1.0, 1e-14);
  EXPECT_NEAR(r1.l2, 1.0, 1e-14);
  EXPECT_NEAR(r1.points.front().t1, 0.125, 1e-15);
}

TEST(ElResidual, ConstantSolutionOfVariableOrderDirichlet) {
  const VariableOrder a1([](double t, double tau) { return 0.3 + 0.2 * t * tau; }, kUnit);
  const VariableOrder a2([](double t, double) { return 0.25 + 0.1 * t; }, kUnit);
  const RitzExpansion u(RitzBasis(coons_lift(BoundaryData::constant(-1.5), kSquare), 2, kSquare), std::vector<double>(4, 0.0));
  for (double v : el_residual(Lagrangian::dirichlet(), caputo_field(u, a1, a2), a1, a2, kSquare, 4).values)
    EXPECT_LE(std::abs(v), 1e-8);
}

TEST(FirstVariation, Examples) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  const CaputoField u = caputo_field(linear(0.3, -0.7), a, a, kSquare);
  EXPECT_EQ(first_variation(Lagrangian::quadratic(), u, SmoothFn2::constant(0), a, a, kSquare, 8), 0.0);
  EXPECT_NEAR(first_variation(identity_u(), u, bubble(), a, a, kSquare, 16), 1.0 / 36, 1e-14);
  EXPECT_THROW(first_variation(identity_u(), u, SmoothFn2::constant(1), a, a, kSquare, 8), PreconditionError);
}

TEST(FirstVariation, MatchesCentralDifferenceOfFunctional) {
  instances::Rng rng(77);
  const VariableOrder a1([](double t, double tau) { return 0.3 + 0.1 * t + 0.05 * tau; }, kUnit);
  const VariableOrder a2 = VariableOrder::constant(0.45, kUnit);
  for (int i = 0; i < 10; ++i) {
    const Lagrangian L = random_lagrangian(rng);
    const CaputoField u = caputo_field(instances::random_poly2(rng, 2), a1, a2, kSquare);
    const SmoothFn2 eta = instances::random_zero_trace(rng, 1, kSquare);
    const CaputoField e = caputo_field(eta, a1, a2, kSquare);
    const double fv = first_variation(L, u, eta, a1, a2, kSquare, 10);
    const double eps = 1e-5;
    const double fd =
        (functional_eval(L, combine(u, e, eps), kSquare, 10) - functional_eval(L, combine(u, e, -eps), kSquare, 10)) / (2 * eps);
    EXPECT_LE(std::abs(fv - fd), 1e-6 * std::abs(fv)) << i;
  }
}

TEST(FirstVariation, GreenBridgeForm) {
  instances::Rng rng(78);
  const auto a = VariableOrder::constant(0.4, kUnit);
  const Lagrangian L = random_lagrangian(rng);
  const CaputoField u = caputo_field(instances::random_poly2(rng, 2), a, a, kSquare);
  const SmoothFn2 eta = instances::random_zero_trace(rng, 1, kSquare);
  const double fv = first_variation(L, u, eta, a, a, kSquare, 12);
  const double tv = transformed_variation(L, u, eta, a, a, kSquare, 12);
  EXPECT_NEAR(fv, tv, 1e-4);
  EXPECT_GT(std::abs(fv), 1e-3);
}

TEST(RitzSolve, ZeroBoundaryQuadraticHasZeroMinimiser) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  RitzOptions opt;
  opt.n_modes = 2;
  opt.residual_grid = 4;
  opt.initial = {0.3, -0.2, 0.1, 0.05};
  const SolveReport r = ritz_solve(Lagrangian::quadratic(), BoundaryData::constant(0.0), a, a, kSquare, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.gradient_norm, 1e-7);
  EXPECT_LT(r.J_value, 1e-14);
  for (double c : r.coeffs) EXPECT_NEAR(c, 0.0, 1e-7);
  EXPECT_FALSE(r.nonconvex_flag);
}

TEST(RitzSolve, GradientRichardsonConsistency) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  const RitzBasis basis(coons_lift(BoundaryData::constant(0.0), kSquare), 3, kSquare);
  const RitzObjective J(Lagrangian::quadratic(), basis, a, a, 12, QuadConfig{});
  instances::Rng rng(4);
  std::vector<double> c(basis.size());
  for (double& x : c) x = instances::uniform(rng, -1, 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto diff = [&](double h) {
      std::vector<double> p = c, m = c;
      p[i] += h;
      m[i] -= h;
      return (J(p) - J(m)) / (2 * h);
    };
    const double g1 = diff(1e-6 * (1 + std::abs(c[i]))), g2 = diff(0.5e-6 * (1 + std::abs(c[i])));
    EXPECT_LE(std::abs(g1 - g2), 1e-5 * std::max(std::abs(g1), 1e-3)) << i;
  }
}

TEST(RitzSolve, StationarityAndReportedValue) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  const SmoothFn2 psi([](double x, double y) { return 1 + x + y * y; },
                      SmoothFn2::Function([](double, double) { return 1.0; }),
                      SmoothFn2::Function([](double, double y) { return 2 * y; }));
  const BoundaryData bd = BoundaryData::from_function(psi, kSquare);
  RitzOptions opt;
  opt.n_modes = 2;
  opt.outer_grid = 16;
  opt.residual_grid = 4;
  const SolveReport r = ritz_solve(Lagrangian::quadratic(), bd, a, a, kSquare, opt);
  ASSERT_TRUE(r.converged);
  const RitzExpansion u(RitzBasis(coons_lift(bd, kSquare), 2, kSquare), r.coeffs);
  EXPECT_EQ(r.J_value, functional_eval(Lagrangian::quadratic(), u, a, a, 16));
  for (std::size_t j = 0; j < u.basis.size(); ++j)
    EXPECT_LE(std::abs(first_variation(Lagrangian::quadratic(), caputo_field(u, a, a), u.basis.phi(j), a, a, kSquare, 16)),
              10 * opt.optimizer.gradient_tolerance);
}

TEST(RitzSolve, ResidualDecreasesWithModes) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  const SmoothFn2 psi([](double x, double y) { return 1 + x + y * y; },
                      SmoothFn2::Function([](double, double) { return 1.0; }),
                      SmoothFn2::Function([](double, double y) { return 2 * y; }));
  double prev = INFINITY;
  for (int n : {2, 4, 6}) {
    RitzOptions opt;
    opt.n_modes = n;
    const SolveReport r = ritz_solve(Lagrangian::quadratic(), BoundaryData::from_function(psi, kSquare), a, a, kSquare, opt);
    EXPECT_TRUE(r.converged) << n;
    EXPECT_LT(r.el_residual_l2, prev) << n;
    prev = r.el_residual_l2;
  }
}

TEST(RitzSolve, StringActionIsFlaggedNonconvex) {
  const auto a = VariableOrder::constant(0.4, kUnit);
  RitzOptions opt;
  opt.n_modes = 2;
  opt.residual_grid = 3;
  opt.initial = {0.2, 0.1, -0.1, 0.3};
  const SolveReport r =
      ritz_solve(Lagrangian::string(SmoothFn1::constant(1.0), 1.0), BoundaryData::constant(0.0), a, a, kSquare, opt);
  EXPECT_TRUE(r.nonconvex_flag || r.gradient_norm <= 1e-7);
  EXPECT_TRUE(r.nonconvex_flag);
}
