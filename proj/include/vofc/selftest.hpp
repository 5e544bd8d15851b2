/**
 * @file selftest.hpp
 * @brief Bundled invariant checks run by `vofc selftest`.
 *
 * Every check is deterministic for a given seed and independent of the
 * worker count, so the printed report can be compared byte for byte.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "vofc/identities.hpp"
#include "vofc/instances.hpp"
#include "vofc/operators.hpp"
#include "vofc/specialfn.hpp"
#include "vofc/variational.hpp"

namespace vofc {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline SelfTestResult bound_check(std::string name, double worst, double limit) {
  return {std::move(name), worst <= limit, "max error " + sci(worst) + " (limit " + sci(limit) + ")"};
}

}  // namespace detail

inline std::vector<SelfTestResult> run_selftest(std::uint64_t seed) {
  using instances::Rng;
  std::vector<SelfTestResult> out;
  const Interval unit{0.0, 1.0};
  const Rect2 square{unit, unit};

  {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double x = instances::uniform(rng, 0.05, 5.0);
      worst = std::max(worst, std::abs(gamma(x + 1) - x * gamma(x)) / gamma(x + 1));
    }
    out.push_back(detail::bound_check("gamma_recurrence", worst, 1e-12));
  }
  {
    double worst = 0.0, fact2n = 1.0, factn = 1.0, four = 1.0;
    for (int n = 0; n <= 5; ++n) {
      if (n > 0) {
        fact2n *= (2.0 * n - 1) * (2.0 * n);
        factn *= n;
        four *= 4.0;
      }
      const double exact = fact2n * std::sqrt(std::numbers::pi) / (four * factn);
      worst = std::max(worst, std::abs(gamma(n + 0.5) - exact) / exact);
    }
    out.push_back(detail::bound_check("gamma_half_integers", worst, 1e-12));
  }
  {
    bool all = true;
    for (int i = 0; i <= 1000; ++i) all = all && gamma_lower_bound_check(i / 1000.0);
    out.push_back({"gamma_inequality", all, all ? "holds on 1001 points" : "violated"});
  }
  {
    Rng rng(seed + 1);
    const VariableOrder alpha([](double t, double tau) { return 0.3 + 0.2 * t * tau; }, unit);
    const SingularKernelSpec spec{alpha, Side::left, WeightShift::integral};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const SmoothFn1 h1 = instances::random_poly1(rng, 3), h2 = instances::random_poly1(rng, 3);
      const double c1 = instances::uniform(rng, -2, 2), c2 = instances::uniform(rng, -2, 2);
      const double t = instances::uniform(rng, 0.2, 1.0);
      const double lhs =
          singular_integral(spec, [&](double s) { return c1 * h1(s) + c2 * h2(s); }, 0.0, t, QuadConfig{});
      const double rhs = c1 * singular_integral(spec, h1.value_fn(), 0.0, t, QuadConfig{}) +
                         c2 * singular_integral(spec, h2.value_fn(), 0.0, t, QuadConfig{});
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    out.push_back(detail::bound_check("quadrature_linearity", worst, 1e-12));
  }
  {
    const VariableOrder alpha([](double t, double) { return (1 + t) / 4; }, unit);
    double worst = 0.0;
    for (int g = 1; g <= 3; ++g) {
      const SmoothFn1 f([g](double s) { return std::pow(s, g); });
      for (int i = 1; i <= 20; ++i) {
        const double t = i / 20.0, a = (1 + t) / 4;
        const double exact = gamma(g + 1.0) * std::pow(t, g + a) / gamma(g + a + 1);
        worst = std::max(worst, std::abs(left_rl_integral(f, alpha, 0.0, t) - exact) / exact);
      }
    }
    out.push_back(detail::bound_check("samko_ross_oracle", worst, 1e-8));
  }
  {
    // Left operators of f = t² with constant order: classical closed forms.
    double worst_int = 0.0, worst_rl = 0.0;
    const SmoothFn1 f([](double s) { return s * s; }, SmoothFn1::Function([](double s) { return 2 * s; }));
    for (double a : {0.25, 0.5, 0.75}) {
      const VariableOrder alpha = VariableOrder::constant(a, unit);
      for (double t : {0.3, 0.7, 1.0}) {
        const double I = 2.0 * std::pow(t, 2 + a) / gamma(3 + a);
        const double D = 2.0 * std::pow(t, 2 - a) / gamma(3 - a);
        worst_int = std::max(worst_int, std::abs(left_rl_integral(f, alpha, 0, t) - I) / I);
        worst_int = std::max(worst_int, std::abs(left_caputo_derivative(f, alpha, 0, t) - D) / D);
        worst_rl = std::max(worst_rl, std::abs(left_rl_derivative(f, alpha, 0, t) - D) / D);
      }
    }
    out.push_back(detail::bound_check("constant_order_integral_caputo", worst_int, 1e-8));
    out.push_back(detail::bound_check("constant_order_rl_derivative", worst_rl, 1e-6));
  }
  {
    Rng rng(seed + 2);
    double worst_ic = 0.0, worst_d = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double c0 = instances::uniform(rng, 0.3, 0.5), c1 = instances::uniform(rng, -0.1, 0.1);
      const VariableOrder alpha([c0, c1](double t, double tau) { return c0 + c1 * t + 0.05 * tau; }, unit);
      const VariableOrder refl = alpha.reflected();
      const SmoothFn1 f = instances::random_poly1(rng, 3);
      const SmoothFn1 fr = f.reflected(unit);
      const double t = instances::uniform(rng, 0.1, 0.9), u = unit.reflect(t);
      worst_ic = std::max(worst_ic, std::abs(right_rl_integral(f, alpha, t, 1) - left_rl_integral(fr, refl, 0, u)));
      worst_ic = std::max(worst_ic, std::abs(right_caputo_derivative(f, alpha, t, 1) -
                                             left_caputo_derivative(fr, refl, 0, u)));
      worst_d = std::max(worst_d, std::abs(right_rl_derivative(f, alpha, t, 1) - left_rl_derivative(fr, refl, 0, u)));
    }
    out.push_back(detail::bound_check("reflection_integral_caputo", worst_ic, 1e-10));
    out.push_back(detail::bound_check("reflection_rl_derivative", worst_d, 1e-8));
  }
  {
    Rng rng(seed + 3);
    const VariableOrder a1([](double t, double) { return 0.4 + 0.1 * t; }, unit, BoundMode::above_one_over_l, 3);
    const VariableOrder a2([](double, double tau) { return 0.5 + 0.1 * tau; }, unit, BoundMode::above_one_over_l, 3);
    const SmoothFn2 f = instances::random_poly2(rng, 3), g = instances::random_poly2(rng, 3);
    const SmoothFn2 e1 = instances::random_poly2(rng, 3), e2 = instances::random_poly2(rng, 3);
    const IdentityReport r = verify_ibp(f, g, e1, e2, a1, a2, square, 16);
    out.push_back(detail::bound_check("ibp_residual", std::abs(r.residual), 1e-5));
  }
  {
    Rng rng(seed + 4);
    const VariableOrder a = VariableOrder::constant(0.4, unit, BoundMode::below_one_minus, 3);
    const SmoothFn2 f = instances::random_poly2(rng, 2), g = instances::random_poly2(rng, 2);
    const SmoothFn2 eta = instances::random_zero_trace(rng, 1, square);
    const IdentityReport r = verify_green(f, g, eta, a, a, square, 12);
    out.push_back(detail::bound_check("green_residual", std::abs(r.residual), 1e-4));
  }
  {
    Rng rng(seed + 5);
    const VariableOrder a = VariableOrder::constant(0.4, unit);
    const Lagrangian L = Lagrangian::quadratic();
    const CaputoField u = caputo_field(instances::random_poly2(rng, 2), a, a, square);
    const SmoothFn2 eta = instances::random_zero_trace(rng, 1, square);
    const CaputoField e = caputo_field(eta, a, a, square);
    const double fv = first_variation(L, u, eta, a, a, square, 12);
    const double eps = 1e-5;
    const double fd = (functional_eval(L, combine(u, e, eps), square, 12) -
                       functional_eval(L, combine(u, e, -eps), square, 12)) / (2 * eps);
    out.push_back(detail::bound_check("first_variation_consistency", std::abs(fv - fd) / std::abs(fv), 1e-6));
  }
  return out;
}

}  // namespace vofc
