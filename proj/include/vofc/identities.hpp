/**
 * @file identities.hpp
 * @brief Numerical checks of the two-dimensional integration-by-parts formula for
 *        variable-order partial integrals and of the Green-type formula for
 *        variable-order Caputo / RL partial derivatives.
 *
 * Integration by parts (1/lᵢ < αᵢ < 1):
 *
 *   ∬ [g·ₐ₁I_{t₁}^{α₁}η₁ + f·ₐ₂I_{t₂}^{α₂}η₂] = ∬ [η₁·_{t₁}I_{b₁}^{α₁}g + η₂·_{t₂}I_{b₂}^{α₂}f]
 *
 * Green-type formula (0 < αᵢ < 1 − 1/lᵢ):
 *
 *   ∬ [g·ᶜD_{t₁}^{α₁}η + f·ᶜD_{t₂}^{α₂}η]
 *     = ∬ η·[_{t₁}D_{b₁}^{α₁}g + _{t₂}D_{b₂}^{α₂}f] + ∮ η·[I^{1−α₁}g dt₂ − I^{1−α₂}f dt₁]
 *
 * with the contour traversed counterclockwise. Outer double integrals use a
 * tensor product of endpoint-clustered Gauss–Legendre rules (t₂ inner, t₁
 * outer); every inner operator is evaluated through operators.hpp.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "vofc/domain.hpp"
#include "vofc/errors.hpp"
#include "vofc/operators.hpp"
#include "vofc/parallel.hpp"
#include "vofc/quadrature.hpp"

namespace vofc {

/// Endpoint clustering exponent of the outer rules used throughout (see outer_rule).
inline constexpr int kOuterClustering = 4;

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< lhs − rhs
  int outer_grid = 0;
  QuadConfig quad{};
  bool converged = false;
  double contour = 0.0;  ///< contour part of rhs (Green only)
};

/// Tensor-product quadrature over a rectangle; index i along t₁, j along t₂.
struct TensorRule {
  OuterRule r1;
  OuterRule r2;

  TensorRule(const Rect2& rect, int n) : r1(outer_rule(rect.t1, n, kOuterClustering)), r2(outer_rule(rect.t2, n, kOuterClustering)) {}

  std::size_t size() const noexcept { return r1.nodes.size() * r2.nodes.size(); }
  Point2 point(std::size_t k) const {
    return {r1.nodes[k / r2.nodes.size()], r2.nodes[k % r2.nodes.size()]};
  }

  /// Σ_i w1_i Σ_j w2_j v[i·n2 + j], always in that order.
  double reduce(const std::vector<double>& v) const {
    const std::size_t n2 = r2.nodes.size();
    double total = 0.0;
    for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
      double inner = 0.0;
      for (std::size_t j = 0; j < n2; ++j) inner += r2.weights[j] * v[i * n2 + j];
      total += r1.weights[i] * inner;
    }
    return total;
  }
};

/// ∬_rect F(t₁,t₂) dt₂ dt₁ with deterministic reduction; F is evaluated in parallel.
template <class F>
double integrate_rect(const Rect2& rect, int outer_grid, F&& integrand) {
  if (outer_grid < 1) throw DomainError("outer_grid must be >= 1");
  const TensorRule rule(rect, outer_grid);
  const auto values = parallel::map_indices<double>(rule.size(), [&](std::size_t k) {
    const Point2 p = rule.point(k);
    return integrand(p.t1, p.t2);
  });
  return rule.reduce(values);
}

namespace detail {

inline void require_rect_domain(const VariableOrder& alpha, const Interval& iv, const char* which) {
  const Interval& d = alpha.domain();
  const double slack = 1e-12 * iv.length();
  if (d.a > iv.a + slack || d.b < iv.b - slack) {
    std::ostringstream os;
    os << which << " domain [" << d.a << ", " << d.b << "] does not cover [" << iv.a << ", " << iv.b << "]";
    throw DomainError(os.str());
  }
}

/// Order-(1−α) right integral of the section through p along `axis`.
inline double right_complement_integral(const SmoothFn2& f, const VariableOrder& alpha, int axis, Point2 p,
                                        const Rect2& rect, const QuadConfig& cfg) {
  const double t = axis == 1 ? p.t1 : p.t2;
  const double frozen = axis == 1 ? p.t2 : p.t1;
  const SmoothFn1 sec = f.section(axis, frozen);
  return singular_integral({alpha, Side::right, WeightShift::derivative}, sec.value_fn(), t, rect.along(axis).b,
                           cfg);
}

}  // namespace detail

/// Both sides of the integration-by-parts formula and their difference.
inline IdentityReport verify_ibp(const SmoothFn2& f, const SmoothFn2& g, const SmoothFn2& eta1,
                                 const SmoothFn2& eta2, const VariableOrder& alpha1, const VariableOrder& alpha2,
                                 const Rect2& rect, int outer_grid, const QuadConfig& cfg = {},
                                 double tolerance = 1e-5) {
  alpha1.require_mode(BoundMode::above_one_over_l, "integration by parts (1/l1 < alpha1 < 1)");
  alpha2.require_mode(BoundMode::above_one_over_l, "integration by parts (1/l2 < alpha2 < 1)");
  detail::require_rect_domain(alpha1, rect.t1, "alpha1");
  detail::require_rect_domain(alpha2, rect.t2, "alpha2");
  cfg.validate();

  const TensorRule rule(rect, outer_grid);
  std::vector<double> lhs(rule.size()), rhs(rule.size());
  parallel::for_each_index(rule.size(), [&](std::size_t k) {
    const Point2 p = rule.point(k);
    const double x = p.t1, y = p.t2;
    lhs[k] = g(x, y) * partial_op(OpKind::I_left, 1, eta1, alpha1, p, rect, cfg) +
             f(x, y) * partial_op(OpKind::I_left, 2, eta2, alpha2, p, rect, cfg);
    rhs[k] = eta1(x, y) * partial_op(OpKind::I_right, 1, g, alpha1, p, rect, cfg) +
             eta2(x, y) * partial_op(OpKind::I_right, 2, f, alpha2, p, rect, cfg);
  });

  IdentityReport r;
  r.lhs = rule.reduce(lhs);
  r.rhs = rule.reduce(rhs);
  r.residual = r.lhs - r.rhs;
  r.outer_grid = outer_grid;
  r.quad = cfg;
  r.converged = std::abs(r.residual) <= tolerance;
  return r;
}

/// ∮ η·(G dt₂ − F dt₁) counterclockwise, G and F given directly as functions of (t₁, t₂).
template <class G, class F>
double contour_of_form(const SmoothFn2& eta, G&& G1, F&& F2, const Rect2& rect, const QuadConfig& cfg = {}) {
  const Interval& x = rect.t1;
  const Interval& y = rect.t2;
  const double bottom = line_integral_edge([&](double s) { return -eta(s, y.a) * F2(s, y.a); }, x.a, x.b,
                                           Orientation::forward, cfg);
  const double right = line_integral_edge([&](double s) { return eta(x.b, s) * G1(x.b, s); }, y.a, y.b,
                                          Orientation::forward, cfg);
  const double top = line_integral_edge([&](double s) { return -eta(s, y.b) * F2(s, y.b); }, x.a, x.b,
                                        Orientation::backward, cfg);
  const double left = line_integral_edge([&](double s) { return eta(x.a, s) * G1(x.a, s); }, y.a, y.b,
                                         Orientation::backward, cfg);
  return bottom + right + top + left;
}

/**
 * ∮_{∂Δ₂} η·[_{t₁}I_{b₁}^{1−α₁}g dt₂ − _{t₂}I_{b₂}^{1−α₂}f dt₁], counterclockwise:
 * bottom (t₂=a₂, dt₁>0), right (t₁=b₁, dt₂>0), top (t₂=b₂, dt₁<0), left (t₁=a₁, dt₂<0).
 * On the right and top edges the inner integrals have an empty range and vanish.
 */
inline double boundary_contour(const SmoothFn2& eta, const SmoothFn2& g, const SmoothFn2& f,
                               const VariableOrder& alpha1, const VariableOrder& alpha2, const Rect2& rect,
                               const QuadConfig& cfg = {}) {
  auto G1 = [&](double t1, double t2) { return detail::right_complement_integral(g, alpha1, 1, {t1, t2}, rect, cfg); };
  auto F2 = [&](double t1, double t2) { return detail::right_complement_integral(f, alpha2, 2, {t1, t2}, rect, cfg); };
  return contour_of_form(eta, G1, F2, rect, cfg);
}

namespace detail {

/// Sample check that the order-(1−αᵢ) right integrals of g and f are finite with finite difference quotients.
inline void probe_right_integrals(const SmoothFn2& g, const SmoothFn2& f, const VariableOrder& alpha1,
                                  const VariableOrder& alpha2, const Rect2& rect, const QuadConfig& cfg) {
  constexpr int kProbe = 16;
  for (int axis = 1; axis <= 2; ++axis) {
    const SmoothFn2& fn = axis == 1 ? g : f;
    const VariableOrder& al = axis == 1 ? alpha1 : alpha2;
    for (int i = 0; i < kProbe; ++i) {
      const double other = rect.along(3 - axis).a + rect.along(3 - axis).length() * (i + 0.5) / kProbe;
      double prev = 0.0;
      for (int j = 0; j < kProbe; ++j) {
        const double t = rect.along(axis).a + rect.along(axis).length() * (j + 0.5) / kProbe;
        const Point2 p = axis == 1 ? Point2{t, other} : Point2{other, t};
        const double v = right_complement_integral(fn, al, axis, p, rect, cfg);
        const double quotient = j > 0 ? (v - prev) * kProbe / rect.along(axis).length() : 0.0;
        if (!std::isfinite(v) || !std::isfinite(quotient)) {
          std::ostringstream os;
          os << "right integral of order 1-alpha" << axis << " is not finite near (" << p.t1 << ", " << p.t2 << ")";
          throw ValidityError(os.str());
        }
        prev = v;
      }
    }
  }
}

}  // namespace detail

/// Both sides of the Green-type formula (rhs includes the contour term) and their difference.
inline IdentityReport verify_green(const SmoothFn2& f, const SmoothFn2& g, const SmoothFn2& eta,
                                   const VariableOrder& alpha1, const VariableOrder& alpha2, const Rect2& rect,
                                   int outer_grid, const QuadConfig& cfg = {}, double tolerance = 1e-4,
                                   const OperatorOptions& opt = {}) {
  alpha1.require_mode(BoundMode::below_one_minus, "the Green-type formula (0 < alpha1 < 1 - 1/l1)");
  alpha2.require_mode(BoundMode::below_one_minus, "the Green-type formula (0 < alpha2 < 1 - 1/l2)");
  detail::require_rect_domain(alpha1, rect.t1, "alpha1");
  detail::require_rect_domain(alpha2, rect.t2, "alpha2");
  cfg.validate();
  detail::probe_right_integrals(g, f, alpha1, alpha2, rect, cfg);

  const TensorRule rule(rect, outer_grid);
  std::vector<double> lhs(rule.size()), area(rule.size());
  parallel::for_each_index(rule.size(), [&](std::size_t k) {
    const Point2 p = rule.point(k);
    const double x = p.t1, y = p.t2;
    lhs[k] = g(x, y) * partial_op(OpKind::D_cap_left, 1, eta, alpha1, p, rect, cfg, opt) +
             f(x, y) * partial_op(OpKind::D_cap_left, 2, eta, alpha2, p, rect, cfg, opt);
    const double e = eta(x, y);
    area[k] = e == 0.0 ? 0.0
                       : e * (partial_op(OpKind::D_rl_right, 1, g, alpha1, p, rect, cfg, opt) +
                              partial_op(OpKind::D_rl_right, 2, f, alpha2, p, rect, cfg, opt));
  });

  IdentityReport r;
  r.lhs = rule.reduce(lhs);
  r.contour = boundary_contour(eta, g, f, alpha1, alpha2, rect, cfg);
  r.rhs = rule.reduce(area) + r.contour;
  r.residual = r.lhs - r.rhs;
  r.outer_grid = outer_grid;
  r.quad = cfg;
  r.converged = std::abs(r.residual) <= tolerance;
  return r;
}

}  // namespace vofc
