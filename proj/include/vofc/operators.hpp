/**
 * @file operators.hpp
 * @brief Variable-order Riemann–Liouville integrals, RL derivatives and Caputo
 *        derivatives on an interval, and their partial counterparts on a rectangle.
 *
 * Conventions:
 *  - left kernels use α(t,τ), right kernels the transposed α(τ,t);
 *  - RL derivatives differentiate the order-(1−α) integral in its free endpoint
 *    with a 5-point stencil (re-quadrature at every stencil point);
 *  - right derivatives carry the leading minus sign of their definitions;
 *  - integrals and Caputo derivatives vanish on an empty range, RL derivatives
 *    are undefined there and throw.
 *
 * Partial operators freeze the other coordinate and apply the one-variable
 * operator to the resulting section; that reduction is exact.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "vofc/domain.hpp"
#include "vofc/errors.hpp"
#include "vofc/quadrature.hpp"

namespace vofc {

enum class StencilMode {
  central,   ///< 5-point central only; throws when a stencil point would leave the interval
  adaptive,  ///< shrink the step near the singular endpoint, one-sided 4th order near the other
};

enum class CaputoFallback {
  finite_difference,  ///< differentiate f numerically when no analytic derivative is given
  forbid,             ///< throw ConfigurationError instead
};

struct OperatorOptions {
  /// RL-derivative step; 0 means (b−a)·1e-4 of the order's domain.
  double step = 0.0;
  StencilMode stencil = StencilMode::adaptive;
  CaputoFallback fallback = CaputoFallback::finite_difference;
};

namespace detail {

inline void require_inside(const VariableOrder& alpha, double lo, double hi, std::string_view op) {
  const Interval& d = alpha.domain();
  const double slack = 1e-12 * d.length();
  if (lo < d.a - slack || hi > d.b + slack) {
    std::ostringstream os;
    os << op << ": range [" << lo << ", " << hi << "] leaves the order's domain [" << d.a << ", " << d.b << "]";
    throw DomainError(os.str());
  }
}

inline void require_ordered(double lo, double hi, std::string_view op) {
  if (!(lo <= hi)) {
    std::ostringstream os;
    os << op << ": need lower limit <= evaluation point, got " << lo << " > " << hi;
    throw DomainError(os.str());
  }
}

/// 4th-order derivative of f on `domain`: central inside, one-sided within 2h of an end.
inline double fd_derivative(const SmoothFn1& f, double x, const Interval& domain) {
  const double h = 1e-5 * domain.length();
  if (x - 2 * h >= domain.a && x + 2 * h <= domain.b) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
  }
  if (x + 4 * h <= domain.b) {
    return (-25 * f(x) + 48 * f(x + h) - 36 * f(x + 2 * h) + 16 * f(x + 3 * h) - 3 * f(x + 4 * h)) / (12 * h);
  }
  return (25 * f(x) - 48 * f(x - h) + 36 * f(x - 2 * h) - 16 * f(x - 3 * h) + 3 * f(x - 4 * h)) / (12 * h);
}

inline double derivative_at(const SmoothFn1& f, double x, const VariableOrder& alpha, CaputoFallback fb) {
  if (f.has_derivative()) return f.derivative(x);
  if (fb == CaputoFallback::forbid) {
    throw ConfigurationError("Caputo derivative needs df/dt: supply an analytic derivative or enable the fallback");
  }
  return fd_derivative(f, x, alpha.domain());
}

/**
 * dF/dt at t for F smooth on the far side and ~ (distance)^(1−α) at `singular_end`.
 * `far_end` bounds the stencil on the other side.
 */
template <class F>
double stencil_derivative(F&& F_at, double t, double singular_end, double far_end, double h, StencilMode mode,
                          std::string_view op) {
  const double dir = far_end > singular_end ? 1.0 : -1.0;  // direction from the singular end into the domain
  const double d_sing = std::abs(t - singular_end);
  const double d_far = std::abs(far_end - t);
  if (!(d_sing > 0.0)) {
    std::ostringstream os;
    os << op << ": RL derivative is undefined at the base point t = " << t;
    throw DomainError(os.str());
  }
  auto central = [&](double step) {
    return (F_at(t - 2 * step) - 8 * F_at(t - step) + 8 * F_at(t + step) - F_at(t + 2 * step)) / (12 * step);
  };
  if (mode == StencilMode::central) {
    if (2 * h >= d_sing || 2 * h > d_far) {
      std::ostringstream os;
      os << op << ": 5-point stencil with h = " << h << " leaves the interval at t = " << t
         << "; use a smaller h or the adaptive stencil";
      throw DomainError(os.str());
    }
    return central(h);
  }
  const double step = std::min(h, d_sing / 16.0);
  if (2 * step <= d_far) return central(step);
  // One-sided, stepping back towards the singular end; t − 4s stays at least d_sing/2 away from it.
  const double s = dir * step;
  return (25 * F_at(t) - 48 * F_at(t - s) + 36 * F_at(t - 2 * s) - 16 * F_at(t - 3 * s) + 3 * F_at(t - 4 * s)) /
         (12 * s);
}

inline double default_step(const VariableOrder& alpha, const OperatorOptions& opt) {
  if (opt.step < 0.0) throw DomainError("RL derivative step must be positive");
  return opt.step > 0.0 ? opt.step : 1e-4 * alpha.domain().length();
}

}  // namespace detail

/// ₐI_t^{α(·,·)} f(t) = ∫_a^t (t−τ)^(α(t,τ)−1)/Γ(α(t,τ)) f(τ) dτ.
inline double left_rl_integral(const SmoothFn1& f, const VariableOrder& alpha, double a, double t,
                               const QuadConfig& cfg = {}) {
  detail::require_ordered(a, t, "left_rl_integral");
  detail::require_inside(alpha, a, t, "left_rl_integral");
  return singular_integral({alpha, Side::left, WeightShift::integral}, f.value_fn(), a, t, cfg);
}

/// ₜI_b^{α(·,·)} f(t) = ∫_t^b (τ−t)^(α(τ,t)−1)/Γ(α(τ,t)) f(τ) dτ.
inline double right_rl_integral(const SmoothFn1& f, const VariableOrder& alpha, double t, double b,
                                const QuadConfig& cfg = {}) {
  detail::require_ordered(t, b, "right_rl_integral");
  detail::require_inside(alpha, t, b, "right_rl_integral");
  return singular_integral({alpha, Side::right, WeightShift::integral}, f.value_fn(), t, b, cfg);
}

/// ₐD_t^{α(·,·)} f(t) = d/dt ₐI_t^{1−α(·,·)} f(t).
inline double left_rl_derivative(const SmoothFn1& f, const VariableOrder& alpha, double a, double t,
                                 const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  detail::require_ordered(a, t, "left_rl_derivative");
  detail::require_inside(alpha, a, t, "left_rl_derivative");
  const SingularKernelSpec spec{alpha, Side::left, WeightShift::derivative};
  auto F = [&](double s) { return singular_integral(spec, f.value_fn(), a, s, cfg); };
  return detail::stencil_derivative(F, t, a, alpha.domain().b, detail::default_step(alpha, opt), opt.stencil,
                                    "left_rl_derivative");
}

/// ₜD_b^{α(·,·)} f(t) = −d/dt ₜI_b^{1−α(·,·)} f(t).
inline double right_rl_derivative(const SmoothFn1& f, const VariableOrder& alpha, double t, double b,
                                  const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  detail::require_ordered(t, b, "right_rl_derivative");
  detail::require_inside(alpha, t, b, "right_rl_derivative");
  const SingularKernelSpec spec{alpha, Side::right, WeightShift::derivative};
  auto G = [&](double s) { return singular_integral(spec, f.value_fn(), s, b, cfg); };
  return -detail::stencil_derivative(G, t, b, alpha.domain().a, detail::default_step(alpha, opt), opt.stencil,
                                     "right_rl_derivative");
}

/// ᶜₐD_t^{α(·,·)} f(t) = ₐI_t^{1−α(·,·)} f′(t).
inline double left_caputo_derivative(const SmoothFn1& f, const VariableOrder& alpha, double a, double t,
                                     const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  detail::require_ordered(a, t, "left_caputo_derivative");
  detail::require_inside(alpha, a, t, "left_caputo_derivative");
  auto df = [&](double tau) { return detail::derivative_at(f, tau, alpha, opt.fallback); };
  return singular_integral({alpha, Side::left, WeightShift::derivative}, df, a, t, cfg);
}

/// ᶜₜD_b^{α(·,·)} f(t) = −ₜI_b^{1−α(·,·)} f′(t).
inline double right_caputo_derivative(const SmoothFn1& f, const VariableOrder& alpha, double t, double b,
                                      const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  detail::require_ordered(t, b, "right_caputo_derivative");
  detail::require_inside(alpha, t, b, "right_caputo_derivative");
  auto df = [&](double tau) { return detail::derivative_at(f, tau, alpha, opt.fallback); };
  return -singular_integral({alpha, Side::right, WeightShift::derivative}, df, t, b, cfg);
}

enum class OpKind { I_left, I_right, D_rl_left, D_rl_right, D_cap_left, D_cap_right };

inline std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::I_left: return "I_left";
    case OpKind::I_right: return "I_right";
    case OpKind::D_rl_left: return "D_rl_left";
    case OpKind::D_rl_right: return "D_rl_right";
    case OpKind::D_cap_left: return "D_cap_left";
    case OpKind::D_cap_right: return "D_cap_right";
  }
  return "unknown";
}

inline bool is_left(OpKind k) { return k == OpKind::I_left || k == OpKind::D_rl_left || k == OpKind::D_cap_left; }
inline bool is_caputo(OpKind k) { return k == OpKind::D_cap_left || k == OpKind::D_cap_right; }

struct OperatorValue {
  double value;
  /// The Caputo kernel was applied to a finite-difference derivative of f.
  bool derivative_fallback;
};

/// Applies `kind` at t on [a,b]: left kinds integrate over [a,t], right kinds over [t,b].
inline OperatorValue apply_operator(OpKind kind, const SmoothFn1& f, const VariableOrder& alpha, double t,
                                    const Interval& range, const QuadConfig& cfg = {},
                                    const OperatorOptions& opt = {}) {
  const bool fallback = is_caputo(kind) && !f.has_derivative();
  switch (kind) {
    case OpKind::I_left: return {left_rl_integral(f, alpha, range.a, t, cfg), false};
    case OpKind::I_right: return {right_rl_integral(f, alpha, t, range.b, cfg), false};
    case OpKind::D_rl_left: return {left_rl_derivative(f, alpha, range.a, t, cfg, opt), false};
    case OpKind::D_rl_right: return {right_rl_derivative(f, alpha, t, range.b, cfg, opt), false};
    case OpKind::D_cap_left: return {left_caputo_derivative(f, alpha, range.a, t, cfg, opt), fallback};
    case OpKind::D_cap_right: return {right_caputo_derivative(f, alpha, t, range.b, cfg, opt), fallback};
  }
  throw DomainError("apply_operator: unknown operator kind");
}

/// Partial operator along `axis` at p: the one-variable operator applied to the section through p.
inline double partial_op(OpKind kind, int axis, const SmoothFn2& f, const VariableOrder& alpha, Point2 p,
                         const Rect2& rect, const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  const Interval& range = rect.along(axis);
  const double t = axis == 1 ? p.t1 : p.t2;
  const double frozen = axis == 1 ? p.t2 : p.t1;
  const Interval& other = rect.along(3 - axis);
  if (!other.contains(frozen)) throw DomainError("partial_op: point lies outside the rectangle");
  return apply_operator(kind, f.section(axis, frozen), alpha, t, range, cfg, opt).value;
}

}  // namespace vofc
