/**
 * @file domain.hpp
 * @brief Domains, smooth inputs and variable fractional orders.
 *
 * Inputs are assumed C¹ (stronger than absolute continuity / L₁), so every
 * function type here is a plain callable with optional analytic derivatives.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "vofc/errors.hpp"

namespace vofc {

struct Interval {
  double a;
  double b;

  Interval(double lo, double hi) : a(lo), b(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      std::ostringstream os;
      os << "Interval: need a < b, got [" << lo << ", " << hi << "]";
      throw DomainError(os.str());
    }
  }

  double length() const noexcept { return b - a; }
  bool contains(double t) const noexcept { return t >= a && t <= b; }
  /// R(s) = a + b - s.
  double reflect(double s) const noexcept { return a + b - s; }
};

/// The rectangle Δ₂ = [a₁,b₁]×[a₂,b₂].
struct Rect2 {
  Interval t1;
  Interval t2;

  const Interval& along(int axis) const {
    if (axis == 1) return t1;
    if (axis == 2) return t2;
    throw DomainError("Rect2: axis must be 1 or 2");
  }
  double area() const noexcept { return t1.length() * t2.length(); }
};

struct Point2 {
  double t1;
  double t2;
};

/// Scalar function of one variable with an optional analytic derivative.
class SmoothFn1 {
 public:
  using Function = std::function<double(double)>;

  SmoothFn1(Function value, std::optional<Function> derivative = std::nullopt)
      : value_(std::move(value)), derivative_(std::move(derivative)) {}

  static SmoothFn1 constant(double c) {
    return {[c](double) { return c; }, Function([](double) { return 0.0; })};
  }

  double operator()(double t) const { return value_(t); }
  bool has_derivative() const noexcept { return derivative_.has_value(); }
  double derivative(double t) const {
    if (!derivative_) throw ConfigurationError("SmoothFn1: no analytic derivative supplied");
    return (*derivative_)(t);
  }

  const Function& value_fn() const noexcept { return value_; }
  const std::optional<Function>& derivative_fn() const noexcept { return derivative_; }

  /// f∘R with R(s) = a + b − s; the derivative picks up the chain-rule sign.
  SmoothFn1 reflected(const Interval& iv) const {
    const double sum = iv.a + iv.b;
    std::optional<Function> d;
    if (derivative_) d = [inner = *derivative_, sum](double s) { return -inner(sum - s); };
    return {[inner = value_, sum](double s) { return inner(sum - s); }, std::move(d)};
  }

 private:
  Function value_;
  std::optional<Function> derivative_;
};

/// Scalar function of two variables with optional analytic partials.
class SmoothFn2 {
 public:
  using Function = std::function<double(double, double)>;

  SmoothFn2(Function value, std::optional<Function> d_t1 = std::nullopt,
            std::optional<Function> d_t2 = std::nullopt)
      : value_(std::move(value)), d_t1_(std::move(d_t1)), d_t2_(std::move(d_t2)) {}

  static SmoothFn2 constant(double c) {
    auto zero = [](double, double) { return 0.0; };
    return {[c](double, double) { return c; }, Function(zero), Function(zero)};
  }

  double operator()(double t1, double t2) const { return value_(t1, t2); }
  bool has_partial(int axis) const noexcept { return axis == 1 ? d_t1_.has_value() : d_t2_.has_value(); }
  double partial(int axis, double t1, double t2) const {
    const auto& d = axis == 1 ? d_t1_ : d_t2_;
    if (!d) throw ConfigurationError("SmoothFn2: no analytic partial along axis " + std::to_string(axis));
    return (*d)(t1, t2);
  }

  const Function& value_fn() const noexcept { return value_; }
  const std::optional<Function>& partial_fn(int axis) const noexcept { return axis == 1 ? d_t1_ : d_t2_; }

  /// One-variable section along `axis` with the other coordinate frozen.
  SmoothFn1 section(int axis, double frozen) const {
    if (axis == 1) {
      std::optional<SmoothFn1::Function> d;
      if (d_t1_) d = [f = *d_t1_, frozen](double s) { return f(s, frozen); };
      return {[f = value_, frozen](double s) { return f(s, frozen); }, std::move(d)};
    }
    if (axis == 2) {
      std::optional<SmoothFn1::Function> d;
      if (d_t2_) d = [f = *d_t2_, frozen](double s) { return f(frozen, s); };
      return {[f = value_, frozen](double s) { return f(frozen, s); }, std::move(d)};
    }
    throw DomainError("SmoothFn2::section: axis must be 1 or 2");
  }

  /// (t1,t2) ↦ f(t2,t1) with partials exchanged.
  SmoothFn2 transposed() const {
    std::optional<Function> d1, d2;
    if (d_t2_) d1 = [f = *d_t2_](double x, double y) { return f(y, x); };
    if (d_t1_) d2 = [f = *d_t1_](double x, double y) { return f(y, x); };
    return {[f = value_](double x, double y) { return f(y, x); }, std::move(d1), std::move(d2)};
  }

 private:
  Function value_;
  std::optional<Function> d_t1_;
  std::optional<Function> d_t2_;
};

namespace detail {

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace detail

/// Compares an analytic derivative with a central difference at 16 random interior points.
inline void check_derivative_consistency(const SmoothFn1& f, const Interval& iv, double tolerance = 1e-6,
                                         std::uint64_t seed = 7) {
  if (!f.has_derivative()) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(iv.a + 0.05 * iv.length(), iv.b - 0.05 * iv.length());
  const double h = 1e-5 * iv.length();
  for (int i = 0; i < 16; ++i) {
    const double x = pick(rng);
    const double fd = detail::central_difference(f.value_fn(), x, h);
    if (std::abs(fd - f.derivative(x)) > tolerance) {
      std::ostringstream os;
      os << "SmoothFn1: derivative disagrees with finite difference at t=" << x << " (analytic "
         << f.derivative(x) << ", difference " << fd << ")";
      throw ValidityError(os.str());
    }
  }
}

inline void check_derivative_consistency(const SmoothFn2& f, const Rect2& rect, double tolerance = 1e-6,
                                         std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int axis = 1; axis <= 2; ++axis) {
    if (!f.has_partial(axis)) continue;
    const double h = 1e-5 * rect.along(axis).length();
    for (int i = 0; i < 16; ++i) {
      const double x = rect.t1.a + u(rng) * rect.t1.length();
      const double y = rect.t2.a + u(rng) * rect.t2.length();
      const double fd = axis == 1 ? (f(x + h, y) - f(x - h, y)) / (2 * h) : (f(x, y + h) - f(x, y - h)) / (2 * h);
      const double an = f.partial(axis, x, y);
      if (std::abs(fd - an) > tolerance) {
        std::ostringstream os;
        os << "SmoothFn2: partial along axis " << axis << " disagrees with finite difference at (" << x << ", "
           << y << ")";
        throw ValidityError(os.str());
      }
    }
  }
}

/// Which open interval the order must stay in.
enum class BoundMode {
  plain,             ///< 0 < α < 1
  above_one_over_l,  ///< 1/l < α < 1 (integration-by-parts regime)
  below_one_minus,   ///< 0 < α < 1 − 1/l (Green regime)
};

inline std::string_view to_string(BoundMode m) {
  switch (m) {
    case BoundMode::plain: return "plain";
    case BoundMode::above_one_over_l: return "above_one_over_l";
    case BoundMode::below_one_minus: return "below_one_minus";
  }
  return "unknown";
}

/// The exponent function α(t,τ) on domain×domain together with its declared bounds.
class VariableOrder {
 public:
  using Function = std::function<double(double, double)>;

  VariableOrder(Function fn, Interval domain, BoundMode mode = BoundMode::plain, int lower_gap = 2,
                int validation_grid = 64)
      : fn_(std::move(fn)), domain_(domain), mode_(mode), lower_gap_(lower_gap) {
    if (lower_gap_ < 2) throw ValidityError("VariableOrder: lower gap l must be >= 2");
    validate(validation_grid);
  }

  static VariableOrder constant(double value, Interval domain, BoundMode mode = BoundMode::plain,
                                int lower_gap = 2) {
    VariableOrder v([value](double, double) { return value; }, domain, mode, lower_gap, 2);
    v.constant_ = value;
    return v;
  }

  double operator()(double t, double tau) const { return constant_ ? *constant_ : fn_(t, tau); }

  const Interval& domain() const noexcept { return domain_; }
  BoundMode mode() const noexcept { return mode_; }
  int lower_gap() const noexcept { return lower_gap_; }
  std::optional<double> constant_value() const noexcept { return constant_; }

  /// Open interval the values must lie in.
  std::pair<double, double> bounds() const noexcept {
    const double inv = 1.0 / lower_gap_;
    switch (mode_) {
      case BoundMode::above_one_over_l: return {inv, 1.0};
      case BoundMode::below_one_minus: return {0.0, 1.0 - inv};
      case BoundMode::plain: break;
    }
    return {0.0, 1.0};
  }

  /// α̃(u,v) = α(a+b−v, a+b−u): the order seen by a left operator after reflecting the interval.
  VariableOrder reflected() const {
    const double sum = domain_.a + domain_.b;
    VariableOrder r(*this);
    if (!constant_) r.fn_ = [f = fn_, sum](double u, double v) { return f(sum - v, sum - u); };
    return r;
  }

  /// Throws ValidityError unless the declared mode is `required`.
  void require_mode(BoundMode required, std::string_view hypothesis) const {
    if (mode_ != required) {
      std::ostringstream os;
      os << "order declared in bound mode " << to_string(mode_) << " but " << hypothesis << " requires "
         << to_string(required);
      throw ValidityError(os.str());
    }
  }

 private:
  void validate(int grid) const {
    if (grid < 2) grid = 2;
    const auto [lo, hi] = bounds();
    for (int i = 0; i < grid; ++i) {
      const double t = domain_.a + domain_.length() * i / (grid - 1);
      for (int j = 0; j < grid; ++j) {
        const double tau = domain_.a + domain_.length() * j / (grid - 1);
        const double v = fn_(t, tau);
        if (!(v > lo && v < hi)) {
          std::ostringstream os;
          os << "variable order alpha(" << t << ", " << tau << ") = " << v << " lies outside (" << lo << ", "
             << hi << ") required by bound mode " << to_string(mode_) << " with l = " << lower_gap_;
          throw ValidityError(os.str());
        }
      }
    }
  }

  Function fn_;
  Interval domain_;
  BoundMode mode_;
  int lower_gap_;
  std::optional<double> constant_;
};

}  // namespace vofc
