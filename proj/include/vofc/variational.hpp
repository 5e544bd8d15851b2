/**
 * @file variational.hpp
 * @brief Two-dimensional variable-order variational problems.
 *
 * J[u] = ∬ L(t, u(t), ᶜD_{t₁}^{α₁}u(t), ᶜD_{t₂}^{α₂}u(t)) dt₂ dt₁ over a rectangle with u = ψ on the
 * boundary. Stationary points satisfy
 *
 *   ∂₂L + _{t₁}D_{b₁}^{α₁} ∂₃L + _{t₂}D_{b₂}^{α₂} ∂₄L = 0,
 *
 * where ∂ᵢL is evaluated along u. The Ritz solver minimises J over
 * lift + span{sin(kπŝ₁)·sin(mπŝ₂)}, ŝ being normalised coordinates.
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vofc/domain.hpp"
#include "vofc/errors.hpp"
#include "vofc/identities.hpp"
#include "vofc/operators.hpp"
#include "vofc/optimizer.hpp"
#include "vofc/parallel.hpp"
#include "vofc/quadrature.hpp"

namespace vofc {

/// L(t₁, t₂, u, d₁, d₂) together with its partials in the u, d₁ and d₂ slots.
class Lagrangian {
 public:
  using Function = std::function<double(double, double, double, double, double)>;

  /// Checks each partial against a central difference of L at 32 seeded points of
  /// sample × [−1,1]³; the allowed error is 1e-6·max(1, |partial|).
  Lagrangian(Function L, Function dL_du, Function dL_dd1, Function dL_dd2,
             const Rect2& sample = Rect2{{0.0, 1.0}, {0.0, 1.0}})
      : L_(std::move(L)), du_(std::move(dL_du)), dd1_(std::move(dL_dd1)), dd2_(std::move(dL_dd2)) {
    validate(sample);
  }

  double operator()(double t1, double t2, double u, double d1, double d2) const { return L_(t1, t2, u, d1, d2); }
  double du(double t1, double t2, double u, double d1, double d2) const { return du_(t1, t2, u, d1, d2); }
  double dd1(double t1, double t2, double u, double d1, double d2) const { return dd1_(t1, t2, u, d1, d2); }
  double dd2(double t1, double t2, double u, double d1, double d2) const { return dd2_(t1, t2, u, d1, d2); }

  /// d₁² + d₂² + u²
  static Lagrangian quadratic() {
    return {[](double, double, double u, double d1, double d2) { return d1 * d1 + d2 * d2 + u * u; },
            [](double, double, double u, double, double) { return 2.0 * u; },
            [](double, double, double, double d1, double) { return 2.0 * d1; },
            [](double, double, double, double, double d2) { return 2.0 * d2; }};
  }

  /// d₁² + d₂²
  static Lagrangian dirichlet() {
    return {[](double, double, double, double d1, double d2) { return d1 * d1 + d2 * d2; },
            [](double, double, double, double, double) { return 0.0; },
            [](double, double, double, double d1, double) { return 2.0 * d1; },
            [](double, double, double, double, double d2) { return 2.0 * d2; }};
  }

  /// σ(t₂)·d₂² − tension·d₁²: axis 1 is time, axis 2 is space.
  static Lagrangian string(const SmoothFn1& sigma, double tension, const Rect2& sample = Rect2{{0.0, 1.0}, {0.0, 1.0}}) {
    if (!(tension > 0.0) || !std::isfinite(tension)) throw DomainError("string Lagrangian: tension must be positive");
    auto s = sigma.value_fn();
    return {[s, tension](double, double t2, double, double d1, double d2) { return s(t2) * d2 * d2 - tension * d1 * d1; },
            [](double, double, double, double, double) { return 0.0; },
            [tension](double, double, double, double d1, double) { return -2.0 * tension * d1; },
            [s](double, double t2, double, double, double d2) { return 2.0 * s(t2) * d2; }, sample};
  }

 private:
  void validate(const Rect2& sample) const {
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    static constexpr const char* kSlots[] = {"dL/du", "dL/dd1", "dL/dd2"};
    for (int n = 0; n < 32; ++n) {
      double x[5] = {sample.t1.a + sample.t1.length() * unit(rng), sample.t2.a + sample.t2.length() * unit(rng),
                     2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0};
      const Function* partials[] = {&du_, &dd1_, &dd2_};
      for (int slot = 0; slot < 3; ++slot) {
        const int i = slot + 2;
        const double h = 1e-5 * (1.0 + std::abs(x[i]));
        double xp[5], xm[5];
        std::copy(x, x + 5, xp);
        std::copy(x, x + 5, xm);
        xp[i] += h;
        xm[i] -= h;
        const double fd = (L_(xp[0], xp[1], xp[2], xp[3], xp[4]) - L_(xm[0], xm[1], xm[2], xm[3], xm[4])) / (2 * h);
        const double an = (*partials[slot])(x[0], x[1], x[2], x[3], x[4]);
        if (!(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)))) {
          std::ostringstream os;
          os.precision(10);
          os << "Lagrangian: " << kSlots[slot] << " disagrees with a finite difference of L at (" << x[0] << ", "
             << x[1] << ", " << x[2] << ", " << x[3] << ", " << x[4] << "): " << an << " vs " << fd;
          throw ConfigurationError(os.str());
        }
      }
    }
  }

  Function L_, du_, dd1_, dd2_;
};

/// Boundary trace ψ given edge by edge. Bottom/top are functions of t₁, left/right of t₂.
struct BoundaryData {
  SmoothFn1 bottom;
  SmoothFn1 right;
  SmoothFn1 top;
  SmoothFn1 left;

  static BoundaryData constant(double c) {
    return {SmoothFn1::constant(c), SmoothFn1::constant(c), SmoothFn1::constant(c), SmoothFn1::constant(c)};
  }

  /// Traces of a function defined on the whole rectangle.
  static BoundaryData from_function(const SmoothFn2& psi, const Rect2& rect) {
    return {psi.section(1, rect.t2.a), psi.section(2, rect.t1.b), psi.section(1, rect.t2.b), psi.section(2, rect.t1.a)};
  }

  /// Throws DomainError when adjacent edges disagree at a corner by more than 1e-12.
  void check_corners(const Rect2& rect) const {
    const Interval& x = rect.t1;
    const Interval& y = rect.t2;
    const struct {
      const char* name;
      double p, q;
    } corners[] = {{"(a1, a2)", bottom(x.a), left(y.a)},
                   {"(b1, a2)", bottom(x.b), right(y.a)},
                   {"(b1, b2)", top(x.b), right(y.b)},
                   {"(a1, b2)", top(x.a), left(y.b)}};
    for (const auto& c : corners) {
      if (!(std::abs(c.p - c.q) <= 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "boundary data disagree at corner " << c.name << ": " << c.p << " vs " << c.q;
        throw DomainError(os.str());
      }
    }
  }
};

namespace detail {

inline double edge_derivative(const SmoothFn1& f, double s, const Interval& iv) {
  return f.has_derivative() ? f.derivative(s) : fd_derivative(f, s, iv);
}

}  // namespace detail

/// Transfinite (Coons) interpolant of ψ, with analytic partials when the edges have derivatives.
inline SmoothFn2 coons_lift(const BoundaryData& psi, const Rect2& rect) {
  psi.check_corners(rect);
  const Interval x = rect.t1, y = rect.t2;
  const double c00 = psi.bottom(x.a), c10 = psi.bottom(x.b), c01 = psi.top(x.a), c11 = psi.top(x.b);
  auto value = [psi, x, y, c00, c10, c01, c11](double t1, double t2) {
    const double s = (t1 - x.a) / x.length(), r = (t2 - y.a) / y.length();
    return (1 - r) * psi.bottom(t1) + r * psi.top(t1) + (1 - s) * psi.left(t2) + s * psi.right(t2) -
           ((1 - s) * (1 - r) * c00 + s * (1 - r) * c10 + (1 - s) * r * c01 + s * r * c11);
  };
  auto d1 = [psi, x, y, c00, c10, c01, c11](double t1, double t2) {
    const double r = (t2 - y.a) / y.length();
    return (1 - r) * detail::edge_derivative(psi.bottom, t1, x) + r * detail::edge_derivative(psi.top, t1, x) +
           (psi.right(t2) - psi.left(t2) - (1 - r) * (c10 - c00) - r * (c11 - c01)) / x.length();
  };
  auto d2 = [psi, x, y, c00, c10, c01, c11](double t1, double t2) {
    const double s = (t1 - x.a) / x.length();
    return (1 - s) * detail::edge_derivative(psi.left, t2, y) + s * detail::edge_derivative(psi.right, t2, y) +
           (psi.top(t1) - psi.bottom(t1) - (1 - s) * (c01 - c00) - s * (c11 - c10)) / y.length();
  };
  return {value, SmoothFn2::Function(d1), SmoothFn2::Function(d2)};
}

/// u together with its two left Caputo partials at one point.
struct FieldValue {
  double u = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Point ↦ (u, ᶜD₁u, ᶜD₂u). Caputo partials are linear, so fields combine pointwise.
using CaputoField = std::function<FieldValue(Point2)>;

/// Field of a general function through the partial-operator layer.
inline CaputoField caputo_field(const SmoothFn2& u, const VariableOrder& alpha1, const VariableOrder& alpha2,
                                const Rect2& rect, const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  return [u, &alpha1, &alpha2, rect, cfg, opt](Point2 p) {
    return FieldValue{u(p.t1, p.t2), partial_op(OpKind::D_cap_left, 1, u, alpha1, p, rect, cfg, opt),
                      partial_op(OpKind::D_cap_left, 2, u, alpha2, p, rect, cfg, opt)};
  };
}

/// a + eps·b
inline CaputoField combine(CaputoField a, CaputoField b, double eps) {
  return [a = std::move(a), b = std::move(b), eps](Point2 p) {
    const FieldValue x = a(p), y = b(p);
    return FieldValue{x.u + eps * y.u, x.d1 + eps * y.d1, x.d2 + eps * y.d2};
  };
}

/// Lift plus n×n sine modes on a rectangle. Mode index j = (k−1)·n + (m−1) for φ_km.
class RitzBasis {
 public:
  RitzBasis(SmoothFn2 lift, int n_modes, const Rect2& rect) : lift_(std::move(lift)), n_(n_modes), rect_(rect) {
    if (n_modes < 1) throw DomainError("RitzBasis: n_modes must be >= 1");
  }

  int n_modes() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  const Rect2& rect() const noexcept { return rect_; }
  const SmoothFn2& lift() const noexcept { return lift_; }
  std::pair<int, int> mode(std::size_t j) const { return {static_cast<int>(j) / n_ + 1, static_cast<int>(j) % n_ + 1}; }

  /// φ_km as a function with analytic partials.
  SmoothFn2 phi(std::size_t j) const {
    const auto [k, m] = mode(j);
    const Interval x = rect_.t1, y = rect_.t2;
    const double wk = k * std::numbers::pi / x.length(), wm = m * std::numbers::pi / y.length();
    return {[=](double t1, double t2) { return std::sin(wk * (t1 - x.a)) * std::sin(wm * (t2 - y.a)); },
            SmoothFn2::Function(
                [=](double t1, double t2) { return wk * std::cos(wk * (t1 - x.a)) * std::sin(wm * (t2 - y.a)); }),
            SmoothFn2::Function(
                [=](double t1, double t2) { return wm * std::sin(wk * (t1 - x.a)) * std::cos(wm * (t2 - y.a)); })};
  }

  /// Lift and every mode evaluated at one point.
  struct NodeData {
    FieldValue lift;
    std::vector<FieldValue> modes;
  };

  /// One singular-kernel pass per axis serves the lift and all modes.
  NodeData evaluate(Point2 p, const VariableOrder& alpha1, const VariableOrder& alpha2, const QuadConfig& cfg) const {
    const Interval x = rect_.t1, y = rect_.t2;
    if (!x.contains(p.t1) || !y.contains(p.t2)) throw DomainError("RitzBasis: point lies outside the rectangle");
    const double w1 = std::numbers::pi / x.length(), w2 = std::numbers::pi / y.length();

    // For axis 1: A = I^{1−α₁}[∂₁lift(·,t₂)](t₁), C_k = I^{1−α₁}[kω₁cos(kω₁(·−a₁))](t₁).
    std::vector<double> c1(n_, 0.0), c2(n_, 0.0), cosines(n_);
    double a1 = 0.0, a2 = 0.0;
    auto accumulate = [&](int axis, double tau, double w) {
      const double lo = axis == 1 ? x.a : y.a;
      const double om = axis == 1 ? w1 : w2;
      std::vector<double>& c = axis == 1 ? c1 : c2;
      (axis == 1 ? a1 : a2) += w * (axis == 1 ? lift_.partial(1, tau, p.t2) : lift_.partial(2, p.t1, tau));
      chebyshev_cosines(om * (tau - lo), cosines);
      for (int k = 0; k < n_; ++k) c[k] += w * (k + 1) * om * cosines[k];
    };
    visit_singular_nodes({alpha1, Side::left, WeightShift::derivative}, x.a, p.t1, cfg,
                         [&](double tau, double w) { accumulate(1, tau, w); });
    visit_singular_nodes({alpha2, Side::left, WeightShift::derivative}, y.a, p.t2, cfg,
                         [&](double tau, double w) { accumulate(2, tau, w); });

    NodeData out;
    out.lift = {lift_(p.t1, p.t2), a1, a2};
    out.modes.resize(size());
    for (int k = 1; k <= n_; ++k) {
      const double s1 = std::sin(k * w1 * (p.t1 - x.a));
      for (int m = 1; m <= n_; ++m) {
        const double s2 = std::sin(m * w2 * (p.t2 - y.a));
        out.modes[(k - 1) * n_ + (m - 1)] = {s1 * s2, c1[k - 1] * s2, s1 * c2[m - 1]};
      }
    }
    return out;
  }

  static FieldValue contract(const NodeData& d, const std::vector<double>& coeffs) {
    FieldValue f = d.lift;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      f.u += coeffs[j] * d.modes[j].u;
      f.d1 += coeffs[j] * d.modes[j].d1;
      f.d2 += coeffs[j] * d.modes[j].d2;
    }
    return f;
  }

 private:
  /// cos(kθ), k = 1..n, by the three-term recurrence.
  static void chebyshev_cosines(double theta, std::vector<double>& out) {
    const double c = std::cos(theta);
    double prev = 1.0, cur = c;
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = cur;
      const double next = 2.0 * c * cur - prev;
      prev = cur;
      cur = next;
    }
  }

  SmoothFn2 lift_;
  int n_;
  Rect2 rect_;
};

/// u = lift + Σ c_j φ_j; equals ψ on the boundary for every choice of coefficients.
struct RitzExpansion {
  RitzBasis basis;
  std::vector<double> coeffs;

  RitzExpansion(RitzBasis b, std::vector<double> c) : basis(std::move(b)), coeffs(std::move(c)) {
    if (coeffs.size() != basis.size()) throw DomainError("RitzExpansion: need one coefficient per mode");
  }

  /// u as a general function (analytic partials included).
  SmoothFn2 as_function() const {
    std::vector<SmoothFn2> phis;
    for (std::size_t j = 0; j < basis.size(); ++j) phis.push_back(basis.phi(j));
    auto sum = [lift = basis.lift(), phis, c = coeffs](int which, double t1, double t2) {
      double v = which == 0 ? lift(t1, t2) : lift.partial(which, t1, t2);
      for (std::size_t j = 0; j < phis.size(); ++j) v += c[j] * (which == 0 ? phis[j](t1, t2) : phis[j].partial(which, t1, t2));
      return v;
    };
    return {[sum](double a, double b) { return sum(0, a, b); },
            SmoothFn2::Function([sum](double a, double b) { return sum(1, a, b); }),
            SmoothFn2::Function([sum](double a, double b) { return sum(2, a, b); })};
  }
};

/// Field of a Ritz expansion through the one-pass basis evaluation.
inline CaputoField caputo_field(const RitzExpansion& u, const VariableOrder& alpha1, const VariableOrder& alpha2,
                                const QuadConfig& cfg = {}) {
  return [u, &alpha1, &alpha2, cfg](Point2 p) {
    return RitzBasis::contract(u.basis.evaluate(p, alpha1, alpha2, cfg), u.coeffs);
  };
}

/// J[u] = ∬ L(t, u, ᶜD₁u, ᶜD₂u) on the tensor outer rule.
inline double functional_eval(const Lagrangian& L, const CaputoField& u, const Rect2& rect, int outer_grid) {
  return integrate_rect(rect, outer_grid, [&](double t1, double t2) {
    const FieldValue f = u({t1, t2});
    return L(t1, t2, f.u, f.d1, f.d2);
  });
}

inline double functional_eval(const Lagrangian& L, const SmoothFn2& u, const VariableOrder& alpha1,
                              const VariableOrder& alpha2, const Rect2& rect, int outer_grid,
                              const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  return functional_eval(L, caputo_field(u, alpha1, alpha2, rect, cfg, opt), rect, outer_grid);
}

inline double functional_eval(const Lagrangian& L, const RitzExpansion& u, const VariableOrder& alpha1,
                              const VariableOrder& alpha2, int outer_grid, const QuadConfig& cfg = {}) {
  return functional_eval(L, caputo_field(u, alpha1, alpha2, cfg), u.basis.rect(), outer_grid);
}

/// ∬ σ(x)(ᶜD_x u)² − tension·(ᶜD_t u)² with t along axis 1 and x along axis 2.
inline double string_action(const SmoothFn1& sigma, double tension, const CaputoField& u, const Rect2& rect,
                            int outer_grid) {
  return functional_eval(Lagrangian::string(sigma, tension, rect), u, rect, outer_grid);
}

/// Euler–Lagrange residual sampled at cell centres of an n×n grid.
struct ResidualField {
  std::vector<Point2> points;
  std::vector<double> values;
  double l2 = 0.0;  ///< sqrt(Σ R²·cell area)
};

namespace detail {

/// ∂ᵢL composed with u, as a function of the coordinate along `axis` with the other one frozen.
inline SmoothFn1 composed_section(const Lagrangian& L, const CaputoField& u, int slot, int axis, double frozen) {
  return SmoothFn1([&L, u, slot, axis, frozen](double s) {
    const double t1 = axis == 1 ? s : frozen;
    const double t2 = axis == 1 ? frozen : s;
    const FieldValue f = u({t1, t2});
    return slot == 3 ? L.dd1(t1, t2, f.u, f.d1, f.d2) : L.dd2(t1, t2, f.u, f.d1, f.d2);
  });
}

/// R(t) = ∂₂L + _{t₁}D_{b₁}^{α₁}∂₃L + _{t₂}D_{b₂}^{α₂}∂₄L at one interior point.
inline double el_residual_at(const Lagrangian& L, const CaputoField& u, const VariableOrder& alpha1,
                             const VariableOrder& alpha2, const Rect2& rect, Point2 p, const QuadConfig& cfg,
                             const OperatorOptions& opt) {
  const FieldValue f = u(p);
  const double r0 = L.du(p.t1, p.t2, f.u, f.d1, f.d2);
  const double r1 = right_rl_derivative(composed_section(L, u, 3, 1, p.t2), alpha1, p.t1, rect.t1.b, cfg, opt);
  const double r2 = right_rl_derivative(composed_section(L, u, 4, 2, p.t1), alpha2, p.t2, rect.t2.b, cfg, opt);
  return r0 + r1 + r2;
}

/// Throws PreconditionError if η is visibly nonzero on the boundary (64 samples per edge).
inline void require_zero_trace(const SmoothFn2& eta, const Rect2& rect) {
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    const double s1 = rect.t1.a + rect.t1.length() * i / kSamples;
    const double s2 = rect.t2.a + rect.t2.length() * i / kSamples;
    const Point2 probes[] = {{s1, rect.t2.a}, {s1, rect.t2.b}, {rect.t1.a, s2}, {rect.t1.b, s2}};
    for (const Point2& q : probes) {
      const double v = eta(q.t1, q.t2);
      if (!(std::abs(v) <= 1e-10)) {
        std::ostringstream os;
        os << "variation must vanish on the boundary; eta(" << q.t1 << ", " << q.t2 << ") = " << v;
        throw PreconditionError(os.str());
      }
    }
  }
}

}  // namespace detail

inline ResidualField el_residual(const Lagrangian& L, const CaputoField& u, const VariableOrder& alpha1,
                                 const VariableOrder& alpha2, const Rect2& rect, int point_grid,
                                 const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  if (point_grid < 1) throw DomainError("el_residual: point_grid must be >= 1");
  ResidualField r;
  const auto n = static_cast<std::size_t>(point_grid);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      r.points.push_back({rect.t1.a + rect.t1.length() * (i + 0.5) / point_grid,
                          rect.t2.a + rect.t2.length() * (j + 0.5) / point_grid});
  r.values = parallel::map_indices<double>(r.points.size(), [&](std::size_t k) {
    return detail::el_residual_at(L, u, alpha1, alpha2, rect, r.points[k], cfg, opt);
  });
  const double cell = rect.area() / static_cast<double>(n * n);
  double sum = 0.0;
  for (double v : r.values) sum += v * v * cell;
  r.l2 = std::sqrt(sum);
  return r;
}

/// δJ[u; η] = ∬ [∂₂L·η + ∂₃L·ᶜD₁η + ∂₄L·ᶜD₂η] for η vanishing on the boundary.
inline double first_variation(const Lagrangian& L, const CaputoField& u, const SmoothFn2& eta,
                              const VariableOrder& alpha1, const VariableOrder& alpha2, const Rect2& rect,
                              int outer_grid, const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  detail::require_zero_trace(eta, rect);
  const CaputoField e = caputo_field(eta, alpha1, alpha2, rect, cfg, opt);
  return integrate_rect(rect, outer_grid, [&](double t1, double t2) {
    const FieldValue f = u({t1, t2});
    const FieldValue v = e({t1, t2});
    return L.du(t1, t2, f.u, f.d1, f.d2) * v.u + L.dd1(t1, t2, f.u, f.d1, f.d2) * v.d1 +
           L.dd2(t1, t2, f.u, f.d1, f.d2) * v.d2;
  });
}

/// ∬ η·R: the variation after moving the Caputo operators onto ∂₃L, ∂₄L (no contour term for zero-trace η).
inline double transformed_variation(const Lagrangian& L, const CaputoField& u, const SmoothFn2& eta,
                                    const VariableOrder& alpha1, const VariableOrder& alpha2, const Rect2& rect,
                                    int outer_grid, const QuadConfig& cfg = {}, const OperatorOptions& opt = {}) {
  detail::require_zero_trace(eta, rect);
  return integrate_rect(rect, outer_grid, [&](double t1, double t2) {
    const double e = eta(t1, t2);
    return e == 0.0 ? 0.0 : e * detail::el_residual_at(L, u, alpha1, alpha2, rect, {t1, t2}, cfg, opt);
  });
}

struct RitzOptions {
  int n_modes = 4;
  int outer_grid = 20;
  int residual_grid = 8;
  QuadConfig quad{};
  OperatorOptions op{};
  OptimizerOptions optimizer{};
  /// Starting coefficients; empty means all zero.
  std::vector<double> initial{};
};

struct SolveReport {
  std::vector<double> coeffs;
  double J_value = 0.0;
  double el_residual_l2 = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool nonconvex_flag = false;
  bool converged = false;
};

/// Cached basis data on the outer rule: J(c) becomes a contraction plus L evaluations.
class RitzObjective {
 public:
  RitzObjective(const Lagrangian& L, const RitzBasis& basis, const VariableOrder& alpha1,
                const VariableOrder& alpha2, int outer_grid, const QuadConfig& cfg)
      : L_(L), rule_(basis.rect(), outer_grid) {
    nodes_ = parallel::map_indices<RitzBasis::NodeData>(
        rule_.size(), [&](std::size_t k) { return basis.evaluate(rule_.point(k), alpha1, alpha2, cfg); });
  }

  double operator()(const std::vector<double>& c) const {
    std::vector<double> v(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const Point2 p = rule_.point(k);
      const FieldValue f = RitzBasis::contract(nodes_[k], c);
      v[k] = L_(p.t1, p.t2, f.u, f.d1, f.d2);
    }
    return rule_.reduce(v);
  }

 private:
  Lagrangian L_;
  TensorRule rule_;
  std::vector<RitzBasis::NodeData> nodes_;
};

/// Minimises J over lift(ψ) + span of n×n modes. Maximisers are found by negating L.
inline SolveReport ritz_solve(const Lagrangian& L, const BoundaryData& psi, const VariableOrder& alpha1,
                              const VariableOrder& alpha2, const Rect2& rect, const RitzOptions& options = {}) {
  options.quad.validate();
  detail::require_rect_domain(alpha1, rect.t1, "alpha1");
  detail::require_rect_domain(alpha2, rect.t2, "alpha2");
  const RitzBasis basis(coons_lift(psi, rect), options.n_modes, rect);
  const RitzObjective J(L, basis, alpha1, alpha2, options.outer_grid, options.quad);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  if (!options.initial.empty()) {
    if (options.initial.size() != basis.size()) throw DomainError("ritz_solve: initial guess has the wrong length");
    for (std::size_t j = 0; j < basis.size(); ++j) x0[static_cast<Eigen::Index>(j)] = options.initial[j];
  }
  const QuasiNewton qn(
      [&J](const Eigen::VectorXd& x) { return J(std::vector<double>(x.data(), x.data() + x.size())); },
      options.optimizer);
  const OptimizerResult res = qn.minimize(x0);

  SolveReport r;
  r.coeffs.assign(res.x.data(), res.x.data() + res.x.size());
  r.J_value = res.value;
  r.gradient_norm = res.gradient_norm;
  r.iterations = res.iterations;
  r.nonconvex_flag = res.nonconvex;
  r.converged = res.converged;
  const RitzExpansion u(basis, r.coeffs);
  r.el_residual_l2 =
      el_residual(L, caputo_field(u, alpha1, alpha2, options.quad), alpha1, alpha2, rect, options.residual_grid,
                  options.quad, options.op)
          .l2;
  return r;
}

}  // namespace vofc
