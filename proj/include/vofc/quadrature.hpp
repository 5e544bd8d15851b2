/**
 * @file quadrature.hpp
 * @brief Weakly singular quadrature for variable-order kernels.
 *
 * The integrals handled here have the form
 *
 *     ∫ (distance to t)^(β−1) / Γ(β) · h(τ) dτ,    β = β(t,τ) ∈ (0,1),
 *
 * where the exponent changes with τ, so no fixed Jacobi-weight rule applies.
 * With s = |t − τ| the singularity sits at s = 0. The range [0,S] is split
 * into geometrically graded panels [qᵏS, qᵏ⁻¹S], k = 1..K, each integrated
 * by Gauss–Legendre; the innermost piece [0, qᴷS] is integrated in closed
 * form with h and β frozen at s = 0 (error O((qᴷS)^(β+1))).
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "vofc/domain.hpp"
#include "vofc/errors.hpp"
#include "vofc/specialfn.hpp"

namespace vofc {

/// Graded-mesh parameters of the singular quadrature.
struct QuadConfig {
  int panels = 24;
  int nodes_per_panel = 10;
  double grading = 0.3;

  void validate() const {
    if (panels < 1) throw DomainError("QuadConfig: panels must be >= 1");
    if (nodes_per_panel < 2) throw DomainError("QuadConfig: nodes_per_panel must be >= 2");
    if (nodes_per_panel > kMaxNodes) throw DomainError("QuadConfig: nodes_per_panel must be <= 256");
    if (!(grading > 0.0 && grading < 1.0)) throw DomainError("QuadConfig: grading must lie in (0,1)");
  }

  static constexpr int kMaxNodes = 256;
};

/// Nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached n-point Gauss–Legendre rule, 1 <= n <= 256. Thread-safe.
inline const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > QuadConfig::kMaxNodes) throw DomainError("gauss_legendre: node count must lie in [1, 256]");
  static std::array<std::once_flag, QuadConfig::kMaxNodes + 1> flags;
  static std::array<std::unique_ptr<GaussRule>, QuadConfig::kMaxNodes + 1> rules;
  std::call_once(flags[n], [n] { rules[n] = std::make_unique<GaussRule>(detail::make_gauss_legendre(n)); });
  return *rules[n];
}

/// Which side of t the integration range lies on.
enum class Side { left, right };

/// integral: kernel exponent β = α; derivative: β = 1 − α (the inner integral of D and ᶜD).
enum class WeightShift { integral, derivative };

struct SingularKernelSpec {
  const VariableOrder& order;
  Side side;
  WeightShift shift;

  /// Exponent of the effective kernel at (t, τ). Right kernels read the order transposed.
  double exponent(double t, double tau) const {
    const double alpha = side == Side::left ? order(t, tau) : order(tau, t);
    return shift == WeightShift::integral ? alpha : 1.0 - alpha;
  }
};

namespace detail {

[[noreturn]] inline void throw_bad_exponent(const SingularKernelSpec& spec, double t, double tau, double beta) {
  std::ostringstream os;
  const bool left = spec.side == Side::left;
  os.precision(17);
  os << "kernel exponent " << beta << " outside (0,1) at alpha(" << (left ? t : tau) << ", " << (left ? tau : t)
     << ")";
  throw ValidityError(os.str());
}

}  // namespace detail

/**
 * Calls visit(τ, ω) for every node of the graded rule over [lo, hi], so that
 * Σ ω·h(τ) approximates the singular integral of h (see singular_integral).
 * The closed-form innermost piece is reported as a node at τ = t.
 * An empty range visits nothing.
 */
template <class Visitor>
void visit_singular_nodes(const SingularKernelSpec& spec, double lo, double hi, const QuadConfig& cfg,
                          Visitor&& visit) {
  cfg.validate();
  if (!(lo <= hi)) {
    std::ostringstream os;
    os << "singular_integral: empty or reversed range [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
  if (lo == hi) return;

  const bool left = spec.side == Side::left;
  const double t = left ? hi : lo;
  const double dir = left ? -1.0 : 1.0;
  const GaussRule& rule = gauss_legendre(cfg.nodes_per_panel);
  const auto fixed = spec.order.constant_value();
  const double fixed_beta = fixed ? (spec.shift == WeightShift::integral ? *fixed : 1.0 - *fixed) : 0.0;
  if (fixed && !(fixed_beta > 0.0 && fixed_beta < 1.0)) detail::throw_bad_exponent(spec, t, t, fixed_beta);
  const double fixed_inv_gamma = fixed ? 1.0 / gamma(fixed_beta) : 0.0;

  double upper = hi - lo;
  for (int k = 0; k < cfg.panels; ++k) {
    const double lower = upper * cfg.grading;
    const double half = 0.5 * (upper - lower);
    const double mid = 0.5 * (upper + lower);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = mid + half * rule.nodes[i];
      const double tau = t + dir * s;
      double kernel;
      if (fixed) {
        kernel = std::pow(s, fixed_beta - 1.0) * fixed_inv_gamma;
      } else {
        const double beta = spec.exponent(t, tau);
        if (!(beta > 0.0 && beta < 1.0)) detail::throw_bad_exponent(spec, t, tau, beta);
        kernel = std::pow(s, beta - 1.0) / gamma(beta);
      }
      visit(tau, half * rule.weights[i] * kernel);
    }
    upper = lower;
  }
  const double beta0 = fixed ? fixed_beta : spec.exponent(t, t);
  if (!(beta0 > 0.0 && beta0 < 1.0)) detail::throw_bad_exponent(spec, t, t, beta0);
  visit(t, std::pow(upper, beta0) / gamma(beta0 + 1.0));
}

/**
 * Singular integral over [lo, hi].
 *
 * Side::left integrates ∫_lo^hi (hi−τ)^(β(hi,τ)−1)/Γ(β) h(τ) dτ (the free point is t = hi);
 * Side::right integrates ∫_lo^hi (τ−lo)^(β(τ,lo)−1)/Γ(β) h(τ) dτ (the free point is t = lo).
 * An empty range returns 0.
 */
template <class H>
double singular_integral(const SingularKernelSpec& spec, H&& h, double lo, double hi, const QuadConfig& cfg) {
  double sum = 0.0;
  visit_singular_nodes(spec, lo, hi, cfg, [&](double tau, double w) { sum += w * h(tau); });
  return sum;
}

enum class Orientation : int { forward = 1, backward = -1 };

/// orientation · ∫_lo^hi h(s) ds by composite Gauss–Legendre (cfg.panels uniform panels).
template <class H>
double line_integral_edge(H&& h, double lo, double hi, Orientation orientation, const QuadConfig& cfg) {
  cfg.validate();
  if (!(lo < hi)) throw DomainError("line_integral_edge: need lo < hi");
  const GaussRule& rule = gauss_legendre(cfg.nodes_per_panel);
  const double width = (hi - lo) / cfg.panels;
  double sum = 0.0;
  for (int p = 0; p < cfg.panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) panel += rule.weights[i] * h(mid + 0.5 * width * rule.nodes[i]);
    sum += 0.5 * width * panel;
  }
  return static_cast<int>(orientation) * sum;
}

/// One-dimensional rule for the outer (non-singular) integrals.
struct OuterRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/**
 * n-point Gauss–Legendre rule on `iv` after the endpoint-clustering map
 * x = a + (b−a)·w(s), w(s) = I_s(p,p) (regularised incomplete beta with integer p).
 *
 * An endpoint factor (x−a)^γ becomes s^(p(γ+1)−1), so the cusps produced by
 * fractional operators at the interval ends no longer limit convergence.
 * clustering = 1 gives plain Gauss–Legendre.
 */
inline OuterRule outer_rule(const Interval& iv, int n, int clustering = 3) {
  if (n < 1) throw DomainError("outer_rule: need at least one node");
  if (clustering < 1 || clustering > 8) throw DomainError("outer_rule: clustering exponent must lie in [1, 8]");
  const GaussRule& g = gauss_legendre(n);
  const int p = clustering;
  const int m = 2 * p - 1;
  // Binomial coefficients of degree m and the beta normaliser 1/B(p,p) = (2p−1)·C(2p−2, p−1).
  std::vector<double> binom(m + 1, 1.0);
  for (int j = 1; j <= m; ++j) binom[j] = binom[j - 1] * (m - j + 1) / j;
  double norm = m;
  for (int j = 1; j <= p - 1; ++j) norm *= static_cast<double>(m - j) / j;

  OuterRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (g.nodes[i] + 1.0);
    const double ws = 0.5 * g.weights[i];
    double w = 0.0;
    for (int j = p; j <= m; ++j) w += binom[j] * std::pow(s, j) * std::pow(1.0 - s, m - j);
    const double dw = norm * std::pow(s * (1.0 - s), p - 1);
    r.nodes[i] = iv.a + iv.length() * w;
    r.weights[i] = iv.length() * dw * ws;
  }
  return r;
}

}  // namespace vofc
