/**
 * @file instances.hpp
 * @brief Seeded random polynomial instances for property checks.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vofc/domain.hpp"

namespace vofc::instances {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Σ c_k t^k with c_k ∈ [−1,1], analytic derivative included.
inline SmoothFn1 random_poly1(Rng& rng, int degree) {
  std::vector<double> c(degree + 1);
  for (double& x : c) x = uniform(rng, -1.0, 1.0);
  auto value = [c](double t) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
  };
  auto deriv = [c](double t) {
    double v = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) v = v * t + static_cast<double>(k) * c[k];
    return v;
  };
  return {value, SmoothFn1::Function(deriv)};
}

/// Σ_{i+j≤d} c_ij t₁^i t₂^j with c_ij ∈ [−1,1] and analytic partials.
inline SmoothFn2 random_poly2(Rng& rng, int degree) {
  struct Term {
    int i, j;
    double c;
  };
  std::vector<Term> terms;
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) terms.push_back({i, j, uniform(rng, -1.0, 1.0)});
  auto eval = [terms](int which, double x, double y) {
    double v = 0.0;
    for (const Term& t : terms) {
      if (which == 0) v += t.c * std::pow(x, t.i) * std::pow(y, t.j);
      else if (which == 1 && t.i > 0) v += t.c * t.i * std::pow(x, t.i - 1) * std::pow(y, t.j);
      else if (which == 2 && t.j > 0) v += t.c * t.j * std::pow(x, t.i) * std::pow(y, t.j - 1);
    }
    return v;
  };
  return {[eval](double x, double y) { return eval(0, x, y); },
          SmoothFn2::Function([eval](double x, double y) { return eval(1, x, y); }),
          SmoothFn2::Function([eval](double x, double y) { return eval(2, x, y); })};
}

/// p(t)·(t₁−a₁)(b₁−t₁)(t₂−a₂)(b₂−t₂) for a random polynomial p of the given degree: zero on ∂rect.
inline SmoothFn2 random_zero_trace(Rng& rng, int degree, const Rect2& rect) {
  const SmoothFn2 p = random_poly2(rng, degree);
  const Interval x = rect.t1, y = rect.t2;
  auto bx = [x](double s) { return (s - x.a) * (x.b - s); };
  auto by = [y](double s) { return (s - y.a) * (y.b - s); };
  auto dbx = [x](double s) { return x.a + x.b - 2.0 * s; };
  auto dby = [y](double s) { return y.a + y.b - 2.0 * s; };
  return {[=](double s, double t) { return p(s, t) * bx(s) * by(t); },
          SmoothFn2::Function([=](double s, double t) {
            return (p.partial(1, s, t) * bx(s) + p(s, t) * dbx(s)) * by(t);
          }),
          SmoothFn2::Function([=](double s, double t) {
            return (p.partial(2, s, t) * by(t) + p(s, t) * dby(t)) * bx(s);
          })};
}

}  // namespace vofc::instances
