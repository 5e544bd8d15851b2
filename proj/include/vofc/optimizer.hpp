/**
 * @file optimizer.hpp
 * @brief Quasi-Newton minimisation with central finite-difference gradients.
 *
 * BFGS on the inverse Hessian with Armijo backtracking. When a secant pair
 * shows non-positive curvature the objective is treated as indefinite: the
 * run is flagged and continues with Newton steps on ∇J = 0 (finite-difference
 * Hessian, backtracking on ‖∇J‖²), i.e. it seeks a stationary point.
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "vofc/errors.hpp"
#include "vofc/parallel.hpp"

namespace vofc {

struct OptimizerOptions {
  double gradient_tolerance = 1e-7;
  int max_iterations = 500;
  /// Central-difference step is fd_scale·(1 + |c_i|).
  double fd_scale = 1e-6;
};

struct OptimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool nonconvex = false;
};

class QuasiNewton {
 public:
  using Objective = std::function<double(const Eigen::VectorXd&)>;

  QuasiNewton(Objective objective, OptimizerOptions options = {})
      : objective_(std::move(objective)), opt_(options) {}

  double value(const Eigen::VectorXd& x) const {
    const double v = objective_(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "objective is not finite at coefficients [";
      for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
      os << "]";
      throw OptimizerError(os.str());
    }
    return v;
  }

  /// Central differences; the 2n evaluations run in parallel and are combined in index order.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    const auto n = static_cast<std::size_t>(x.size());
    const auto vals = parallel::map_indices<double>(2 * n, [&](std::size_t k) {
      Eigen::VectorXd y = x;
      const std::size_t i = k / 2;
      const double h = step(x[i]);
      y[i] += (k % 2 == 0) ? h : -h;
      return value(y);
    });
    Eigen::VectorXd g(x.size());
    for (std::size_t i = 0; i < n; ++i) g[i] = (vals[2 * i] - vals[2 * i + 1]) / (2.0 * step(x[i]));
    return g;
  }

  /// Symmetrised central difference of the gradient.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd H(n, n);
    const double base = std::sqrt(opt_.fd_scale) * 1e-1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = base * (1.0 + std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      H.col(i) = (gradient(xp) - gradient(xm)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
  }

  OptimizerResult minimize(Eigen::VectorXd x) const {
    OptimizerResult r;
    const Eigen::Index n = x.size();
    double f = value(x);
    Eigen::VectorXd g = gradient(x);
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    int it = 0;

    for (; it < opt_.max_iterations && g.norm() > opt_.gradient_tolerance; ++it) {
      Eigen::VectorXd d = -Hinv * g;
      if (g.dot(d) >= 0.0) {
        Hinv.setIdentity();
        d = -g;
      }
      double step_len = 1.0;
      double f_new = f;
      Eigen::VectorXd x_new = x;
      bool accepted = false;
      for (int k = 0; k < 60; ++k) {
        x_new = x + step_len * d;
        f_new = value(x_new);
        if (f_new <= f + 1e-4 * step_len * g.dot(d)) {
          accepted = true;
          break;
        }
        step_len *= 0.5;
      }
      if (!accepted) break;
      const Eigen::VectorXd g_new = gradient(x_new);
      const Eigen::VectorXd s = x_new - x;
      const Eigen::VectorXd y = g_new - g;
      const double sy = s.dot(y);
      x = x_new;
      f = f_new;
      g = g_new;
      if (sy <= 1e-12 * s.norm() * y.norm()) {
        r.nonconvex = true;
        ++it;
        break;
      }
      if (!scaled) {
        Hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }

    if (r.nonconvex) {
      // Stationary-point mode: Newton on the gradient, merit ‖g‖².
      for (; it < opt_.max_iterations && g.norm() > opt_.gradient_tolerance; ++it) {
        const Eigen::MatrixXd H = hessian(x);
        const Eigen::VectorXd d = H.completeOrthogonalDecomposition().solve(-g);
        double step_len = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
          const Eigen::VectorXd x_new = x + step_len * d;
          const Eigen::VectorXd g_new = gradient(x_new);
          if (g_new.squaredNorm() < (1.0 - 1e-4 * step_len) * g.squaredNorm()) {
            x = x_new;
            g = g_new;
            f = value(x);
            accepted = true;
            break;
          }
          step_len *= 0.5;
        }
        if (!accepted) break;
      }
    }

    // Curvature estimate at the returned point: a negative diagonal entry means indefinite.
    for (Eigen::Index i = 0; i < n && !r.nonconvex; ++i) {
      const double h = 1e-3 * (1.0 + std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      if ((value(xp) - 2.0 * f + value(xm)) / (h * h) < 0.0) r.nonconvex = true;
    }

    r.x = x;
    r.value = f;
    r.gradient_norm = g.norm();
    r.iterations = it;
    r.converged = r.gradient_norm <= opt_.gradient_tolerance;
    return r;
  }

 private:
  double step(double xi) const { return opt_.fd_scale * (1.0 + std::abs(xi)); }

  Objective objective_;
  OptimizerOptions opt_;
};

}  // namespace vofc
