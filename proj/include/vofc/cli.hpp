/**
 * @file cli.hpp
 * @brief Batch driver behind the `vofc` executable.
 *
 * A run reads one JSON config (`--config`), optionally overridden by flags,
 * and writes CSV or JSON to the output stream. Exit codes: 0 ok, 2 parse or
 * configuration error, 3 invalid input (order bounds, domains), 4 identity
 * residual above tolerance, 5 optimizer did not converge, 1 failed selftest
 * or unexpected error.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vofc/domain.hpp"
#include "vofc/errors.hpp"
#include "vofc/expression.hpp"
#include "vofc/identities.hpp"
#include "vofc/operators.hpp"
#include "vofc/parallel.hpp"
#include "vofc/report_json.hpp"
#include "vofc/selftest.hpp"
#include "vofc/variational.hpp"

namespace vofc::cli {

using json = nlohmann::json;

enum ExitCode : int { ok = 0, failure = 1, parse_error = 2, invalid_input = 3, identity_failed = 4, not_converged = 5 };

/// %.17g: enough digits for every double to read back unchanged.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline const json& require(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw ConfigurationError(std::string("config is missing \"") + key + "\"");
  return cfg.at(key);
}

inline Interval parse_interval(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigurationError("an interval must be a two-element array [a, b]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Rect2 parse_rect(const json& cfg) {
  if (!cfg.contains("rect")) return {{0.0, 1.0}, {0.0, 1.0}};
  const json& r = cfg.at("rect");
  if (!r.is_array() || r.size() != 2) throw ConfigurationError("rect must be [[a1, b1], [a2, b2]]");
  return {parse_interval(r[0]), parse_interval(r[1])};
}

inline QuadConfig parse_quad(const json& cfg) {
  QuadConfig q;
  if (cfg.contains("quad")) {
    const json& j = cfg.at("quad");
    q.panels = j.value("panels", q.panels);
    q.nodes_per_panel = j.value("nodes_per_panel", q.nodes_per_panel);
    q.grading = j.value("grading", q.grading);
  }
  q.validate();
  return q;
}

inline std::string expression_text(const json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return fmt(j.get<double>());
  throw ConfigurationError(std::string(what) + " must be an expression string or a number");
}

/// Order from an expression over {t, tau}; a constant expression takes the constant fast path.
inline VariableOrder parse_order(const json& j, const Interval& domain, BoundMode mode, int l) {
  const Expression e = Expression::parse(expression_text(j, "alpha"), {"t", "tau"});
  if (e.is_constant()) return VariableOrder::constant(e({0.0, 0.0}), domain, mode, l);
  return VariableOrder([e](double t, double tau) { return e({t, tau}); }, domain, mode, l);
}

/// One-variable function: an expression in which t and tau both denote the argument, or a built-in.
inline SmoothFn1 parse_fn1(const json& j, double a) {
  if (j.is_object()) {
    const std::string name = require(j, "builtin").get<std::string>();
    if (name == "monomial") {
      const double g = require(j, "gamma").get<double>();
      if (g == 0.0) return SmoothFn1::constant(1.0);
      return {[a, g](double t) { return std::pow(t - a, g); },
              SmoothFn1::Function([a, g](double t) { return g * std::pow(t - a, g - 1.0); })};
    }
    if (name == "sine") {
      const double w = j.value("omega", 1.0);
      return {[w](double t) { return std::sin(w * t); }, SmoothFn1::Function([w](double t) { return w * std::cos(w * t); })};
    }
    if (name == "polynomial") {
      const auto c = require(j, "coeffs").get<std::vector<double>>();
      auto horner = [c](double t, bool deriv) {
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > (deriv ? 1u : 0u);) v = v * t + (deriv ? static_cast<double>(k) : 1.0) * c[k];
        return v;
      };
      return {[horner](double t) { return horner(t, false); },
              SmoothFn1::Function([horner](double t) { return horner(t, true); })};
    }
    throw ConfigurationError("unknown built-in function '" + name + "' (monomial, sine, polynomial)");
  }
  const Expression e = Expression::parse(expression_text(j, "f"), {"t", "tau"});
  const Expression d = e.derivative("t"), d2 = e.derivative("tau");
  return {[e](double t) { return e({t, t}); }, SmoothFn1::Function([d, d2](double t) { return d({t, t}) + d2({t, t}); })};
}

/// Two-variable function given as an expression in t1, t2, with symbolic partials.
inline SmoothFn2 parse_fn2(const json& j, const char* what) {
  const Expression e = Expression::parse(expression_text(j, what), {"t1", "t2"});
  const Expression d1 = e.derivative("t1"), d2 = e.derivative("t2");
  return {[e](double x, double y) { return e({x, y}); }, SmoothFn2::Function([d1](double x, double y) { return d1({x, y}); }),
          SmoothFn2::Function([d2](double x, double y) { return d2({x, y}); })};
}

/// Explicit list [t...] or {"start", "stop", "count"}.
inline std::vector<double> parse_grid(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object()) {
    const double lo = require(j, "start").get<double>(), hi = require(j, "stop").get<double>();
    const int n = require(j, "count").get<int>();
    if (n < 0) throw ConfigurationError("grid count must be >= 0");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
  }
  throw ConfigurationError("grid must be an array or {start, stop, count}");
}

inline OpKind parse_kind(const std::string& s) {
  for (OpKind k : {OpKind::I_left, OpKind::I_right, OpKind::D_rl_left, OpKind::D_rl_right, OpKind::D_cap_left,
                   OpKind::D_cap_right})
    if (to_string(k) == s) return k;
  throw ConfigurationError("unknown operator kind '" + s + "'");
}

inline BoundMode parse_mode(const json& cfg, const char* key, BoundMode fallback) {
  if (!cfg.contains(key)) return fallback;
  const std::string s = cfg.at(key).get<std::string>();
  for (BoundMode m : {BoundMode::plain, BoundMode::above_one_over_l, BoundMode::below_one_minus})
    if (to_string(m) == s) return m;
  throw ConfigurationError("unknown bound mode '" + s + "'");
}

inline int cmd_op(const json& cfg, std::ostream& out) {
  const OpKind kind = parse_kind(require(cfg, "kind").get<std::string>());
  const QuadConfig quad = parse_quad(cfg);
  const BoundMode mode = parse_mode(cfg, "alpha_mode", BoundMode::plain);
  const int l = cfg.value("l", 2);

  if (cfg.contains("rect")) {
    const Rect2 rect = parse_rect(cfg);
    const int axis = cfg.value("axis", 1);
    if (axis != 1 && axis != 2) throw ConfigurationError("axis must be 1 or 2");
    const VariableOrder alpha = parse_order(require(cfg, "alpha"), rect.along(axis), mode, l);
    const SmoothFn2 f = parse_fn2(require(cfg, "f"), "f");
    const json& grid = require(cfg, "grid");
    const std::vector<double> g1 = parse_grid(require(grid, "t1")), g2 = parse_grid(require(grid, "t2"));
    const auto values = parallel::map_indices<double>(g1.size() * g2.size(), [&](std::size_t k) {
      return partial_op(kind, axis, f, alpha, {g1[k / g2.size()], g2[k % g2.size()]}, rect, quad);
    });
    out << "t1,t2,value\n";
    for (std::size_t k = 0; k < values.size(); ++k)
      out << fmt(g1[k / g2.size()]) << ',' << fmt(g2[k % g2.size()]) << ',' << fmt(values[k]) << '\n';
    return ok;
  }

  const Interval domain = parse_interval(require(cfg, "domain"));
  const VariableOrder alpha = parse_order(require(cfg, "alpha"), domain, mode, l);
  const SmoothFn1 f = parse_fn1(require(cfg, "f"), domain.a);
  const std::vector<double> grid = parse_grid(require(cfg, "grid"));
  const auto values = parallel::map_indices<double>(
      grid.size(), [&](std::size_t i) { return apply_operator(kind, f, alpha, grid[i], domain, quad).value; });
  out << "t,value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) out << fmt(grid[i]) << ',' << fmt(values[i]) << '\n';
  return ok;
}

struct Level {
  int outer_grid;
  QuadConfig quad;
};

inline std::vector<Level> parse_ladder(const json& cfg, const QuadConfig& base) {
  std::vector<Level> ladder;
  const json& levels = require(cfg, "levels");
  if (!levels.is_array() || levels.empty()) throw ConfigurationError("levels must be a non-empty array");
  for (const json& l : levels) {
    Level lv{0, base};
    if (l.is_number_integer()) {
      lv.outer_grid = l.get<int>();
    } else {
      lv.outer_grid = require(l, "outer_grid").get<int>();
      lv.quad.panels = l.value("panels", base.panels);
      lv.quad.nodes_per_panel = l.value("nodes_per_panel", base.nodes_per_panel);
      lv.quad.grading = l.value("grading", base.grading);
    }
    lv.quad.validate();
    ladder.push_back(lv);
  }
  return ladder;
}

inline int cmd_verify(const json& cfg, std::optional<double> tolerance_flag, std::ostream& out) {
  const std::string identity = require(cfg, "identity").get<std::string>();
  if (identity != "ibp" && identity != "green") throw ConfigurationError("identity must be \"ibp\" or \"green\"");
  const bool ibp = identity == "ibp";
  const Rect2 rect = parse_rect(cfg);
  const BoundMode mode = ibp ? BoundMode::above_one_over_l : BoundMode::below_one_minus;
  const VariableOrder a1 = parse_order(require(cfg, "alpha1"), rect.t1, mode, cfg.value("l1", 2));
  const VariableOrder a2 = parse_order(require(cfg, "alpha2"), rect.t2, mode, cfg.value("l2", 2));
  const SmoothFn2 f = parse_fn2(require(cfg, "f"), "f"), g = parse_fn2(require(cfg, "g"), "g");
  const double tolerance = tolerance_flag.value_or(cfg.value("tolerance", ibp ? 1e-5 : 1e-4));
  const std::vector<Level> ladder = parse_ladder(cfg, parse_quad(cfg));

  std::optional<SmoothFn2> e1, e2, eta;
  if (ibp) {
    e1 = parse_fn2(require(cfg, "eta1"), "eta1");
    e2 = parse_fn2(require(cfg, "eta2"), "eta2");
  } else {
    eta = parse_fn2(require(cfg, "eta"), "eta");
  }

  out << "level,outer_grid,panels,lhs,rhs,residual\n";
  double last = 0.0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const Level& lv = ladder[i];
    const IdentityReport r = ibp ? verify_ibp(f, g, *e1, *e2, a1, a2, rect, lv.outer_grid, lv.quad, tolerance)
                                 : verify_green(f, g, *eta, a1, a2, rect, lv.outer_grid, lv.quad, tolerance);
    out << i << ',' << lv.outer_grid << ',' << lv.quad.panels << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ','
        << fmt(r.residual) << '\n';
    last = r.residual;
  }
  return std::abs(last) <= tolerance ? ok : identity_failed;
}

inline Lagrangian parse_lagrangian(const json& cfg, const Rect2& rect) {
  const json& j = require(cfg, "lagrangian");
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "quadratic") return Lagrangian::quadratic();
    if (name == "dirichlet") return Lagrangian::dirichlet();
    if (name == "string") {
      const Expression s = Expression::parse(expression_text(cfg.value("sigma", json(1.0)), "sigma"), {"t2"});
      return Lagrangian::string(SmoothFn1([s](double x) { return s({x}); }), cfg.value("tension", 1.0), rect);
    }
    throw ConfigurationError("unknown Lagrangian preset '" + name + "' (quadratic, dirichlet, string)");
  }
  const std::vector<std::string> vars{"t1", "t2", "u", "d1", "d2"};
  auto fn = [&](const char* key) {
    const Expression e = Expression::parse(expression_text(require(j, key), key), vars);
    return Lagrangian::Function([e](double t1, double t2, double u, double d1, double d2) {
      return e({t1, t2, u, d1, d2});
    });
  };
  return {fn("L"), fn("dL_du"), fn("dL_dd1"), fn("dL_dd2"), rect};
}

inline BoundaryData parse_boundary(const json& cfg, const Rect2& rect) {
  if (cfg.contains("psi")) return BoundaryData::from_function(parse_fn2(cfg.at("psi"), "psi"), rect);
  if (!cfg.contains("boundary")) return BoundaryData::constant(0.0);
  const json& b = cfg.at("boundary");
  auto edge = [&](const char* key, const char* var) {
    const Expression e = Expression::parse(expression_text(require(b, key), key), {var});
    const Expression d = e.derivative(var);
    return SmoothFn1([e](double s) { return e({s}); }, SmoothFn1::Function([d](double s) { return d({s}); }));
  };
  return {edge("bottom", "t1"), edge("right", "t2"), edge("top", "t1"), edge("left", "t2")};
}

inline int cmd_solve(const json& cfg, std::optional<double> tolerance_flag, std::ostream& out) {
  const Rect2 rect = parse_rect(cfg);
  const Lagrangian L = parse_lagrangian(cfg, rect);
  const BoundaryData psi = parse_boundary(cfg, rect);
  const VariableOrder a1 = parse_order(cfg.value("alpha1", json(0.4)), rect.t1, BoundMode::plain, 2);
  const VariableOrder a2 = parse_order(cfg.value("alpha2", json(0.4)), rect.t2, BoundMode::plain, 2);
  RitzOptions opt;
  opt.n_modes = cfg.value("n_modes", opt.n_modes);
  opt.outer_grid = cfg.value("outer_grid", opt.outer_grid);
  opt.residual_grid = cfg.value("residual_grid", opt.residual_grid);
  opt.quad = parse_quad(cfg);
  opt.optimizer.gradient_tolerance = tolerance_flag.value_or(cfg.value("opt_tol", opt.optimizer.gradient_tolerance));
  opt.optimizer.max_iterations = cfg.value("max_iter", opt.optimizer.max_iterations);
  if (cfg.contains("initial")) opt.initial = cfg.at("initial").get<std::vector<double>>();
  const SolveReport r = ritz_solve(L, psi, a1, a2, rect, opt);
  out << to_json(r).dump(2) << '\n';
  return r.converged ? ok : not_converged;
}

inline int cmd_selftest(std::uint64_t seed, std::ostream& out) {
  bool all = true;
  for (const SelfTestResult& r : run_selftest(seed)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? ok : failure;
}

}  // namespace detail

/// Full command-line entry point; argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-order fractional calculus: operators, identity checks, Ritz solver"};
  std::string command, config_path, command_flag;
  std::optional<double> tolerance;
  int threads = 1;
  std::uint64_t seed = 12345;
  app.add_option("COMMAND", command, "op | verify | solve | selftest")
      ->check(CLI::IsMember({"op", "verify", "solve", "selftest"}));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--command", command_flag, "command, overriding the config's \"command\"")
      ->check(CLI::IsMember({"op", "verify", "solve", "selftest"}));
  app.add_option("--tolerance", tolerance, "identity tolerance (verify) or gradient tolerance (solve)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of the random instances in selftest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return parse_error;
  }

  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigurationError("cannot open config file " + config_path);
      cfg = json::parse(in);
      if (!cfg.is_object()) throw ConfigurationError("config must be a JSON object");
    }
    if (!command_flag.empty()) command = command_flag;
    if (command.empty()) command = cfg.value("command", std::string());
    if (command.empty()) throw ConfigurationError("no command given (op, verify, solve, selftest)");
    if (!app.get_option("--threads")->count() && cfg.contains("threads")) threads = cfg.at("threads").get<int>();
    parallel::set_threads(threads);

    if (command == "op") return detail::cmd_op(cfg, out);
    if (command == "verify") return detail::cmd_verify(cfg, tolerance, out);
    if (command == "solve") return detail::cmd_solve(cfg, tolerance, out);
    if (command == "selftest") return detail::cmd_selftest(seed, out);
    throw ConfigurationError("unknown command '" + command + "'");
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_error;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return parse_error;
  } catch (const ConfigurationError& e) {
    err << "config error: " << e.what() << '\n';
    return parse_error;
  } catch (const ValidityError& e) {
    err << "validity error: " << e.what() << '\n';
    return invalid_input;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return invalid_input;
  } catch (const PreconditionError& e) {
    err << "precondition error: " << e.what() << '\n';
    return invalid_input;
  } catch (const OptimizerError& e) {
    err << "optimizer error: " << e.what() << '\n';
    return not_converged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace vofc::cli
