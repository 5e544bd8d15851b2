/**
 * @file report_json.hpp
 * @brief JSON forms of the identity and solver reports.
 */
#pragma once

#include "json.hpp"

#include "vofc/identities.hpp"
#include "vofc/variational.hpp"

namespace vofc {

inline nlohmann::ordered_json to_json(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["residual"] = r.residual;
  j["outer_grid"] = r.outer_grid;
  j["panels"] = r.quad.panels;
  j["nodes_per_panel"] = r.quad.nodes_per_panel;
  j["grading"] = r.quad.grading;
  j["converged"] = r.converged;
  return j;
}

inline nlohmann::ordered_json to_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["coeffs"] = r.coeffs;
  j["J_value"] = r.J_value;
  j["el_residual_l2"] = r.el_residual_l2;
  j["gradient_norm"] = r.gradient_norm;
  j["iterations"] = r.iterations;
  j["nonconvex_flag"] = r.nonconvex_flag;
  return j;
}

}  // namespace vofc
