#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vofc/cli.hpp"

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vofc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = vofc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  vofc::parallel::set_threads(1);
  return {code, out.str(), err.str()};
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("vofc_test_" + name + ".json");
  std::ofstream(path) << text;
  return path.string();
}

CliRun run_config(const std::string& name, const std::string& text, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"--config", write_config(name, text)};
  args.insert(args.end(), extra.begin(), extra.end());
  return run_cli(args);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<double> column(const std::string& csv, std::size_t col) {
  std::vector<double> out;
  const auto ls = lines(csv);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::istringstream row(ls[i]);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) std::getline(row, cell, ',');
    out.push_back(std::strtod(cell.c_str(), nullptr));
  }
  return out;
}

}  // namespace

TEST(CliOp, SamkoRossRow) {
  const CliRun r = run_config("op_sr", R"cfg({"command":"op","kind":"I_left","f":"tau","alpha":"(1+t)/4",
                                         "domain":[0,1],"grid":[1]})cfg");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "t,value");
  EXPECT_EQ(ls[1].rfind("1,0.75225277", 0), 0u) << ls[1];
  EXPECT_NEAR(column(r.out, 1)[0], 0.75225277806367504926, 1e-9);
}

TEST(CliOp, CaputoOfConstantIsZero) {
  const CliRun r = run_config("op_cap", R"cfg({"command":"op","kind":"D_cap_left","f":"1","alpha":"0.3+0.2*t*tau",
                                          "domain":[0,1],"grid":{"start":0.1,"stop":1,"count":10}})cfg");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = column(r.out, 1);
  ASSERT_EQ(v.size(), 10u);
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(CliOp, EmptyGridGivesHeaderOnly) {
  const CliRun r = run_config("op_empty", R"cfg({"command":"op","kind":"I_right","f":"tau","alpha":"0.5",
                                            "domain":[0,1],"grid":[]})cfg");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "t,value\n");
}

TEST(CliOp, PartialOperatorOnRectangle) {
  const CliRun r = run_config("op_2d", R"cfg({"command":"op","kind":"I_left","axis":1,"f":"t1*t2","alpha":"0.5",
                                         "rect":[[0,1],[0,1]],"grid":{"t1":[0.5],"t2":[0.25,1]}})cfg");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "t1,t2,value");
  // I^{1/2} of τ at t = 0.5 equals t^{3/2}/Γ(5/2).
  const double base = std::pow(0.5, 1.5) / std::tgamma(2.5);
  EXPECT_NEAR(column(r.out, 2)[0], 0.25 * base, 1e-10);
  EXPECT_NEAR(column(r.out, 2)[1], base, 1e-10);
}

TEST(CliOp, ErrorsMapToExitCodes) {
  const CliRun parse = run_config("op_bad", R"cfg({"command":"op","kind":"I_left","f":"tau+","alpha":"0.5",
                                              "domain":[0,1],"grid":[1]})cfg");
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.err.find("column"), std::string::npos) << parse.err;
  const CliRun unknown = run_config("op_unk", R"cfg({"command":"op","kind":"I_left","f":"x","alpha":"0.5",
                                                "domain":[0,1],"grid":[1]})cfg");
  EXPECT_EQ(unknown.code, 2);
  const CliRun validity = run_config("op_val", R"cfg({"command":"op","kind":"I_left","f":"tau","alpha":"1.5",
                                                 "domain":[0,1],"grid":[1]})cfg");
  EXPECT_EQ(validity.code, 3) << validity.err;
  EXPECT_EQ(run_cli({"op", "--config", "/nonexistent/vofc.json"}).code, 2);
  EXPECT_EQ(run_config("not_json", "{").code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
}

TEST(CliVerify, IbpWithZeroFunctions) {
  const CliRun r = run_config("v_ibp0", R"cfg({"command":"verify","identity":"ibp","alpha1":"0.6","alpha2":"0.7",
                                          "f":"0","g":"0","eta1":"0","eta2":"0","levels":[4,8]})cfg");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "level,outer_grid,panels,lhs,rhs,residual");
  for (double v : column(r.out, 5)) EXPECT_EQ(v, 0.0);
}

TEST(CliVerify, GreenZeroTrace) {
  const CliRun r = run_config("v_green", R"cfg({"command":"verify","identity":"green","alpha1":"0.4","alpha2":"0.4",
                                           "l1":3,"l2":3,"f":"1+t1*t2-t2^2","g":"t1-2*t2+0.5",
                                           "eta":"t1*(1-t1)*t2*(1-t2)*(1+t1)","levels":[8,12]})cfg");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(std::abs(column(r.out, 5).back()), 1e-4);
}

TEST(CliVerify, BoundViolationAndFailedTolerance) {
  const CliRun bad = run_config("v_bound", R"cfg({"command":"verify","identity":"green","alpha1":"0.9","alpha2":"0.4",
                                             "l1":2,"l2":2,"f":"1","g":"1","eta":"1","levels":[4]})cfg");
  EXPECT_EQ(bad.code, 3) << bad.err;
  const CliRun strict = run_config("v_strict",
                                R"cfg({"command":"verify","identity":"green","alpha1":"0.4","alpha2":"0.4","l1":3,"l2":3,
                                    "f":"t1*t2","g":"t1+t2","eta":"1+t1*t2^2","levels":[4],"panels":2,"nodes_per_panel":2})cfg",
                                {"--tolerance", "1e-15"});
  EXPECT_EQ(strict.code, 4) << strict.out << strict.err;
}

TEST(CliSolve, QuadraticZeroBoundary) {
  const CliRun r = run_config("s_quad", R"cfg({"command":"solve","lagrangian":"quadratic","alpha1":0.4,"alpha2":0.4,
                                          "n_modes":2,"outer_grid":10,"residual_grid":3,"initial":[0.1,0.2,-0.1,0.3]})cfg");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"coeffs", "J_value", "el_residual_l2", "gradient_norm", "iterations", "nonconvex_flag"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.size(), 6u);
  for (double c : j["coeffs"].get<std::vector<double>>()) EXPECT_NEAR(c, 0.0, 1e-7);
  EXPECT_LT(j["J_value"].get<double>(), 1e-14);
}

TEST(CliSolve, StringPresetReportsFlagOrStationarity) {
  const CliRun r = run_config("s_string", R"cfg({"command":"solve","lagrangian":"string","sigma":"1","tension":1,
                                            "n_modes":1,"outer_grid":8,"residual_grid":2,"initial":[0.3]})cfg");
  ASSERT_TRUE(r.code == 0 || r.code == 5) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["nonconvex_flag"].get<bool>() || j["gradient_norm"].get<double>() <= 1e-7);
}

TEST(CliSolve, CustomLagrangianAndMalformedInput) {
  const CliRun ok = run_config("s_custom", R"cfg({"command":"solve","n_modes":1,"outer_grid":8,"residual_grid":2,
      "lagrangian":{"L":"d1^2+d2^2+u^2","dL_du":"2*u","dL_dd1":"2*d1","dL_dd2":"2*d2"},"psi":"1+t1"})cfg");
  EXPECT_EQ(ok.code, 0) << ok.err;
  const CliRun malformed = run_config("s_bad", R"cfg({"command":"solve","lagrangian":{"L":"d1^^2","dL_du":"0",
                                                  "dL_dd1":"2*d1","dL_dd2":"0"}})cfg");
  EXPECT_EQ(malformed.code, 2);
  const CliRun wrong = run_config("s_wrong", R"cfg({"command":"solve","lagrangian":{"L":"d1^2","dL_du":"0",
                                              "dL_dd1":"d1","dL_dd2":"0"}})cfg");
  EXPECT_EQ(wrong.code, 2) << wrong.err;
  const CliRun stalled = run_config("s_stall", R"cfg({"command":"solve","lagrangian":"quadratic","n_modes":2,
      "outer_grid":8,"residual_grid":2,"psi":"1+t1*t2","max_iter":1})cfg");
  EXPECT_EQ(stalled.code, 5);
}

TEST(CliDeterminism, OutputIndependentOfThreads) {
  const std::string op = R"cfg({"command":"op","kind":"D_rl_right","f":"sin(3*tau)+tau^2","alpha":"0.3+0.1*t+0.05*tau",
                             "domain":[0,1],"grid":{"start":0,"stop":0.95,"count":20}})cfg";
  const CliRun a = run_config("det_op", op, {"--threads", "1"}), b = run_config("det_op", op, {"--threads", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const std::string verify = R"cfg({"command":"verify","identity":"ibp","alpha1":"0.5+0.1*t","alpha2":"0.6","l1":3,
                                 "f":"t1*t2","g":"1+t1","eta1":"t2^2","eta2":"t1-t2","levels":[6,10]})cfg";
  const CliRun c = run_config("det_v", verify, {"--threads", "1"}), d = run_config("det_v", verify, {"--threads", "5"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out, d.out);
}

TEST(CliFormat, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 0.75225277806367504926, -1e-300, 6.02214076e23, 5e-324}) {
    const std::string s = vofc::cli::fmt(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  const CliRun r = run_config("fmt", R"cfg({"command":"op","kind":"I_left","f":"exp(tau)","alpha":"0.37",
                                      "domain":[0,1],"grid":{"start":0.05,"stop":1,"count":7}})cfg");
  ASSERT_EQ(r.code, 0);
  for (double v : column(r.out, 1)) EXPECT_EQ(vofc::cli::fmt(std::strtod(vofc::cli::fmt(v).c_str(), nullptr)), vofc::cli::fmt(v));
}

TEST(CliSelftest, AllChecksPass) {
  const CliRun r = run_cli({"selftest", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out;
  for (const auto& l : lines(r.out)) EXPECT_EQ(l.rfind("PASS ", 0), 0u) << l;
}
