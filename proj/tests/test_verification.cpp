#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "lgpdo/function_spaces.hpp"
#include "lgpdo/report.hpp"
#include "lgpdo/symbol.hpp"
#include "lgpdo/verification.hpp"
#include "support.hpp"

using namespace lgpdo;

namespace {

const GroupPoint kE = GroupPoint::identity(Backend::SU2);

GroupPoint axis(int j, double t) {
  std::vector<double> v(3, 0.0);
  v[static_cast<std::size_t>(j)] = t;
  return exp_map(v, Backend::SU2);
}

}  // namespace

TEST(Report, CriteriaAndPass) {
  CheckReport r;
  r.name = "demo";
  r.finalize();
  EXPECT_FALSE(r.pass);  // no criteria
  EXPECT_TRUE(r.require("a", 1.0, "<=", 2.0).pass);
  EXPECT_TRUE(r.require("b", 3.0, ">=", 2.0).pass);
  EXPECT_TRUE(r.require("c", 0.0, "==", 0.0).pass);
  r.finalize();
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.require("d", std::numeric_limits<double>::quiet_NaN(), "<=", 1.0).pass);
  EXPECT_FALSE(r.require("e", std::numeric_limits<double>::infinity(), ">=", 1.0).pass);
  r.finalize();
  EXPECT_FALSE(r.pass);
  EXPECT_THROW(r.require("f", 1.0, "<", 2.0), std::invalid_argument);
}

TEST(Report, Serializations) {
  CheckReport r;
  r.name = "demo";
  r.config = {{"cutoff", 4}};
  r.measured["x"] = 1.5;
  r.series.push_back({"curve", {"t", "v"}, {{1.0, 2.0}, {2.0, 3.5}}});
  r.require("x", 1.5, "<=", 2.0);
  r.runtime_seconds = 12.0;
  r.finalize();
  const auto j = report_to_json(r);
  EXPECT_FALSE(j.contains("runtime_seconds"));
  EXPECT_TRUE(report_to_json(r, true).contains("runtime_seconds"));
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["config"]["cutoff"], 4);
  const std::string csv = report_to_csv(r);
  EXPECT_EQ(csv.rfind("series,row,column,value\n", 0), 0u);
  EXPECT_NE(csv.find("curve,1,v,3.5"), std::string::npos);
  const std::string text = report_to_text(r);
  EXPECT_NE(text.find("demo"), std::string::npos);
  EXPECT_NE(text.find("cutoff"), std::string::npos);
}

TEST(Config, JsonRoundTripAndOverrides) {
  RunConfig c;
  c.cutoff = 8;
  c.resolution = 16;
  c.seed = 99;
  c.checks = {"weyl"};
  c.formats = {"json", "csv"};
  const RunConfig back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  const RunConfig partial = RunConfig::from_json({{"seed", 5}}, c);
  EXPECT_EQ(partial.seed, 5u);
  EXPECT_EQ(partial.cutoff, 8.0);
  EXPECT_EQ(RunConfig{}.seed, kDefaultSeed);
}

TEST(Config, Rejections) {
  EXPECT_THROW(RunConfig::from_json({{"cutof", 8}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"cutoff", "big"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(nlohmann::json::array()), ConfigError);
  RunConfig c;
  c.formats = {"xml"};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.resolution = 8;  // too coarse for the default cutoff
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.checks = {"nosuch"};
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(RunCheck, UnknownNameAndInfeasibleConfig) {
  EXPECT_THROW(run_check("nosuch", RunConfig{}), UsageError);
  RunConfig c;
  c.resolution = 8;
  EXPECT_THROW(run_check("weak11", c), ConfigError);
  // The Weyl count never samples the grid.
  EXPECT_TRUE(run_check("weyl", c).pass);
  EXPECT_EQ(check_names().size(), 11u);
}

TEST(RunCheck, WeylPassesAndIsDeterministic) {
  const CheckReport a = run_check("weyl", RunConfig{});
  EXPECT_TRUE(a.pass);
  const CheckReport b = run_check("weyl", RunConfig{});
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(b).dump());
  EXPECT_EQ(report_to_csv(a), report_to_csv(b));
  EXPECT_EQ(report_to_json(a)["config"]["seed"], kDefaultSeed);
}

TEST(RunCheck, WeylOnTheTorus) {
  RunConfig c;
  c.backend = Backend::Torus;
  c.torus_dim = 2;
  c.cutoff = 8;
  c.resolution = 20;
  EXPECT_TRUE(run_check("weyl", c).pass);
}

TEST(RunCheck, CzPropertiesIsDeterministic) {
  const CheckReport a = run_check("cz_properties", RunConfig{});
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(run_check("cz_properties", RunConfig{})).dump());
}

TEST(Solve, SingleCharacterSubLaplacian) {
  const auto grid = haar_grid(Backend::SU2, 8);
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  const Irrep one(IrrepLabel::spin(2));
  const GridFunction f = GridFunction::sample(grid, [&](const GroupPoint& x) { return character(one, x); });
  const SolveResult res = solve_subelliptic(SubellipticKind::SubLaplacian, f, duals);
  EXPECT_TRUE(res.report.pass);
  EXPECT_LE(res.report.measured["residual"].get<double>(), 1e-9);
  // (X^2 + Y^2) acts on the weight-m column of a spin-1 coefficient by -(2 - m^2).
  const auto uh = forward(res.u, duals);
  const Eigen::MatrixXcd* b = uh.find(one.label());
  ASSERT_NE(b, nullptr);
  const Eigen::Vector3cd want(-1.0 / 3.0, -1.0 / 6.0, -1.0 / 3.0);
  EXPECT_LT((*b - Eigen::MatrixXcd(want.asDiagonal())).cwiseAbs().maxCoeff(), 1e-12);

  // Finite-difference (X^2 + Y^2) u at a few points reproduces f.
  const double h = 1e-3;
  for (const auto& x : lgpdo::testing::random_points(Backend::SU2, 4, 71)) {
    cplx lap = 0.0;
    for (int j : {0, 1})
      lap += (inverse(uh, compose(x, axis(j, h / 2))) - 2.0 * inverse(uh, x) + inverse(uh, compose(x, axis(j, -h / 2)))) / (h * h);
    EXPECT_LT(std::abs(lap - character(one, x)), 1e-5);
  }
}

TEST(Solve, SingleCharacterHeat) {
  const auto grid = haar_grid(Backend::SU2, 8);
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  const Irrep one(IrrepLabel::spin(2));
  const GridFunction f = GridFunction::sample(grid, [&](const GroupPoint& x) { return character(one, x); });
  const SolveResult res = solve_subelliptic(SubellipticKind::Heat, f, duals);
  EXPECT_TRUE(res.report.pass);
  const auto uh = forward(res.u, duals);
  const Eigen::MatrixXcd* b = uh.find(one.label());
  ASSERT_NE(b, nullptr);
  const Eigen::Vector3cd want(1.0 / (3.0 * cplx(1.0, 1.0)), 1.0 / 6.0, 1.0 / (3.0 * cplx(1.0, -1.0)));
  EXPECT_LT((*b - Eigen::MatrixXcd(want.asDiagonal())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solve, MeanIsRemovedAndZeroGivesSentinel) {
  const auto grid = haar_grid(Backend::SU2, 8);
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  const SolveResult zero = solve_subelliptic(SubellipticKind::SubLaplacian, GridFunction::zeros(grid), duals);
  EXPECT_EQ(lp_norm(zero.u, std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_TRUE(zero.report.measured["ratio"].is_null());
  const SolveResult c = solve_subelliptic(SubellipticKind::Heat, GridFunction::constant(grid, 2.0), duals);
  EXPECT_FALSE(c.report.notes.empty());
  EXPECT_NEAR(c.report.measured["removed_mean_abs"].get<double>(), 2.0, 1e-12);
}

TEST(Solve, SuiteIsDeterministic) {
  RunConfig c;
  c.cutoff = 8;
  c.resolution = 16;
  c.seed = 7;
  const CheckReport a = run_solve_suite(SubellipticKind::SubLaplacian, c);
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(run_solve_suite(SubellipticKind::SubLaplacian, c)).dump());
  EXPECT_THROW(subelliptic_kind_from_string("wave"), UsageError);
  EXPECT_EQ(to_string(subelliptic_kind_from_string("heat")), "heat");
}
