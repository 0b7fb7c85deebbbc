#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpdo/fourier.hpp"
#include "lgpdo/group.hpp"
#include "lgpdo/report.hpp"

namespace lgpdo {

// Unknown check or subcommand.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// Config that is malformed or cannot be run (e.g. a grid too coarse for the cutoff).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct RunConfig {
  Backend backend = Backend::SU2;
  int torus_dim = 1;
  double cutoff = 16.0;
  int resolution = 24;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> checks;
  std::string out_dir = ".";
  std::vector<std::string> formats{"json"};

  nlohmann::json to_json() const;
  // Keys present in `j` override `base`; unknown keys are a ConfigError.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
  static RunConfig from_json(const nlohmann::json& j);
  // ConfigError on bad values; with check_grid, also when the grid cannot resolve the cutoff.
  void validate(bool check_grid = true) const;
};

const std::vector<std::string>& check_names();

// Runs one named check. Unknown name: UsageError. Invalid or infeasible config: ConfigError.
CheckReport run_check(const std::string& name, const RunConfig& config);

enum class SubellipticKind { SubLaplacian, Heat };
SubellipticKind subelliptic_kind_from_string(const std::string& name);
std::string to_string(SubellipticKind kind);

struct SolveResult {
  GridFunction u;
  CheckReport report;
};

// u = Op(1 / sigma_T) f on the listed irreps for T = X^2 + Y^2 or T = Z - X^2 - Y^2. The mean of f
// (the l = 0 block, where both symbols vanish) is removed first and noted in the report.
SolveResult solve_subelliptic(SubellipticKind kind, const GridFunction& f, const std::vector<Irrep>& duals);

// Solves on the seeded 20-function band-limited corpus and checks the residual and the ratio band.
CheckReport run_solve_suite(SubellipticKind kind, const RunConfig& config);

}  // namespace lgpdo
