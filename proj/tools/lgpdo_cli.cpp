#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lgpdo/dual.hpp"
#include "lgpdo/fourier.hpp"
#include "lgpdo/group.hpp"
#include "lgpdo/quantization.hpp"
#include "lgpdo/report.hpp"
#include "lgpdo/symbol.hpp"
#include "lgpdo/verification.hpp"

namespace fs = std::filesystem;
using namespace lgpdo;

namespace {

constexpr const char* kConfigEnv = "LGPDO_CONFIG";

struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::string> backend;
  std::optional<int> torus_dim;
  std::optional<double> cutoff;
  std::optional<int> resolution;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> formats;
  bool timing = false;
};

RunConfig load_config(const Flags& f) {
  RunConfig c;
  std::optional<std::string> path = f.config_path;
  if (!path)
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot read config file " + *path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + *path + ": " + e.what());
    }
    c = RunConfig::from_json(j, c);
  }
  if (f.backend) {
    try {
      c.backend = backend_from_string(*f.backend);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.torus_dim) c.torus_dim = *f.torus_dim;
  if (f.cutoff) c.cutoff = *f.cutoff;
  if (f.resolution) c.resolution = *f.resolution;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out_dir = *f.out;
  if (!f.formats.empty()) c.formats = f.formats;
  return c;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << content;
}

std::string extension(const std::string& format) { return format == "text" ? "txt" : format; }

void emit(const CheckReport& r, const RunConfig& c, const std::string& stamp, bool timing) {
  fs::create_directories(c.out_dir);
  for (const auto& format : c.formats) {
    const fs::path p = fs::path(c.out_dir) / (r.name + "-" + stamp + "-" + std::to_string(c.seed) + "." + extension(format));
    if (format == "json")
      write_file(p, report_to_json(r, timing).dump(2) + "\n");
    else if (format == "csv")
      write_file(p, report_to_csv(r));
    else
      write_file(p, report_to_text(r));
    std::cerr << "wrote " << p.string() << '\n';
  }
  std::cout << report_to_text(r);
}

int run_verify(const std::vector<std::string>& names, const RunConfig& c, bool timing) {
  const std::string stamp = timestamp();
  bool ok = true;
  for (const auto& name : names) {
    const CheckReport r = run_check(name, c);
    emit(r, c, stamp, timing);
    ok = ok && r.pass;
  }
  if (names.size() > 1) std::cout << (ok ? "all checks passed" : "some checks failed") << '\n';
  return ok ? 0 : 1;
}

int run_transform(const RunConfig& c, const std::optional<std::string>& input, bool timing) {
  c.validate();
  const auto grid = haar_grid(c.backend, c.resolution, c.torus_dim);
  const auto duals = enumerate_dual(c.backend, c.cutoff, c.torus_dim);
  FourierCoefficients source;
  std::string origin;
  if (input) {
    std::ifstream in(*input);
    if (!in) throw ConfigError("cannot read coefficient file " + *input);
    nlohmann::json j;
    in >> j;
    source = coefficients_from_json(j);
    origin = *input;
  } else {
    source = random_coefficients(duals, c.seed);
    origin = "random_coefficients";
  }
  const auto start = std::chrono::steady_clock::now();
  const GridFunction f = inverse_on_grid(source, grid);
  const FourierCoefficients back = forward(f, duals);
  double err = 0.0;
  for (std::size_t k = 0; k < source.size(); ++k) {
    const Eigen::MatrixXcd* b = back.find(source.irreps()[k].label());
    if (b) err = std::max(err, (source.at(k) - *b).cwiseAbs().maxCoeff());
  }
  double l2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) l2 += grid->weight(i) * std::norm(f[i]);
  CheckReport r;
  r.name = "transform";
  r.config = {{"backend", to_string(c.backend)}, {"cutoff", c.cutoff}, {"resolution", c.resolution}, {"seed", c.seed},
              {"source", origin}};
  r.measured["irreps"] = duals.size();
  r.measured["nodes"] = grid->size();
  r.measured["round_trip_max_error"] = err;
  r.measured["grid_l2"] = std::sqrt(l2);
  r.measured["spectral_l2"] = spectral_l2_norm(back);
  r.require("round_trip", err, "<=", 1e-9);
  r.require("parseval", std::abs(std::sqrt(l2) - spectral_l2_norm(back)), "<=", 1e-9 * std::max(1.0, std::sqrt(l2)));
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.finalize();
  const std::string stamp = timestamp();
  emit(r, c, stamp, timing);
  const fs::path p = fs::path(c.out_dir) / ("transform-coefficients-" + stamp + "-" + std::to_string(c.seed) + ".json");
  write_file(p, coefficients_to_json(back).dump() + "\n");
  std::cerr << "wrote " << p.string() << '\n';
  return r.pass ? 0 : 1;
}

int run_kernel(const RunConfig& c, double beta, bool timing) {
  c.validate();
  if (c.backend != Backend::SU2) throw ConfigError("kernel runs on the su2 backend only");
  const auto start = std::chrono::steady_clock::now();
  const auto grid = haar_grid(Backend::SU2, c.resolution);
  const auto duals = enumerate_dual(Backend::SU2, c.cutoff);
  const Symbol sigma = dyadic_reconstruction(bessel_symbol(beta), max_weight(duals), build_cutoff());
  const KernelSlice slice = kernel_slice(sigma, GroupPoint::identity(Backend::SU2), grid, duals);
  CheckReport r;
  r.name = "kernel";
  r.config = {{"backend", "su2"}, {"cutoff", c.cutoff}, {"resolution", c.resolution}, {"seed", c.seed},
              {"symbol", bessel_symbol(beta).descriptor()}};
  double peak = 0.0;
  for (const auto& v : slice.values) peak = std::max(peak, std::abs(v));
  r.measured["points"] = slice.values.size();
  r.measured["max_abs_kernel"] = peak;
  r.require("finite", peak, "<=", std::numeric_limits<double>::infinity());
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.finalize();
  const std::string stamp = timestamp();
  emit(r, c, stamp, timing);
  fs::create_directories(c.out_dir);
  const fs::path p = fs::path(c.out_dir) / ("kernel-decay-" + stamp + "-" + std::to_string(c.seed) + ".csv");
  write_file(p, kernel_slice_csv(slice));
  std::cerr << "wrote " << p.string() << '\n';
  return 0;
}

int run_grid_info(const RunConfig& c) {
  if (c.resolution < 1) throw ConfigError("resolution must be positive");
  const auto grid = haar_grid(c.backend, c.resolution, c.torus_dim);
  double total = 0.0;
  for (double w : grid->weights()) total += w;
  nlohmann::json j{{"backend", to_string(c.backend)},
                   {"resolution", grid->resolution()},
                   {"nodes", grid->size()},
                   {"exactness_degree", grid->exactness_degree()},
                   {"spacing", grid->spacing()},
                   {"weight_sum", total}};
  if (const EulerLayout* e = grid->euler()) j["euler"] = {{"alpha", e->n_alpha}, {"beta", e->n_beta}, {"gamma", e->n_gamma}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_path, std::string("JSON config file (default: $") + kConfigEnv + ")");
  app.add_option("--backend", f.backend, "su2 or torus");
  app.add_option("--torus-dim", f.torus_dim, "torus dimension");
  app.add_option("--cutoff", f.cutoff, "dual cutoff Lambda on <zeta>");
  app.add_option("--resolution", f.resolution, "grid resolution N");
  app.add_option("--seed", f.seed, "corpus seed");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--format", f.formats, "json, csv or text (repeatable)")->delimiter(',');
  app.add_flag("--timing", f.timing, "include runtime in JSON reports");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-differential operators on compact Lie groups: transforms, kernels and verification checks"};
  app.require_subcommand(1);
  Flags flags;
  add_common(app, flags);
  app.fallthrough();

  auto* transform = app.add_subcommand("transform", "forward and inverse transform of a band-limited function");
  std::optional<std::string> input;
  transform->add_option("--input", input, "coefficient JSON to transform instead of a seeded random function");

  auto* kernel = app.add_subcommand("kernel", "emit the kernel decay CSV of <zeta>^beta");
  double beta = -2.0;
  kernel->add_option("--beta", beta, "Bessel order");

  auto* verify = app.add_subcommand("verify", "run a named check, or all");
  std::string target;
  verify->add_option("check", target, "check name or 'all' (default: the config's checks list)");

  auto* solve = app.add_subcommand("solve", "solve T u = f on the seeded corpus");
  std::string op;
  solve->add_option("operator", op, "sub_laplacian or heat")->required();

  auto* grid_info = app.add_subcommand("grid-info", "describe the quadrature grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig c = load_config(flags);
    if (*verify) {
      std::vector<std::string> names = target.empty() ? c.checks : std::vector<std::string>{target};
      if (names.empty()) throw UsageError("name a check, 'all', or list checks in the config");
      if (std::find(names.begin(), names.end(), "all") != names.end()) names = check_names();
      for (const auto& n : names)
        if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
          throw UsageError("unknown check '" + n + "'");
      return run_verify(names, c, flags.timing);
    }
    if (*solve) {
      const SubellipticKind kind = subelliptic_kind_from_string(op);
      const CheckReport r = run_solve_suite(kind, c);
      emit(r, c, timestamp(), flags.timing);
      return r.pass ? 0 : 1;
    }
    if (*transform) return run_transform(c, input, flags.timing);
    if (*kernel) return run_kernel(c, beta, flags.timing);
    if (*grid_info) return run_grid_info(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
