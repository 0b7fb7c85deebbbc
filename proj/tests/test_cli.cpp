#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lgpdo-cli-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(LGPDO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, UnknownCheckExitsTwo) {
  const fs::path out = scratch("nosuch");
  EXPECT_EQ(run("verify nosuch --out " + out.string()), 2);
  EXPECT_TRUE(files_in(out).empty());
}

TEST(Cli, ParseAndConfigErrorsExitTwo) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("verify weyl --cutoff notanumber"), 2);
  EXPECT_EQ(run("verify weak11 --resolution 4"), 2);
  const fs::path dir = scratch("badconfig");
  std::ofstream(dir / "c.json") << R"({"cutof": 4})";
  EXPECT_EQ(run("verify weyl --config " + (dir / "c.json").string()), 2);
}

TEST(Cli, WeylAtCutoff32WritesReport) {
  const fs::path out = scratch("weyl");
  ASSERT_EQ(run("verify weyl --cutoff 32 --out " + out.string()), 0);
  const auto files = files_in(out);
  ASSERT_EQ(files.size(), 1u);
  const std::string name = files[0].filename().string();
  EXPECT_EQ(name.rfind("weyl-", 0), 0u);
  EXPECT_NE(name.find("-20240917.json"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(files[0]));
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["config"]["cutoff"], 32.0);
}

TEST(Cli, ConfigFileAndFlagOverride) {
  const fs::path dir = scratch("override");
  std::ofstream(dir / "c.json") << R"({"cutoff": 8, "resolution": 16, "seed": 3, "formats": ["json", "csv", "text"]})";
  ASSERT_EQ(run("verify weyl --config " + (dir / "c.json").string() + " --seed 5 --out " + dir.string()), 0);
  int reports = 0;
  for (const auto& p : files_in(dir)) {
    if (p.filename() == "c.json") continue;
    ++reports;
    EXPECT_NE(p.filename().string().find("-5."), std::string::npos);
    if (p.extension() == ".json") EXPECT_EQ(nlohmann::json::parse(slurp(p))["config"]["cutoff"], 8.0);
  }
  EXPECT_EQ(reports, 3);
}

TEST(Cli, SolveIsDeterministic) {
  const fs::path a = scratch("solve-a"), b = scratch("solve-b");
  ASSERT_EQ(run("solve sub_laplacian --seed 7 --cutoff 8 --resolution 16 --out " + a.string()), 0);
  ASSERT_EQ(run("solve sub_laplacian --seed 7 --cutoff 8 --resolution 16 --out " + b.string()), 0);
  const auto fa = files_in(a), fb = files_in(b);
  ASSERT_EQ(fa.size(), 1u);
  ASSERT_EQ(fb.size(), 1u);
  EXPECT_EQ(slurp(fa[0]), slurp(fb[0]));
  EXPECT_EQ(run("solve wave"), 2);
}

TEST(Cli, TransformKernelAndGridInfo) {
  const fs::path out = scratch("misc");
  EXPECT_EQ(run("transform --cutoff 6 --resolution 8 --out " + out.string()), 0);
  EXPECT_EQ(run("kernel --cutoff 6 --resolution 8 --beta -2 --out " + out.string()), 0);
  EXPECT_EQ(run("grid-info --resolution 4"), 0);
  bool coeffs = false, csv = false;
  for (const auto& p : files_in(out)) {
    coeffs = coeffs || p.filename().string().rfind("transform-coefficients-", 0) == 0;
    csv = csv || p.filename().string().rfind("kernel-decay-", 0) == 0;
  }
  EXPECT_TRUE(coeffs);
  EXPECT_TRUE(csv);
}

TEST(Cli, VerifyRunsTheConfiguredChecks) {
  const fs::path dir = scratch("listed");
  std::ofstream(dir / "c.json") << R"({"checks": ["weyl", "cz_properties"], "formats": ["text"]})";
  ASSERT_EQ(run("verify --config " + (dir / "c.json").string() + " --out " + dir.string()), 0);
  EXPECT_EQ(files_in(dir).size(), 3u);
  EXPECT_EQ(run("verify"), 2);
}

TEST(Cli, ShippedDefaultConfigParses) {
  const fs::path dir = scratch("default");
  EXPECT_EQ(run("verify weyl --config " + std::string(LGPDO_SOURCE_DIR) + "/config/default.json --out " + dir.string()), 0);
}
