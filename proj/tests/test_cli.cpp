#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "temp_dir.hpp"

namespace bass::cli {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::vector<const char*> argv{"bass"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<fs::path> run_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && e.path().filename().string().rfind("run-", 0) == 0) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

class EnvGuard {
 public:
  explicit EnvGuard(const char* name) : name_(name) {
    if (const char* v = std::getenv(name)) saved_ = v;
  }
  ~EnvGuard() {
    if (saved_) setenv(name_, saved_->c_str(), 1);
    else unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> saved_;
};

TEST(Cli, DefaultsAreTheStandardSettings) {
  EnvGuard g("BASS_BACKEND_URL");
  unsetenv("BASS_BACKEND_URL");
  auto o = parse_run_options({"--prompt-a", "frog", "--prompt-b", "broccoli"});
  EXPECT_EQ(o.config.n, 200u);
  EXPECT_EQ(o.config.theta, 0.05);
  EXPECT_EQ(o.config.alpha_bar, 0.4);
  EXPECT_EQ(o.config.beta_bar, 0.1);
  EXPECT_EQ(o.config.prompt_template, "A photo of {}");
  EXPECT_EQ(o.config.filter_mode, FilterMode::quantile);
  EXPECT_EQ(o.backend.endpoint, "mock:0");
}

TEST(Cli, OutOfRangeArgumentsAreUsageErrors) {
  auto r = invoke({"run", "--prompt-a", "a", "--prompt-b", "b", "--alpha-bar", "1.5"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("alpha-bar"), std::string::npos);
  EXPECT_EQ(invoke({"run", "--prompt-a", "a", "--prompt-b", "b", "--theta", "-1"}).code, kUsage);
  EXPECT_EQ(invoke({"run", "--prompt-a", "a", "--prompt-b", "b", "--template", "no placeholder"}).code, kUsage);
  EXPECT_EQ(invoke({"run", "--prompt-a", "a", "--prompt-b", "b", "--filter-mode", "fuzzy"}).code, kUsage);
  EXPECT_EQ(invoke({"run", "--prompt-a", "a", "--prompt-b", "b", "--backend", "ftp://x"}).code, kUsage);
  EXPECT_EQ(invoke({"run", "--prompt-a", "a"}).code, kUsage);
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(Cli, ThetaAcceptsInfinity) {
  auto o = parse_run_options({"--prompt-a", "a", "--prompt-b", "b", "--theta", "inf"});
  EXPECT_TRUE(std::isinf(o.config.theta));
}

TEST(Cli, ConfigFilePrecedence) {
  EnvGuard g("BASS_BACKEND_URL");
  unsetenv("BASS_BACKEND_URL");
  TempDir tmp;
  write_text(tmp / "run.toml",
             "prompt-a = \"frog\"\nprompt-b = \"broccoli\"\ntheta = \"0.1\"\nalpha-bar = 0.3\nn = 50\n");
  auto o = parse_run_options({"--config", (tmp / "run.toml").string(), "--alpha-bar", "0.2"});
  EXPECT_EQ(o.prompt_a, "frog");
  EXPECT_EQ(o.config.theta, 0.1);     // file over default
  EXPECT_EQ(o.config.alpha_bar, 0.2);  // command line over file
  EXPECT_EQ(o.config.n, 50u);
  EXPECT_EQ(o.config.beta_bar, 0.1);  // default
}

TEST(Cli, ConfigFileThroughSubcommand) {
  EnvGuard g("BASS_BACKEND_URL");
  setenv("BASS_BACKEND_URL", "mock:9", 1);
  TempDir tmp;
  write_text(tmp / "run.ini", "[run]\nprompt-a = frog\nprompt-b = broccoli\nbackend = mock:5\nn = 30\n"
                              "theta = inf\nseed-per-candidate = true\n");
  auto r = invoke({"run", "--config", (tmp / "run.ini").string(), "--n", "40", "--out", (tmp / "runs").string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  auto m = read_manifest(run_dirs(tmp / "runs").at(0));
  EXPECT_EQ(m.prompt_a, "frog");
  EXPECT_EQ(m.backend_endpoint, "mock:5");  // file over environment
  EXPECT_EQ(m.config.n, 40u);               // command line over file
  EXPECT_TRUE(std::isinf(m.config.theta));
  EXPECT_TRUE(m.config.seed_per_candidate);

  EXPECT_EQ(invoke({"run", "--config", (tmp / "missing.toml").string()}).code, kUsage);
  write_text(tmp / "typo.toml", "prompt-a = \"a\"\nprompt-b = \"b\"\nthetta = 1\n");
  EXPECT_EQ(invoke({"run", "--config", (tmp / "typo.toml").string()}).code, kUsage);
}

TEST(Cli, BackendFromEnvironment) {
  EnvGuard g("BASS_BACKEND_URL");
  setenv("BASS_BACKEND_URL", "mock:9", 1);
  EXPECT_EQ(parse_run_options({"--prompt-a", "a", "--prompt-b", "b"}).backend.endpoint, "mock:9");
  EXPECT_EQ(parse_run_options({"--prompt-a", "a", "--prompt-b", "b", "--backend", "mock:3"}).backend.endpoint,
            "mock:3");
}

TEST(Cli, RunWritesCompleteRunDirectory) {
  EnvGuard g("BASS_BACKEND_URL");
  unsetenv("BASS_BACKEND_URL");
  TempDir tmp;
  auto r = invoke({"run", "--prompt-a", "frog", "--prompt-b", "broccoli", "--n", "40", "--theta", "0.3", "--seed",
                   "3", "--out", tmp.path().string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("selected:"), std::string::npos);
  auto dirs = run_dirs(tmp.path());
  ASSERT_EQ(dirs.size(), 1u);
  auto m = read_manifest(dirs[0]);
  EXPECT_TRUE(m.status.complete);
  EXPECT_EQ(m.config.n, 40u);
  EXPECT_EQ(m.backend_endpoint, "mock:0");
  EXPECT_TRUE(check_manifest(m).empty());
}

TEST(Cli, EvalExportAndAudit) {
  TempDir tmp;
  for (const char* seed : {"1", "2"})
    ASSERT_EQ(invoke({"run", "--prompt-a", "frog", "--prompt-b", "broccoli", "--n", "40", "--theta", "0.3",
                      "--seed", seed, "--out", tmp.path().string()})
                  .code,
              kOk);
  auto dirs = run_dirs(tmp.path());
  ASSERT_EQ(dirs.size(), 2u);
  std::vector<std::string> args{"eval"};
  for (const auto& d : dirs) args.push_back(d.string());
  args.insert(args.end(), {"--csv", (tmp / "eval.csv").string()});
  auto e = invoke(args);
  ASSERT_EQ(e.code, kOk) << e.err;
  EXPECT_NE(e.out.find("balance"), std::string::npos);
  EXPECT_TRUE(fs::exists(tmp / "eval.csv"));

  auto x = invoke({"export-triples", dirs[0].string(), dirs[1].string(), "--out", (tmp / "t.bin").string()});
  ASSERT_EQ(x.code, kOk) << x.err;
  EXPECT_NE(x.out.find("wrote 2"), std::string::npos);

  EXPECT_EQ(invoke({"audit", dirs[0].string()}).code, kOk);
  fs::remove(dirs[0] / "selected.png");
  auto a = invoke({"audit", dirs[0].string()});
  EXPECT_EQ(a.code, kFailure);
  EXPECT_NE(a.out.find("missing selected.png"), std::string::npos);
  EXPECT_EQ(invoke({"audit", (tmp / "nope").string()}).code, kUsage);
}

TEST(Cli, SweepProducesOneRunPerCell) {
  TempDir tmp;
  auto r = invoke({"sweep", "--prompt-a", "frog", "--prompt-b", "broccoli", "--n", "30", "--out",
                   tmp.path().string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("cells:      21"), std::string::npos);
  std::ifstream theta(tmp / "theta.csv");
  std::string header;
  std::getline(theta, header);
  EXPECT_EQ(header, "metric,0.01,0.02,0.05,0.1,inf");
  std::ifstream ab(tmp / "alpha_beta.csv");
  std::getline(ab, header);
  EXPECT_EQ(header, "metric,alpha_bar\\beta_bar,0,0.2,0.4,0.6");
  std::size_t manifests = 0;
  for (const auto& e : fs::recursive_directory_iterator(tmp.path()))
    manifests += e.path().filename() == "manifest.json";
  EXPECT_EQ(manifests, 21u);
}

TEST(Cli, SweepGridFileOverridesAxes) {
  TempDir tmp;
  write_text(tmp / "grid.json", R"({"theta": [0.05, "inf"], "alpha_bar": [0.4], "beta_bar": [0.1, 0.2]})");
  auto r = invoke({"sweep", "--prompt-a", "frog", "--prompt-b", "broccoli", "--n", "30", "--grid-file",
                   (tmp / "grid.json").string(), "--out", (tmp / "out").string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("cells:      4"), std::string::npos);
  write_text(tmp / "bad.json", R"({"theta": []})");
  EXPECT_EQ(invoke({"sweep", "--prompt-a", "a", "--prompt-b", "b", "--grid-file", (tmp / "bad.json").string(),
                    "--out", (tmp / "out2").string()})
                .code,
            kUsage);
}

TEST(Cli, RunAgainstHttpBackendIsUnreachable) {
  TempDir tmp;
  // nothing listens on port 1; transient errors exhaust retries and the run is incomplete
  auto r = invoke({"run", "--prompt-a", "a", "--prompt-b", "b", "--backend", "http://127.0.0.1:1", "--retries", "1",
                   "--timeout-ms", "500", "--out", tmp.path().string()});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("incomplete"), std::string::npos);
}

}  // namespace
}  // namespace bass::cli
