#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plapd/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("plapd-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(std::vector<std::string> args) {
  std::ostringstream out, err;
  return plapd::cli::run(args, out, err);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

json load(const std::string& path) { return json::parse(slurp(path)); }

// Every file listed by the manifest exists and parses.
void check_manifest(const std::string& dir) {
  const auto m = load(dir + "/manifest.json");
  for (const auto& name : m.at("outputs")) {
    const std::string f = dir + "/" + name.get<std::string>();
    CAPTURE(f);
    REQUIRE(fs::exists(f));
    if (f.ends_with(".json")) CHECK_NOTHROW(load(f));
    if (f.ends_with(".csv")) {
      std::ifstream is(f);
      std::string header, line;
      std::getline(is, header);
      const auto cols = std::count(header.begin(), header.end(), ',') + 1;
      int rows = 0;
      while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') + 1 == cols);
        ++rows;
      }
      CHECK(rows > 0);
    }
  }
  CHECK(m.contains("config_hash"));
  CHECK(m.contains("versions"));
  CHECK(m.contains("wall_clock_seconds"));
}

}  // namespace

TEST_CASE("check-hypotheses on the log-critical example") {
  TempDir t;
  CHECK(run({"check-hypotheses", "--f", "log-critical:alpha=3", "--p", "2", "--N", "3", "--out-dir", t / "h"}) == 0);
  const auto r = load(t / "h/report.json");
  CHECK(r["hypotheses"]["h3pp"]["verdict"] == "holds");
  CHECK(r["hypotheses"]["h3pp"]["constant"].get<double>() == doctest::Approx(0.5).epsilon(0.1));
  check_manifest(t / "h");
  CHECK(run({"check-hypotheses", "--f", "critical-power", "--p", "2", "--N", "3", "--require", "h3p",
             "--out-dir", t / "c"}) == 1);
}

TEST_CASE("solve writes a solution and identity reports") {
  TempDir t;
  CHECK(run({"solve", "--f", "power:q=3", "--p", "2", "--domain", "disc", "--h", "0.1", "--out-dir", t / "s",
             "--mesh-out", "mesh.txt"}) == 0);
  check_manifest(t / "s");
  const auto r = load(t / "s/report.json");
  CHECK(r["solution"]["converged"] == true);
  CHECK(r["identities"].contains("pohozaev"));
  CHECK(fs::exists(t / "s/mesh.txt"));

  // re-running from the resolved configuration reproduces the numbers
  CHECK(run({"solve", "--config", t / "s/config.toml", "--out-dir", t / "s2"}) == 0);
  CHECK(slurp(t / "s/solution.csv") == slurp(t / "s2/solution.csv"));
  CHECK(slurp(t / "s/report.json") == slurp(t / "s2/report.json"));
  CHECK(load(t / "s/manifest.json")["config_hash"] == load(t / "s2/manifest.json")["config_hash"]);

  CHECK(run({"verify-identities", "--solution", t / "s/solution.json", "--out-dir", t / "v"}) == 1);
  const auto v = load(t / "v/report.json");
  CHECK(v["identities"]["energy_identity"]["pass"] == true);
  CHECK(v["identities"]["pohozaev"]["pass"] == false);  // element flux at h = 0.1
}

TEST_CASE("exit code contract") {
  TempDir t;
  { std::ofstream(t / "empty.toml"); }
  CHECK(run({"solve", "--config", t / "empty.toml", "--out-dir", t / "e"}) == 2);
  CHECK(run({"solve", "--config", t / "missing.toml"}) == 2);
  { std::ofstream(t / "unknown.toml") << "p = 2\nbogus = 1\n"; }
  CHECK(run({"solve", "--config", t / "unknown.toml", "--out-dir", t / "u"}) == 2);
  { std::ofstream(t / "typed.toml") << "p = \"two\"\n"; }
  CHECK(run({"solve", "--config", t / "typed.toml", "--out-dir", t / "u"}) == 2);
  { std::ofstream(t / "broken.toml") << "p = [\n"; }
  CHECK(run({"solve", "--config", t / "broken.toml", "--out-dir", t / "u"}) == 2);
  CHECK(run({"solve", "--f", "nonsense", "--out-dir", t / "u"}) == 2);
  CHECK(run({"solve", "--p", "0.5", "--out-dir", t / "u"}) == 2);
  CHECK(run({"solve", "--no-such-flag"}) == 2);
  CHECK(run({}) == 2);
  CHECK_FALSE(fs::exists(t / "u"));

  // forced non-convergence still writes its reports
  { std::ofstream(t / "fault.toml") << "p = 3\nf = { kind = \"power\", q = 3 }\n[domain]\nh = 0.1\n[solver]\nmax_iter = 1\n"; }
  CHECK(run({"solve", "--config", t / "fault.toml", "--out-dir", t / "f"}) == 1);
  check_manifest(t / "f");
  CHECK(load(t / "f/manifest.json")["exit_code"] == 1);
}

TEST_CASE("exist, eigen, radial oracle and sweep") {
  TempDir t;
  CHECK(run({"exist", "--f", "power:q=3", "--p", "2", "--domain", "disc", "--h", "0.1", "--lambda-sweep", "1:16:5",
             "--out-dir", t / "l"}) == 0);
  const auto l = load(t / "l/report.json");
  CHECK(l["lambda_max"]["lambda_hat"].is_number());
  check_manifest(t / "l");

  CHECK(run({"exist", "--h", "0.1", "--homotopy", "lambda0=1", "--out-dir", t / "h"}) == 0);
  CHECK(run({"exist", "--h", "0.1", "--homotopy", "lambda0=1e6", "--out-dir", t / "hh"}) == 1);
  CHECK(load(t / "hh/report.json")["branch"]["threshold_exceeded"] == true);
  CHECK(run({"exist", "--homotopy", "mu=1", "--out-dir", t / "x"}) == 2);

  CHECK(run({"exist", "--alpha-sweep", "0,3", "--N", "3", "--out-dir", t / "a"}) == 0);
  const auto a = load(t / "a/report.json")["alpha_sweep"];
  CHECK(a[0]["found"] == false);
  CHECK(a[1]["found"] == true);

  CHECK(run({"eigen", "--h", "0.1", "--out-dir", t / "e"}) == 0);
  check_manifest(t / "e");
  CHECK(run({"oracle-radial", "--f", "power:q=3", "--out-dir", t / "r"}) == 0);
  check_manifest(t / "r");
  CHECK(run({"oracle-radial", "--f", "critical-power", "--N", "3", "--out-dir", t / "rc"}) == 1);
  CHECK(run({"oracle-radial", "--eigen", "--out-dir", t / "re"}) == 0);
  CHECK(run({"sweep", "--f", "constant:c=1", "--values", "0.1,0.05", "--out-dir", t / "w"}) == 0);
  check_manifest(t / "w");
}
