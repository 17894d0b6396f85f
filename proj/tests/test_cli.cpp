#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfsi/config.hpp"
#include "cfsi/mesh.hpp"
#include "cfsi/runner.hpp"
#include "cfsi/sha256.hpp"
#include "cfsi/svg.hpp"

using namespace cfsi;
namespace fs = std::filesystem;

namespace {

// scratch area; wiped per test case that uses it
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cfsi_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// run the installed CLI binary, capturing interleaved stdout+stderr
int run_cli(const std::string& args, std::string* output = nullptr) {
  const char* cli = std::getenv("CFSI_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "CFSI_CLI must point at the binary");
  const std::string cmd = std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  if (output) *output = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing artifact " + p.string()).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string cert_value(const std::string& cert, const std::string& key) {
  const std::string needle = key + ": ";
  const auto at = cert.find(needle);
  if (at == std::string::npos) return "<missing>";
  const auto end = cert.find('\n', at);
  return cert.substr(at + needle.size(), end - at - needle.size());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("digest matches the reference vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // multi-block message exercising the buffered path
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");

  const fs::path dir = scratch("sha");
  std::ofstream(dir / "v.bin", std::ios::binary) << "abc";
  CHECK(sha256_file_hex((dir / "v.bin").string()) == sha256_hex("abc"));
  CHECK_THROWS_AS((void)sha256_file_hex((dir / "absent").string()), std::runtime_error);
}

TEST_CASE("plot writer emits well-formed annotated SVG") {
  PlotSeries s{"series <1>", {1.0, 2.0, 3.0}, {2.0, 4.0, 8.0}};

  std::ostringstream os;
  emit_plot({s}, {"growth & decay", "x", "y", false, "note", 640, 480}, os);
  const std::string svg = os.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("growth &amp; decay") != std::string::npos);  // escaped title
  CHECK(svg.find("series &lt;1&gt;") != std::string::npos);    // escaped legend
  CHECK(svg.find("note") != std::string::npos);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);

  std::ostringstream os2;
  emit_plot({s}, {"", "", "", true, "", 640, 480}, os2);
  CHECK(os2.str().find("1e0") != std::string::npos);  // decade ticks on log axes

  CHECK_THROWS_AS(emit_plot({}, {}, os), std::invalid_argument);
  PlotSeries empty{"e", {}, {}};
  CHECK_THROWS_AS(emit_plot({empty}, {}, os), std::invalid_argument);
  PlotSeries ragged{"r", {1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(emit_plot({ragged}, {}, os), std::invalid_argument);
  PlotSeries negative{"n", {1.0, 2.0}, {-1.0, 1.0}};
  PlotSpec log_spec;
  log_spec.loglog = true;
  CHECK_THROWS_AS(emit_plot({negative}, log_spec, os), std::invalid_argument);
}

TEST_CASE("runner: no-wind scenario passes trivially with a stable manifest") {
  const fs::path a = scratch("runner_a"), b = scratch("runner_b");
  ScenarioConfig cfg = parse_config(R"({"experiment": {"kind": "equilibrium"}})");
  cfg.out_dir = a.string();

  const RunResult first = run_scenario(cfg);
  CHECK(first.all_pass);
  CHECK(first.failures.empty());
  REQUIRE(!first.artifacts.empty());
  CHECK(first.artifacts.back().name == "manifest.txt");
  const std::string cert = slurp(a / "equilibrium.cert");
  CHECK(cert_value(cert, "result") == "PASS");
  CHECK(cert_value(cert, "lift_at_root") == "0");  // noise floor reported as zero

  cfg.out_dir = b.string();
  const RunResult second = run_scenario(cfg);
  REQUIRE(second.artifacts.size() == first.artifacts.size());
  for (std::size_t i = 0; i < first.artifacts.size(); ++i) {
    CHECK(first.artifacts[i].name == second.artifacts[i].name);
    CHECK(first.artifacts[i].sha256 == second.artifacts[i].sha256);
  }

  // manifest hashes in the file match the artifacts on disk
  const std::string manifest = slurp(a / "manifest.txt");
  for (const Artifact& art : first.artifacts)
    if (art.name != "manifest.txt") {
      CHECK(manifest.find(art.name) != std::string::npos);
      CHECK(manifest.find(art.sha256) != std::string::npos);
      CHECK(sha256_file_hex((a / art.name).string()) == art.sha256);
    }
}

TEST_CASE("runner: experiment failures are recorded, not thrown") {
  const fs::path dir = scratch("runner_fail");
  // continuation without a grid cannot run
  ScenarioConfig cfg = parse_config(R"({"experiment": {"kind": "continuation"}})");
  cfg.out_dir = dir.string();
  const RunResult res = run_scenario(cfg);
  CHECK(!res.all_pass);
  REQUIRE(!res.failures.empty());
  CHECK(res.failures[0].find("lambda_grid") != std::string::npos);
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("failure:") != std::string::npos);
  CHECK(manifest.find("result: FAIL") != std::string::npos);
}

TEST_CASE("process: run subcommand, exit codes, and library parity") {
  const fs::path dir = scratch("proc");
  const fs::path cfg_path = dir / "scenario.json";
  const std::string out_cli = (dir / "cli").string(), out_lib = (dir / "lib").string();
  std::ofstream(cfg_path) << R"({
    "experiment": {"kind": "equilibrium", "lambda": 0.0},
    "output": {"directory": ")" << out_cli << R"("}
  })";

  std::string out;
  CHECK(run_cli("run " + cfg_path.string(), &out) == 0);
  CHECK(out.find("result: PASS") != std::string::npos);

  // byte-identical certificate from a direct library call on the same file
  ScenarioConfig cfg = load_config(cfg_path.string());
  cfg.out_dir = out_lib;
  const RunResult lib = run_scenario(cfg);
  CHECK(lib.all_pass);
  CHECK(slurp(fs::path(out_cli) / "equilibrium.cert") ==
        slurp(fs::path(out_lib) / "equilibrium.cert"));

  CHECK(run_cli("run " + (dir / "missing.json").string(), &out) == 2);
  CHECK(out.find("config error") != std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"experiment": {"kind": "solve"}, "extra": 1})";
  CHECK(run_cli("run " + (dir / "bad.json").string(), &out) == 2);
  CHECK(out.find("extra") != std::string::npos);

  CHECK(run_cli("schema", &out) == 0);
  CHECK(out.find("experiment") != std::string::npos);
  CHECK(run_cli("", &out) != 0);  // a subcommand is required
}

TEST_CASE("process: mesh-dump artifact round-trips and flags override config") {
  const fs::path dir = scratch("mesh_flags");
  const std::string out1 = (dir / "m").string();
  CHECK(run_cli("mesh-dump --size 0.3 --out " + out1) == 0);
  std::ifstream mesh_in(fs::path(out1) / "mesh.txt");
  const Mesh m = load_mesh(mesh_in);
  CHECK(m.n_tris() > 0);
  CHECK(quality_report(m).euler_characteristic == 0);

  // config says lambda 0.7; the flag must win
  const fs::path cfg_path = dir / "solve.json";
  std::ofstream(cfg_path) << R"({
    "experiment": {"kind": "solve", "lambda": 0.7},
    "solver": {"size": 0.25}
  })";
  const std::string out2 = (dir / "s").string();
  CHECK(run_cli("solve --config " + cfg_path.string() + " --lambda 0 --out " + out2) == 0);
  const std::string cert = slurp(fs::path(out2) / "solve.cert");
  CHECK(cert_value(cert, "lambda") == "0");
  CHECK(cert_value(cert, "lift_volume") == "0");  // no wind, certified zero
}

TEST_CASE("process: asymptotics artifacts agree with each other") {
  const fs::path dir = scratch("asym");
  const std::string out = (dir / "a").string();
  CHECK(run_cli("asymptotics --lambda 0.4 --size 0.25 --gaps 0.2,0.1,0.05,0.02 --out " +
                out) == 0);
  const std::string cert = slurp(fs::path(out) / "asymptotics.cert");
  CHECK(cert_value(cert, "within_bound") == "PASS");

  // the SVG's annotated slope is the certificate's slope at %.3f precision
  const double slope = std::stod(cert_value(cert, "slope"));
  char want[32];
  std::snprintf(want, sizeof(want), "slope %.3f", slope);
  CHECK(slurp(fs::path(out) / "exponent.svg").find(want) != std::string::npos);
}

}  // TEST_SUITE
