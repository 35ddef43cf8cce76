// Drives the installed CLI binary (path in UDF_CLI_BIN) through its
// documented exit codes and output files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "udf/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_bin() {
  const char* p = std::getenv("UDF_CLI_BIN");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args) {
  std::string cmd = cli_bin() + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("udf_cli_" + tag + "_" +
                                            std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json load(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  nlohmann::json j;
  f >> j;
  return j;
}

}  // namespace

TEST_CASE("construct: happy path meets the proposition bound") {
  fs::path dir = fresh_dir("construct");
  int rc = run("construct --norm lp:2 --d 2 --m 8 --seed 1 --out-dir " + dir.string());
  CHECK(rc == 0);
  nlohmann::json rep = load(dir / "report.json");
  long long total = rep["total"].get<long long>();
  long long size = rep["set_size"].get<long long>();
  CHECK(total >= 6 * size);  // d(m-2)/2 = 6 for d=2, m=8
  CHECK(load(dir / "gap_spec.json")["type"] == "gap_spec");
  CHECK(fs::exists(dir / "points.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("construct: malformed norm spec exits 2") {
  fs::path dir = fresh_dir("badnorm");
  CHECK(run("construct --norm zorp:3 --d 2 --m 3 --out-dir " + dir.string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("construct: identical runs produce identical bytes") {
  fs::path a = fresh_dir("det_a");
  fs::path b = fresh_dir("det_b");
  std::string common = "construct --norm perturbed_lp:2:0.03:9 --d 2 --m 4 --seed 5 --out-dir ";
  CHECK(run(common + a.string()) == 0);
  CHECK(run(common + b.string()) == 0);
  for (const char* f : {"gap_spec.json", "points.csv", "report.json"}) {
    CHECK(udf::fnv1a64_file((a / f).string()) == udf::fnv1a64_file((b / f).string()));
  }
  // manifests agree on output digests (timestamps may differ)
  CHECK(load(a / "manifest.json")["outputs"] == load(b / "manifest.json")["outputs"]);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("construct: warm-up route") {
  fs::path dir = fresh_dir("warmup");
  CHECK(run("construct --norm lp:2 --d 2 --m 3 --warmup --svg --out-dir " +
            dir.string()) == 0);
  CHECK(fs::exists(dir / "plot.svg"));
  fs::remove_all(dir);
}

TEST_CASE("compose: n = 0 exits 2") {
  fs::path dir = fresh_dir("composezero");
  CHECK(run("compose --norm lp:2 --d 2 --n 0 --out-dir " + dir.string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("compose: sup-norm routes to the degenerate construction") {
  fs::path dir = fresh_dir("degenerate");
  int rc = run("compose --norm linf --d 2 --n 100 --out-dir " + dir.string());
  CHECK(rc == 0);
  nlohmann::json rep = load(dir / "report.json");
  CHECK(rep["type"] == "degenerate_report");
  CHECK(rep["pairwise_count"].get<long long>() >= 2500);
  fs::remove_all(dir);
}

TEST_CASE("compose: ratio report emitted for strictly convex norms") {
  fs::path dir = fresh_dir("compose");
  int rc = run("compose --norm lp:2 --d 2 --n 300 --seed 2 --out-dir " + dir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "ratio_report.csv"));
  CHECK(fs::exists(dir / "size_table.json"));
  nlohmann::json comp = load(dir / "composition.json");
  CHECK(comp["n"].get<long long>() == 300);
  fs::remove_all(dir);
}

TEST_CASE("kdm: d = 2 exits 2, d = 3 certifies") {
  fs::path dir = fresh_dir("kdm");
  CHECK(run("kdm --d 2 --m 3 --out-dir " + dir.string()) == 2);
  int rc = run("kdm --d 3 --m 4 --delta 1e-3 --seed 3 --out-dir " + dir.string());
  CHECK(rc == 0);
  nlohmann::json cert = load(dir / "kdm_certificate.json");
  CHECK(cert["points"].size() == 4);
  CHECK(cert["persisted"].get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("verify-lemmas subsets") {
  fs::path dir = fresh_dir("lemmas");
  CHECK(run("verify-lemmas --cases sumset --budget 10 --out-dir " + dir.string()) == 0);
  CHECK(run("verify-lemmas --cases nothing --budget 10") == 2);
  fs::remove_all(dir);
}
