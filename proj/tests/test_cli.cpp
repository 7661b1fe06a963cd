#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("soficx-test-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int soficx(const std::string& args) {
  std::string cmd = std::string(SOFICX_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("heuristic table") {
  fs::path out = scratch() / "heur";
  REQUIRE(soficx("heuristic --N 50 --out " + out.string()) == 0);
  std::string csv = slurp(out / "heuristic.csv");
  CHECK(csv.find("\n3,2,3,") != std::string::npos);
  CHECK(csv.find("\n5,7,15,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);
  CHECK(csv.find('\r') == std::string::npos);
  auto m = manifest(out);
  CHECK(m["subcommand"] == "heuristic");
  CHECK(m["parameters"]["N"]["source"] == "flag");
  CHECK(m["config"] == "defaults");
  CHECK(m["input_hash"].get<std::string>().size() == 40);
}

TEST_CASE("cycles sweep is deterministic") {
  fs::path a = scratch() / "cyc-a", b = scratch() / "cyc-b";
  REQUIRE(soficx("cycles --m 2 --primes 3..97 --workers 1 --out " + a.string()) == 0);
  REQUIRE(soficx("cycles --m 2 --primes 3..97 --workers 4 --out " + b.string()) == 0);
  std::string csv = slurp(a / "cycles.csv");
  CHECK(csv == slurp(b / "cycles.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 24);
  CHECK(csv.rfind("n,m,order,fix1,fix2,fix3,fix4,frac3,frac4\n3,", 0) == 0);
  CHECK(manifest(a)["input_hash"] != manifest(b)["input_hash"]);  // workers is an input
}

TEST_CASE("usage errors exit 1") {
  CHECK(soficx("") == 1);
  CHECK(soficx("cycles --no-such-flag 3") == 1);
  CHECK(soficx("tile --eps 0.3 --out " + (scratch() / "x").string()) == 1);
  CHECK(soficx("cycles --m 2 --primes 9..3 --out " + (scratch() / "x").string()) == 1);
  CHECK(soficx("search-f --n 16 --m 3 --t-start 0.01 --t-end 1 --out " + (scratch() / "x").string()) == 1);
  fs::path cfg = scratch() / "bad.toml";
  std::ofstream(cfg) << "unknown_knob = 3\n";
  CHECK(soficx("heuristic --config " + cfg.string() + " --out " + (scratch() / "x").string()) == 1);
}

TEST_CASE("config provenance") {
  fs::path cfg = scratch() / "run.toml";
  std::ofstream(cfg) << "# heuristic settings\n[heuristic]\neps = \"1/5\"\nN = 20\nm = 3\n";
  fs::path out = scratch() / "cfg";
  REQUIRE(soficx("heuristic --config " + cfg.string() + " --N 12 --out " + out.string()) == 0);
  auto m = manifest(out);
  CHECK(m["parameters"]["eps"]["source"] == "config");
  CHECK(m["parameters"]["eps"]["value"] == "1/5");
  CHECK(m["parameters"]["N"]["source"] == "flag");
  CHECK(m["parameters"]["N"]["value"] == "12");
  CHECK(m["parameters"]["kappa"]["source"] == "default");
  CHECK(m["config"] == cfg.string());

  fs::path out2 = scratch() / "cfg-missing";
  REQUIRE(soficx("heuristic --config " + (scratch() / "absent.toml").string() + " --out " + out2.string()) == 0);
  CHECK(manifest(out2)["config"] == "defaults");
}

TEST_CASE("tile and verify") {
  fs::path out = scratch() / "tile";
  REQUIRE(soficx("tile --model cyclic --n 1000 --N 1000 --out " + out.string()) == 0);
  fs::path cert = out / "tiling.json";
  fs::path v = scratch() / "verify";
  CHECK(soficx("verify --certificate " + cert.string() + " --out " + v.string()) == 0);

  auto j = nlohmann::json::parse(slurp(cert));
  j["centers"][7].push_back(j["centers"][7][0].get<int>() + 1);
  fs::path tampered = scratch() / "tampered.json";
  std::ofstream(tampered) << j.dump();
  CHECK(soficx("verify --certificate " + tampered.string() + " --out " + v.string()) == 2);
  CHECK(manifest(v)["status"] == "failed");

  std::ofstream(scratch() / "garbage.json") << "{not json";
  CHECK(soficx("verify --certificate " + (scratch() / "garbage.json").string() + " --out " + v.string()) == 2);
}

TEST_CASE("search, h3 and padic") {
  fs::path a = scratch() / "sf-a", b = scratch() / "sf-b";
  REQUIRE(soficx("search-f --n 16 --m 3 --budget 20000 --out " + a.string()) == 0);
  REQUIRE(soficx("search-f --n 16 --m 3 --budget 20000 --out " + b.string()) == 0);
  CHECK(slurp(a / "search.json") == slurp(b / "search.json"));
  CHECK(manifest(a)["parameters"]["seed"]["source"] == "derived");
  CHECK(soficx("verify --certificate " + (a / "search.json").string() + " --out " + (scratch() / "v").string()) == 0);

  // exhaustive enumeration cut short by the budget: partial result, exit 2
  fs::path p = scratch() / "sf-partial";
  CHECK(soficx("search-f --n 10 --m 3 --budget 100 --out " + p.string()) == 2);
  CHECK(manifest(p)["partial"] == true);

  CHECK(soficx("h3 --n 13 --m 2 --seed 4 --out " + (scratch() / "h3").string()) == 0);

  fs::path pa = scratch() / "padic";
  REQUIRE(soficx("padic --prime-powers 5:1..2 --m 2 --samples 10 --seed 2 --out " + pa.string()) == 0);
  std::string csv = slurp(pa / "padic.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("sofic-check") {
  fs::path out = scratch() / "sc";
  REQUIRE(soficx("sofic-check --n 101 --m 2 --out " + out.string()) == 0);
  auto j = nlohmann::json::parse(slurp(out / "sofic_check.json"));
  CHECK(j["max_defect"] == "0");
}
