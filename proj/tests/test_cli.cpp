#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(QPCIRCLE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() /
                   ("qpcircle_cli_test_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("rotnum on the figure-one system reports the predicted value") {
  TempDir tmp;
  const int code = run("rotnum --system translation --k 1 --q 2 --l 1 --p 2 "
                       "--n 100000 --out " + tmp.sub("a"));
  CHECK(code == 0);
  const json result = load(tmp.sub("a") + "/rotnum.json");
  CHECK(std::abs(result["value"].get<double>() - 0.55902) < 1e-4);
  CHECK(result["iterations"] == 100000);

  const json manifest = load(tmp.sub("a") + "/manifest.json");
  CHECK(manifest["command"] == "rotnum");
  CHECK(manifest["seed"] == 0);
  CHECK(manifest["version"].is_string());
  CHECK(manifest["parameters"]["system"] == "translation");
  CHECK(manifest["outputs"].size() == 1);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("rotnum --system nosuch") == 2);
  CHECK(run("definitely-not-a-subcommand") == 2);
  CHECK(run("rotnum --no-such-flag 3") == 2);
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("rotnum --help") == 0);
  CHECK(run("--version") == 0);
}

TEST_CASE("domain errors exit with 1") {
  TempDir tmp;
  // box returns to itself quickly under a frozen fibre map
  const int code = run("closest --system skew --c0 0 --amp 0 "
                       "--center 0 --halfwidth 0.05 --kcenter 0.5 --khalfwidth 0.1 "
                       "--alpha 0.5 --horizon 20 --out " + tmp.sub("w"));
  CHECK(code == 1);
  // invalid parameter value for the catalog entry
  CHECK(run("rotnum --system arnold --a 1.5 --out " + tmp.sub("x")) == 1);
}

TEST_CASE("harper diag reproduces the pinned rotation number") {
  TempDir tmp;
  const int code = run("harper diag --n 50000 --out " + tmp.sub("d"));
  CHECK(code == 0);
  const json d = load(tmp.sub("d") + "/harper_diag.json");
  CHECK(d["rotation_residual"].get<double>() < 1e-3);
  CHECK(d["symmetry_residual"].get<double>() < 1e-10);
}

TEST_CASE("graph pipeline round-trips through files") {
  TempDir tmp;
  CHECK(run("graph-decompose --system translation --builtin figure1 "
            "--grid 256 --out " + tmp.sub("dec")) == 0);
  const json dec = load(tmp.sub("dec") + "/decompose.json");
  REQUIRE(dec["parts"].size() == 1);
  CHECK(dec["parts"][0]["signature"]["p"] == 2);
  CHECK(dec["parts"][0]["signature"]["q"] == 2);
  CHECK(dec["parts"][0]["signature"]["k"] == 1);
  CHECK(dec["parts"][0]["signature"]["l"] == 1);

  const std::string part = dec["parts"][0]["graph_csv"].get<std::string>();
  CHECK(run("graph-check --system translation --graph " + part +
            " --out " + tmp.sub("chk")) == 0);
  const json chk = load(tmp.sub("chk") + "/graph_check.json");
  CHECK(chk["pass"] == true);

  const std::string curve = dec["parts"][0]["curve_csvs"][0].get<std::string>();
  CHECK(run("winding --curve " + curve + " --out " + tmp.sub("w")) == 0);
  const json w = load(tmp.sub("w") + "/winding.json");
  CHECK(w["q"] == 2);
  CHECK(w["k"] == 1);

  CHECK(run("jumping --system translation --l 3 --builtin figure1 --grid 256 "
            "--out " + tmp.sub("j")) == 0);
  const json j = load(tmp.sub("j") + "/jumping.json");
  CHECK(j["l"] == 3);
}

TEST_CASE("tube-verify builds, saves and re-reads a tube") {
  TempDir tmp;
  CHECK(run("tube-verify --system translation --builtin figure1 --grid 256 "
            "--eps 0.05 --out " + tmp.sub("t")) == 0);
  const json rep = load(tmp.sub("t") + "/tube_verify.json");
  CHECK(rep["pass"] == true);
  CHECK(rep["signature"]["l"] == 1);

  CHECK(run("tube-verify --system translation --tube " + tmp.sub("t") +
            "/tube.csv --out " + tmp.sub("t2")) == 0);
  const json rep2 = load(tmp.sub("t2") + "/tube_verify.json");
  CHECK(rep2["pass"] == true);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  TempDir tmp;
  for (const char* dir : {"r1", "r2"}) {
    CHECK(run(std::string("harper graph --n 20000 --bins 64 --skip 500 --seed 9 "
                          "--out ") + tmp.sub(dir)) == 0);
  }
  CHECK(slurp(tmp.sub("r1") + "/harper_graph.csv") ==
        slurp(tmp.sub("r2") + "/harper_graph.csv"));
  CHECK(slurp(tmp.sub("r1") + "/harper_graph.json") ==
        slurp(tmp.sub("r2") + "/harper_graph.json"));

  for (const char* dir : {"v1", "v2"}) {
    CHECK(run(std::string("variation --system arnold --a 0.4 --out ") +
              tmp.sub(dir)) == 0);
  }
  CHECK(slurp(tmp.sub("v1") + "/variation.json") ==
        slurp(tmp.sub("v2") + "/variation.json"));
}

TEST_CASE("thread count does not change results") {
  TempDir tmp;
  CHECK(run("graph-check --system translation --builtin figure1 --grid 512 "
            "--threads 1 --out " + tmp.sub("t1")) == 0);
  CHECK(run("graph-check --system translation --builtin figure1 --grid 512 "
            "--threads 4 --out " + tmp.sub("t4")) == 0);
  CHECK(slurp(tmp.sub("t1") + "/graph_check.json") ==
        slurp(tmp.sub("t4") + "/graph_check.json"));
}

TEST_CASE("config files select systems") {
  TempDir tmp;
  const std::string conf = tmp.sub("sys.conf");
  {
    std::ofstream out(conf);
    out << "system = skew\nomega = golden\nc0 = 0.25\namp = 0.1\n";
  }
  CHECK(run("rotnum --config " + conf + " --n 50000 --out " + tmp.sub("c")) == 0);
  const json r = load(tmp.sub("c") + "/rotnum.json");
  CHECK(std::abs(r["value"].get<double>() - 0.25) < 1e-3);
}

TEST_CASE("returns and distortion subcommands emit their reports") {
  TempDir tmp;
  CHECK(run("returns --halfwidth 0.05 --alpha 0.5 --horizon 40 --out " +
            tmp.sub("r")) == 0);
  const json r = load(tmp.sub("r") + "/returns.json");
  CHECK(r["times"] == json({-34, -21, 0, 21, 34}));

  CHECK(run("distortion --system skew --c0 0.3 --amp 0.2 --center 0 "
            "--halfwidth 0.02 --phi 0.4 --psi 0.6 --n 4 --out " + tmp.sub("d")) == 0);
  const json d = load(tmp.sub("d") + "/distortion.json");
  CHECK(std::abs(d["margin"].get<double>()) < 1e-12);

  CHECK(run("bound --system translation --center 0 --halfwidth 0.05 "
            "--kcenter 0.5 --khalfwidth 0.01 --n 13 --alpha 0.2 --out " +
            tmp.sub("b")) == 0);
  const json b = load(tmp.sub("b") + "/bound.json");
  CHECK(b["satisfied"] == true);
}
