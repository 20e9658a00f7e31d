#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disent/cli.hpp"
#include "disent/io.hpp"

using json = nlohmann::ordered_json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("disent-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kE1 = R"({
  "atoms": [{"id": "a", "mu": 1.0}, {"id": "b", "mu": 1.0}],
  "theta": [0.5, 0.5],
  "q": 0.5,
  "families": [
    [{"key": "u", "values": [3, 0]}, {"key": "v", "values": [0, 1]}],
    [{"key": "u", "values": [3, 0]}, {"key": "v", "values": [0, 1]}]
  ]
})";

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
  json j;
};

RunResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = disent::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  if (!r.out.empty()) r.j = json::parse(r.out, nullptr, false);
  return r;
}

}  // namespace

TEST_CASE("cli solve emits the extremizer report") {
  TempDir tmp;
  const auto input = tmp.file("e1.json", kE1);
  auto r = run_cli({"solve", "--input", input});
  REQUIRE(r.code == 0);
  REQUIRE_FALSE(r.j.is_discarded());
  CHECK(r.j["command"] == "solve");
  CHECK(r.j["instance"]["d"] == 2);
  CHECK(r.j["instance"]["q"].get<double>() == doctest::Approx(0.5));
  const auto& ext = r.j["result"]["extremizer"];
  CHECK(ext["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ext["g"][0][0].get<double>() == doctest::Approx(0.75).epsilon(1e-7));
  CHECK(ext["g"][1][1].get<double>() == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(r.j["timings"].contains("total_ms"));
}

TEST_CASE("cli output is deterministic apart from timings") {
  TempDir tmp;
  const auto input = tmp.file("e1.json", kE1);
  auto a = run_cli({"solve", "--input", input, "--seed", "9"});
  auto b = run_cli({"solve", "--input", input, "--seed", "9"});
  a.j.erase("timings");
  b.j.erase("timings");
  CHECK(a.j.dump() == b.j.dump());
}

TEST_CASE("cli --q override and oracle subcommand") {
  TempDir tmp;
  const auto input = tmp.file("e1.json", kE1);
  auto r = run_cli({"oracle", "--input", input, "--grid-resolution", "500"});
  REQUIRE(r.code == 0);
  CHECK(r.j["result"]["constant"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.j["result"]["resolution"] == 500);

  auto rq = run_cli({"solve", "--input", input, "--q", "0.75"});
  REQUIRE(rq.code == 0);
  CHECK(rq.j["instance"]["q"].get<double>() == doctest::Approx(0.75));
  CHECK(rq.j["result"]["extremizer"]["value"].get<double>() > 2.0);
}

TEST_CASE("cli saturate") {
  TempDir tmp;
  const auto input = tmp.file("e1.json", kE1);
  auto r = run_cli({"saturate", "--input", input});
  REQUIRE(r.code == 0);
  const auto& fam = r.j["result"]["families"][0];
  CHECK(fam["saturating"] == true);
  CHECK(fam["strong_key"].is_null());
  CHECK(fam["cover"]["covers"] == true);
  CHECK(fam["cover"]["chosen"].size() == 2);
}

TEST_CASE("cli verify: pass, fail, and missing phi") {
  TempDir tmp;
  json inst = json::parse(kE1);
  inst["phi"] = {{"constant", 2.0},
                 {"values", {{2.0 / 3.0, 2.0}, {2.0 / 3.0, 2.0}}}};
  const auto good = tmp.file("good.json", inst.dump());
  auto r = run_cli({"verify", "--input", good, "--tol", "1e-6"});
  CHECK(r.code == 0);
  CHECK(r.j["result"]["report"]["pass"] == true);

  inst["phi"]["values"][0][1] = 2.1;
  const auto bad = tmp.file("bad.json", inst.dump());
  auto rb = run_cli({"verify", "--input", bad, "--tol", "1e-6"});
  CHECK(rb.code == 2);
  CHECK(rb.j["result"]["report"]["pass"] == false);

  const auto plain = tmp.file("plain.json", kE1);
  auto rm = run_cli({"verify", "--input", plain});
  CHECK(rm.code == 1);
  CHECK(rm.j["error"] == "malformed_json");
}

TEST_CASE("cli error paths produce single-line machine-readable JSON") {
  TempDir tmp;
  const auto broken = tmp.file("broken.json", "{not json");
  auto r = run_cli({"solve", "--input", broken});
  CHECK(r.code == 1);
  CHECK(r.out.find('\n') == r.out.size() - 1);
  CHECK(r.j["error"] == "malformed_json");

  auto missing = run_cli({"solve", "--input", tmp.file("nope.json")});
  CHECK(missing.code == 1);
  CHECK(missing.j["error"] == "io_error");

  auto badcmd = run_cli({"frobnicate", "--input", "x"});
  CHECK(badcmd.code == 1);
  CHECK(badcmd.j["error"] == "bad_arguments");
}

TEST_CASE("cli lift report re-ingests with a byte-identical canonical instance") {
  TempDir tmp;
  const auto input = tmp.file("e1.json", kE1);
  auto r = run_cli({"lift", "--input", input});
  REQUIRE(r.code == 0);
  const json emitted = r.j["result"]["instance"];
  CHECK(emitted["q"].get<double>() == 1.0);
  CHECK(emitted["theta"].size() == 3);

  // a report file is a valid input: the instance is found under result.instance
  auto loaded = disent::io::parse_instance(r.j);
  CHECK(disent::io::instance_to_json(loaded.instance).dump() == emitted.dump());
}

TEST_CASE("cli --output mirrors stdout bytes") {
  TempDir tmp;
  const auto input = tmp.file("e1.json", kE1);
  const auto outfile = tmp.file("report.json");
  auto r = run_cli({"oracle", "--input", input, "--output", outfile, "--pretty"});
  REQUIRE(r.code == 0);
  std::ifstream f(outfile, std::ios::binary);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == r.out);
  CHECK(r.out.find('\n') != std::string::npos);  // pretty spans lines
}
