#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tsh/cli.hpp"
#include "tsh/config.hpp"

using namespace tsh;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(TSH_TEST_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tsh_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const std::string& name, const std::string& yaml) {
  const fs::path p = fs::temp_directory_path() / "tsh_cli_cfg" / (name + ".yaml");
  fs::create_directories(p.parent_path());
  std::ofstream(p) << yaml;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("check exit codes") {
  const Result h = run({"check", "--config", data("harmonic.yaml")});
  CHECK(h.code == cli::kOk);
  CHECK(json::parse(h.out)["verdict"] == "hamiltonian");
  const Result d = run({"check", "--config", data("damped.yaml")});
  CHECK(d.code == cli::kNotHamiltonian);
  const json j = json::parse(d.out);
  CHECK(j["verdict"] == "not_hamiltonian");
  CHECK(std::abs(j["trace_violation"].get<double>() - 0.1) <= 1e-8);
  CHECK_FALSE(d.err.empty());
}

TEST_CASE("errors exit 2 with a message") {
  const Result bad = run({"check", "--config", data("bad.yaml")});
  CHECK(bad.code == cli::kError);
  CHECK(bad.err.find("chek") != std::string::npos);
  CHECK(bad.err.find("check") != std::string::npos);
  CHECK(run({"check", "--config", "/nonexistent/x.yaml"}).code == cli::kError);
  CHECK(run({"frobnicate"}).code == cli::kError);
  CHECK(run({"check", "--format", "xml"}).code == cli::kError);
  const Result parse = run({"check", "--config", write_config("parse", "field: {q: [\"p1 +\"], p: [\"-q1\"]}\n")});
  CHECK(parse.code == cli::kError);
  CHECK(parse.err.find("column") != std::string::npos);
  const Result range = run({"check", "--config", write_config("range", "check: {samples: 0}\nfield: {catalog: harmonic}\n")});
  CHECK(range.code == cli::kError);
}

TEST_CASE("flags override the file") {
  const Result r = run({"check", "--config", data("damped.yaml"), "--tol", "0.5", "--seed", "3"});
  CHECK(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["tolerance"] == 0.5);
  CHECK(j["sampling"].get<std::string>().find("seed 3") != std::string::npos);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "timescale: \"points: 0 1 2\"\nfield: {catalog: coupled}\ncheck: {box: [-2, 2], samples: 16}\n"
      "simulate: {q0: [1, 0], p0: [0, 1], form: integral}\nseed: 9\n");
  CHECK(c.catalog == "coupled");
  CHECK(c.box.lo == -2.0);
  CHECK(c.samples == 16);
  CHECK(c.form == "integral");
  CHECK(c.seed == 9);
  CHECK(resolve_field(c).dim() == 2);
  CHECK(resolve_hamiltonian(c).has_value());
  CHECK_THROWS_AS(validate(parse_config("simulate: {form: sideways}\n")), ConfigError);
  CHECK_THROWS(resolve_field(parse_config("field: {catalog: nope}\n")));
  CHECK_THROWS_AS(parse_config("dim: [1, 2]\n"), ConfigError);
}

TEST_CASE("calculus table") {
  const std::string cfg = write_config("three", "timescale: \"points: 0 1 2\"\n");
  const Result r = run({"calculus", "--config", cfg});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  REQUIRE(j["points"].size() == 3);
  CHECK(j["points"][0]["mu"] == 1.0);
  CHECK(j["points"][1]["mu"] == 1.0);
  CHECK(j["points"][2]["mu"] == 0.0);
  CHECK(j["points"][0]["inverse_residual"].is_null());
  const Result c = run({"calculus", "--config", cfg, "--format", "csv"});
  CHECK(first_line(c.out) ==
        "t,right,left,sigma,rho,mu,nu,in_upper,in_lower,junction,inverse_residual,composition_residual,"
        "composition_dual_residual");
}

TEST_CASE("check does not depend on the time scale") {
  const Result a = run({"check", "--config", write_config("ta", "timescale: \"points: 0 1 2\"\nfield: {catalog: pendulum}\n")});
  const Result b = run({"check", "--config",
                        write_config("tb", "timescale: \"union: [0,1]; 2; dense_step: 0.01\"\nfield: {catalog: pendulum}\n")});
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
}

TEST_CASE("reconstruct output") {
  const fs::path dir = scratch("reconstruct");
  const Result r = run({"reconstruct", "--config", data("harmonic.yaml"), "--out", dir.string()});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["roundtrip_residual"].get<double>() <= 1e-8);
  CHECK(first_line(slurp(dir / "hamiltonian.csv")) == "q1,p1,H");
  CHECK(fs::exists(dir / "reconstruct.json"));
  // Exit 1 is reserved for the check verdict; refusing to reconstruct is an error.
  CHECK(run({"reconstruct", "--config", data("damped.yaml")}).code == cli::kError);
}

TEST_CASE("simulate output is byte-identical across runs") {
  const std::string cfg = write_config(
      "sim", "timescale: \"union: 0; 0.1; 0.2; 0.3; 0.4; [0.5, 1]; dense_step: 0.01\"\nfield: {catalog: pendulum}\n"
             "simulate: {q0: [0.5], p0: [0]}\n");
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const Result ra = run({"simulate", "--config", cfg, "--out", a.string()});
  const Result rb = run({"simulate", "--config", cfg, "--out", b.string()});
  REQUIRE(ra.code == cli::kOk);
  CHECK(ra.out == rb.out);
  for (const char* f : {"simulate.json", "trajectory.csv", "energy.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(first_line(slurp(a / "trajectory.csv")) == "t,kind,q1,p1,newton_iters,residual");
  CHECK(first_line(slurp(a / "energy.csv")) == "t,H");
  const json j = json::parse(ra.out);
  CHECK(j["residual_star1"]["value"].get<double>() <= 1e-8);
  const Result csv = run({"simulate", "--config", cfg, "--format", "csv"});
  CHECK(first_line(csv.out) == "t,kind,q1,p1,newton_iters,residual");
}

TEST_CASE("simulate reconstructs H from a bare field") {
  const std::string cfg = write_config("bare", "timescale: \"points: 0 0.1 0.2 0.3\"\nfield: {q: [p1], p: [\"-q1\"]}\n");
  const Result r = run({"simulate", "--config", cfg});
  CHECK(r.code == cli::kOk);
  const std::string dcfg = write_config("bare_d", "timescale: \"points: 0 0.1 0.2 0.3\"\nfield: {q: [p1], p: [\"-q1-0.1*p1\"]}\n");
  CHECK(run({"simulate", "--config", dcfg}).code != cli::kOk);
}
