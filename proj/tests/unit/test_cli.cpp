#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <pathprob/numerics.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = pathprob::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(PATHPROB_CONFIG_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("positivity report for the unit cosine") {
  auto r = run({"positivity", "-c", config("cosine.json"), "--gamma", "0.1", "--trials", "2000"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["lambda_paper"].get<double>() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(j["lambda_strict"].get<double>() == doctest::Approx(1 / 26.69633831013799).epsilon(1e-8));
  CHECK(j["property_test"]["negative_paths"] == 0);
  CHECK(j["witness"]["negative"] == true);
}

TEST_CASE("free transition probability by quadrature") {
  auto r = run({"transition", "-c", config("free.json"), "-n", "2", "--gamma", "0.05", "--method", "quadrature"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(1 / pathprob::two_pi).epsilon(0.01));
  CHECK(j["method"] == "quadrature");
  CHECK(j["refinement"].size() == 3);
}

TEST_CASE("transition CSV columns") {
  auto r = run({"transition", "-c", config("free.json"), "-n", "2", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n,gamma,points_per_dim,value,refinement_delta\n", 0) == 0);
}

TEST_CASE("weight on a straight free path") {
  auto r = run({"weight", "-c", config("free.json"), "--zb", "1", "--path", config("straight_free.csv")});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["W"].get<double>() > 0);
  CHECK(j["positive"] == true);
  CHECK(j["per_step"].size() == 3);
  CHECK(j["lambda_strict"] == "inf");
}

TEST_CASE("Monte Carlo output is reproducible") {
  std::vector<std::string> args{"transition", "-c", config("weak.json"), "--method", "mc", "--samples", "20000", "--seed", "5"};
  auto a = run(args), b = run(args);
  args.push_back("--threads");
  args.push_back("1");
  auto c = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  auto j = json::parse(a.out);
  for (const char* k : {"value", "std_error", "ess", "negative_mass_fraction", "n", "gamma", "seed"}) CHECK(j.contains(k));
  CHECK(j["seed"] == 5);
}

TEST_CASE("scan output is reproducible apart from the timestamp") {
  std::vector<std::string> args{"scan", "concentration", "-c", config("free.json"), "-n", "8", "--samples", "5000",
                                "--seed", "3"};
  auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  auto ja = json::parse(a.out), jb = json::parse(b.out);
  CHECK(ja["provenance"].contains("timestamp"));
  ja["provenance"].erase("timestamp");
  jb["provenance"].erase("timestamp");
  CHECK(ja.dump() == jb.dump());
  CHECK(ja["rows"].size() == 4);
  CHECK(ja["provenance"]["inputs"]["sampler"]["seed"] == 3);
}

TEST_CASE("csv scan writes a provenance sidecar") {
  const std::string out = "pathprob_cli_scan.csv";
  auto r = run({"scan", "linearization", "-c", config("cosine.json"), "--format", "csv", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(slurp(out).rfind("z,s,eps,normalized_diff,raw_diff,slope,slope_raw\n", 0) == 0);
  auto prov = json::parse(slurp(out + ".provenance.json"));
  CHECK(prov["scan"] == "linearization");
  std::remove(out.c_str());
  std::remove((out + ".provenance.json").c_str());
}

TEST_CASE("usage errors exit 1 with usage text") {
  auto r = run({"transition", "--no-such-flag"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"transition", "-c", "missing.json"}).code == 1);
  CHECK(run({"transition", "-c", config("free.json"), "--format", "xml"}).code == 1);
  CHECK(run({"transition", "-c", config("free.json"), "-n", "9"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numeric failures exit 2") {
  // window-truncated amplitude composition
  auto r = run({"ck", "-c", config("ck.json"), "--source", "amplitude", "--window", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("widen") != std::string::npos);
}

TEST_CASE("negative weights beyond the threshold are reported with exit 0") {
  // eps = 0.5 is far above lambda_strict, so exit 3 does not apply
  const std::string path = "pathprob_cli_negative.csv";
  {
    std::ofstream f(path);
    f << "j,t,z\n0,0,-1.3207963267948966\n1,0.5,-1.5707963267948966\n2,1,-1.3207963267948966\n";
  }
  auto r = run({"weight", "-c", config("cosine.json"), "-n", "2", "--za", "-1.3207963267948966", "--zb",
                "-1.3207963267948966", "--path", path});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["positive"] == false);
  std::remove(path.c_str());

  auto ok = run({"positivity", "-c", config("weak.json"), "--trials", "500"});
  CHECK(ok.code == 0);
}

TEST_CASE("oracle and ck subcommands") {
  auto r = run({"oracle", "-c", config("free.json"), "--zb", "0.5"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["modulus_squared"].get<double>() == doctest::Approx(1 / pathprob::two_pi).epsilon(1e-4));
  auto c = run({"ck", "-c", config("ck.json"), "--source", "amplitude"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["residual"].get<double>() <= 1e-6);
}

} // TEST_SUITE
