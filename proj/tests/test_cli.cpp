#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "outlier/commands.hpp"
#include "outlier/error.hpp"

using namespace outlier;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "outlier_cli");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int shell(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "outlier_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("analyze") {
  auto r = cli({"analyze", "--potential", "[0,0,0.5]", "--a", "2"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["regime"] == "Supercritical");
  CHECK(j["a_star"].get<double>() == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(j["curvature_c"].get<double>() == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(j["alpha"].get<double>() == doctest::Approx(-2.0).epsilon(1e-11));
  CHECK(j["l1"].get<double>() == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(j.contains("l2"));
  CHECK(j["config"]["a"] == 2.0);

  j = cli({"analyze", "--a", "0.5"}).report();
  CHECK(j["regime"] == "Subcritical");
  CHECK(j["b_star"].get<double>() == doctest::Approx(2.5).epsilon(1e-10));
  CHECK_FALSE(j.contains("a_star"));

  j = cli({"analyze", "--potential", "[0,0,0,0,0.25]", "--a", "0.1"}).report();
  CHECK(j["regime"] == "Subcritical");
  CHECK(j["a_c"].get<double>() == doctest::Approx(1.7548).epsilon(1e-4));

  CHECK(cli({"analyze", "--a", "1"}).report()["regime"] == "Critical");
}

TEST_CASE("analyze sweep") {
  auto r = cli({"analyze", "--sweep", "a=0.5:1.5:5"});
  REQUIRE(r.code == 0);
  auto rows = r.report()["sweep_results"];
  REQUIRE(rows.size() == 5);
  CHECK(rows[0]["regime"] == "Subcritical");
  CHECK(rows[2]["regime"] == "Critical");
  CHECK(rows[4]["regime"] == "Supercritical");
  auto csv = cli({"analyze", "--sweep", "a=0.5:1.5:5", "--format", "csv"});
  CHECK(csv.out.rfind("a,regime,a_star,b_star\n", 0) == 0);
  CHECK(cli({"analyze", "--sweep", "b=0:1:3"}).code == 1);
}

TEST_CASE("predict") {
  auto r = cli({"predict", "--a", "2", "--n", "400", "--grid", "2.2:2.8:401"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["integrated_mass"].get<double>() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(j["law_r1"]["variance"].get<double>() == doctest::Approx(1.0 / 400 * 0.75).epsilon(1e-9));

  auto csv = cli({"predict", "--a", "2", "--n", "400", "--grid", "2.2:2.8:401", "--format", "csv"});
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x,density");
  std::vector<double> xs, ys;
  while (std::getline(lines, line)) {
    auto comma = line.find(',');
    xs.push_back(std::stod(line.substr(0, comma)));
    ys.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(xs.size() == 401);
  double mass = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) mass += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));

  auto sub = cli({"predict", "--a", "0.5", "--n", "400"});
  REQUIRE(sub.code == 0);
  CHECK(sub.report()["suppression"]["center"].get<double>() == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(cli({"predict", "--a", "0.5", "--n", "400", "--format", "csv"}).code == 1);

  CHECK(cli({"predict", "--a", "2", "--n", "400", "--grid", "2.5:2.5:10"}).code == 1);
  CHECK(cli({"predict", "--a", "2", "--n", "400", "--grid", "2.2:2.8:0"}).code == 1);
  CHECK(cli({"predict", "--a", "2", "--n", "400", "--grid", "nonsense"}).code == 1);
  CHECK(cli({"predict", "--a", "1", "--n", "400"}).code == 1);
  auto big_r = cli({"predict", "--a", "2", "--n", "40", "--r", "10"});
  CHECK(big_r.code == 1);
  CHECK(big_r.err.find("r < n/4") != std::string::npos);
}

TEST_CASE("oracle") {
  auto r = cli({"oracle", "--a", "2", "--n", "24", "--r", "1"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(std::abs(j["trace"].get<double>() - 24) < 1e-10);
  REQUIRE(j["expected_counts"].size() == 1);
  double c = j["expected_counts"][0]["expected_count"].get<double>();
  CHECK(j["expected_counts"][0]["lo"].get<double>() == doctest::Approx(2.2));
  CHECK(c >= 0.8);
  CHECK(c <= 1.2);

  auto w = cli({"oracle", "--a", "0.5", "--n", "24", "--count", "2.35:2.65", "--count", "-1:1"}).report();
  REQUIRE(w["expected_counts"].size() == 2);
  CHECK(w["expected_counts"][0]["expected_count"].get<double>() < 0.05);

  auto csv = cli({"oracle", "--r", "0", "--n", "24", "--grid", "-0.5:0.5:11", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("x,density\n", 0) == 0);

  auto low = cli({"oracle", "--a", "2", "--n", "24", "--precision-bits", "128"});
  CHECK(low.code == 1);
  CHECK(low.err.find("192") != std::string::npos);
  CHECK(cli({"oracle", "--a", "2", "--n", "40"}).code == 1);
}

TEST_CASE("mc") {
  auto a = cli({"mc", "--a", "2", "--n", "80", "--trials", "60", "--seed", "9"});
  auto b = cli({"mc", "--a", "2", "--n", "80", "--trials", "60", "--seed", "9"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(cli({"mc", "--a", "2", "--n", "80", "--trials", "60", "--seed", "10"}).out != a.out);
  auto j = a.report();
  CHECK(j["outlier_means"].size() == 1);
  CHECK(j["predicted"]["mean"].get<double>() == doctest::Approx(2.5).epsilon(1e-10));
  CHECK_FALSE(j.contains("wall_time"));

  auto sub = cli({"mc", "--a", "0.5", "--n", "80", "--trials", "40", "--threshold", "2.4"}).report();
  CHECK(sub["threshold"] == 2.4);
  CHECK(sub["escape_rate"].get<double>() <= 0.1);

  auto csv = cli({"mc", "--a", "2", "--n", "80", "--r", "2", "--trials", "5", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 1 + 5 * 2);

  auto quartic = cli({"mc", "--potential", "[0,0,0,0,0.25]", "--a", "3", "--n", "80"});
  CHECK(quartic.code == 1);
  CHECK(quartic.err.find("MC requires Gaussian potential") != std::string::npos);
}

TEST_CASE("compare against the oracle") {
  auto sup = cli({"compare", "--against", "oracle", "--a", "2", "--n", "24"});
  REQUIRE(sup.code == 0);
  CHECK(sup.report()["verdict"] == "pass");
  auto sub = cli({"compare", "--against", "oracle", "--a", "0.5", "--n", "24"});
  REQUIRE(sub.code == 0);
  CHECK(sub.report()["verdict"] == "pass");
  CHECK(sub.report()["metrics"]["expected_count"].get<double>() < 0.05);

  CHECK(cli({"compare", "--against", "oracle", "--a", "0.5", "--n", "24", "--regime", "Supercritical"}).code == 1);
  CHECK(cli({"compare", "--against", "oracle", "--a", "0.5", "--n", "24", "--regime", "Subcritical"}).code == 0);
  CHECK(cli({"compare", "--against", "nothing", "--a", "2", "--n", "24"}).code == 1);
}

TEST_CASE("compare against Monte Carlo") {
  auto r = cli({"compare", "--against", "mc", "--a", "2", "--n", "500", "--r", "1", "--trials", "2000", "--seed", "1"});
  REQUIRE(r.code == 0);
  auto m = r.report()["metrics"];
  CHECK(m["mean_pass"] == true);
  CHECK(m["variance_pass"] == true);
  CHECK(m["ks_pass"] == true);
  CHECK(r.report()["verdict"] == "pass");
}

TEST_CASE("config file with flag overrides") {
  auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"potential": [0, 0, 0.5], "a": 0.5, "n": 24, "r": 1})";
  auto j = cli({"analyze", "--config", cfg.string()}).report();
  CHECK(j["regime"] == "Subcritical");
  j = cli({"analyze", "--config", cfg.string(), "--a", "3"}).report();
  CHECK(j["regime"] == "Supercritical");
  CHECK(j["config"]["a"] == 3.0);
  CHECK(j["config"]["n"] == 24);

  std::ofstream(cfg) << R"({"a": 0.5, "colour": "blue"})";
  CHECK(cli({"analyze", "--config", cfg.string()}).code == 1);
  std::ofstream(cfg) << "{not json";
  CHECK(cli({"analyze", "--config", cfg.string()}).code == 1);
  CHECK(cli({"analyze", "--config", scratch("missing.json").string()}).code == 1);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"analyze"}).code == 1);
  CHECK(cli({"analyze", "--a", "-1"}).code == 1);
  CHECK(cli({"analyze", "--a", "2", "--potential", "[0,0,0,1]"}).code == 1);
  CHECK(cli({"analyze", "--a", "2", "--potential", "oops"}).code == 1);
  CHECK(cli({"analyze", "--a", "2", "--format", "xml"}).code == 1);
  CHECK(cli({"analyze", "--help"}).code == 0);
}

TEST_CASE("mathematical failures exit with 2") {
  auto r = cli({"analyze", "--potential", "[0,0,-3,0,0.25]", "--a", "1"});
  CHECK(r.code == 2);
}

TEST_CASE("binary writes outputs atomically") {
  auto out = scratch("report.json");
  std::filesystem::remove(out);
  std::string bin = OUTLIER_CLI_PATH;
  CHECK(shell(bin + " oracle --a 2 --n 12 --out " + out.string()) == 0);
  auto first = slurp(out);
  CHECK(json::parse(first)["n"] == 12);
  CHECK_FALSE(std::filesystem::exists(out.string() + ".tmp"));
  CHECK(shell(bin + " oracle --a 2 --n 12 --out " + out.string()) == 0);
  CHECK(slurp(out) == first);

  CHECK(shell(bin + " oracle --a 2 --n 12 --precision-bits 64 2>/dev/null") == 1);
  CHECK(shell(bin + " analyze --potential '[0,0,-3,0,0.25]' --a 1 2>/dev/null") == 2);
  CHECK(shell(bin + " analyze --a 2 > /dev/null") == 0);
}
