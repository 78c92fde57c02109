#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "esslab/cli.hpp"
#include "esslab/error.hpp"
#include "esslab/spectra.hpp"
#include "support.hpp"

using namespace esslab;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "esslab");
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("esslab_test_" + name)).string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("structural spectrum of the free operator") {
  auto r = cli({"spectrum", "--scenario", test::scenario_path("free"), "--method", "structural"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["intervals"].size() == 1);
  CHECK(std::abs(j["intervals"][0][0].get<double>() + 2) < 1e-10);
  CHECK(std::abs(j["intervals"][0][1].get<double>() - 2) < 1e-10);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({"spectrum", "--scenario", "nosuch.json"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"spectrum", "--scenario", test::scenario_path("free"), "--method", "magic"}).code == 2);
  CHECK(cli({"verify", "thm-0-0"}).code == 2);
  CHECK(cli({"verify", "weyl", "--budget", "12x"}).code == 2);
  CHECK(cli({"criteria", "krein", "--scenario", test::scenario_path("free")}).code == 2);
  auto h = cli({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("spectrum") != std::string::npos);
}

TEST_CASE("verification exit codes") {
  CHECK(cli({"verify", "weyl"}).code == 0);
  auto fail = cli({"criteria", "krein", "--scenario", test::scenario_path("free"), "--targets", "-1,1", "--N", "400"});
  CHECK(fail.code == 1);
  CHECK(nlohmann::json::parse(fail.out)["verdict"] == "fails");
  auto ok = cli({"criteria", "chihara", "--scenario", test::scenario_path("decaying_alternating"), "--targets",
                 "-1,1", "--N", "4000"});
  CHECK(ok.code == 0);
}

TEST_CASE("unsupported requests exit 3") {
  auto r = cli({"spectrum", "--scenario", test::scenario_path("free"), "--method", "discriminant"});
  CHECK(r.code == 0);
  auto bad = cli({"spectrum", "--scenario", test::scenario_path("decaying_alternating"), "--method", "discriminant"});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("unsupported") != std::string::npos);
}

TEST_CASE("sweep rows are sorted and written with provenance") {
  std::string path = temp_path("sweep.csv");
  auto r = cli({"sweep", "--scenario", test::scenario_path("free"), "--sizes", "600,300", "--out", path});
  CHECK(r.code == 0);
  std::string csv = slurp(path);
  CHECK(csv.rfind("N,hausdorff\n300,", 0) == 0);
  CHECK(csv.find("\n600,") != std::string::npos);
  auto side = nlohmann::json::parse(slurp(path + ".json"));
  CHECK(side.contains("build"));
  CHECK(side.contains("tolerances"));
  CHECK(side["scenario"]["id"] == "free");
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}

TEST_CASE("circle clouds are sorted angles") {
  std::string path = temp_path("cloud.csv");
  auto r = cli({"spectrum", "--scenario", test::scenario_path("cmv_const"), "--method", "truncation", "--N", "300",
                "--out", path});
  CHECK(r.code == 0);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta,zero");
  double prev = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    double theta = std::stod(line.substr(0, line.find(',')));
    CHECK(theta >= 0.0);
    CHECK(theta < kTwoPi);
    CHECK(theta >= prev);
    prev = theta;
    ++rows;
  }
  CHECK(rows > 0);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}

TEST_CASE("empty results give a header-only CSV") {
  std::string path = temp_path("empty.csv");
  emit_plot_data(PlotTable{{"N", "hausdorff"}, {}}, nlohmann::json::object(), path);
  CHECK(slurp(path) == "N,hausdorff\n");
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}

TEST_CASE("unwritable output exits 3") {
  CHECK_ERROR_KIND(emit_plot_data(PlotTable{{"x"}, {}}, {}, "/nonexistent-dir/x.csv"), ErrorKind::kIo);
  auto r = cli({"sweep", "--scenario", test::scenario_path("free"), "--sizes", "300", "--out", "/nonexistent-dir/x.csv"});
  CHECK(r.code == 3);
}

TEST_CASE("identical inputs give byte-identical outputs") {
  std::vector<std::string> args{"spectrum", "--scenario", test::scenario_path("period2"), "--method", "truncation",
                                "--N", "400"};
  auto a = cli(args);
  auto b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("localization table") {
  auto r = cli({"verify", "localization", "--budget", "4,8,16"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("L,c_L,C_norm,C_norm_L2\n4,", 0) == 0);
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, -2.0, 1e-300, 3.141592653589793}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(2.0) == "2");
}

}  // TEST_SUITE
