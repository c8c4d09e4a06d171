#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speckle/cli.hpp"

using namespace speckle;
using namespace speckle::cli;

namespace {

RunConfig parse(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"speckle"};
  argv.insert(argv.end(), args.begin(), args.end());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

std::string first_line(const std::string& text, std::size_t skip = 0) {
  std::istringstream in(text);
  std::string line;
  for (std::size_t i = 0; i <= skip; ++i) std::getline(in, line);
  return line;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("value lists and ranges") {
  CHECK(parse_values("1,2.5,3") == std::vector<double>{1.0, 2.5, 3.0});
  const auto r = parse_values("0:1.5:0.1");
  REQUIRE(r.size() == 16);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == doctest::Approx(1.5).epsilon(1e-15));
  const auto lg = parse_values("1e2:1e5:log4");
  REQUIRE(lg.size() == 4);
  CHECK(lg.front() == 100.0);
  CHECK(lg[1] == doctest::Approx(1000.0).epsilon(1e-14));
  CHECK(lg.back() == 1e5);
  CHECK(parse_values("0.05:0.15:0.05,0.99").size() == 4);
  for (const char* bad : {"", "a", "1,,2", "1:2", "0:1:-0.1", "0:1:log1", "-1:1:log3", "1:2:3:4"})
    CHECK_THROWS_AS(parse_values(bad), UsageError);
}

TEST_CASE("defaults") {
  const auto c = parse({"fano-scatter", "--g", "1.5", "--s", "2"});
  CHECK(c.command == "fano-scatter");
  CHECK(c.channels == 50);
  CHECK(c.alpha2 == 10000.0);
  CHECK(c.trials == 1000);
  CHECK(c.seed == 1);
  CHECK(c.c == 1.0);
  CHECK(c.epsilon == 0.01);
  CHECK(c.out == "fano-scatter.csv");
  CHECK(c.format == Format::Csv);

  const auto sup = parse({"superres"});
  CHECK(sup.s == std::vector<double>{2.0, 4.0, 6.0, 8.0});
  CHECK(sup.budgets.back() == 3.5e10);
  CHECK(parse({"loss-sweep"}).g == std::vector<double>{0.5, 1.0, 1.5});
  CHECK(parse({"nm-sweep"}).axis == SweepAxis::ModeFillRatio);
  CHECK(parse({"universal-fano"}).axis == SweepAxis::CoherentFraction);
  const auto sw = parse({"snr-sweep", "--axis", "s"});
  CHECK(sw.axis == SweepAxis::DisorderS);
  CHECK(sw.values.front() == 1.5);
  CHECK(parse({"psf", "--format", "json"}).out == "psf.json");
}

TEST_CASE("bad input is a usage error") {
  CHECK_THROWS_AS(parse({"fano-scatter", "--s", "0.5"}), UsageError);
  CHECK_THROWS_AS(parse({"fano-scatter", "--g", "-1"}), UsageError);
  CHECK_THROWS_AS(parse({"fano-scatter", "--bogus", "3"}), UsageError);
  CHECK_THROWS_AS(parse({"warp-drive"}), UsageError);
  CHECK_THROWS_AS(parse({}), UsageError);
  CHECK_THROWS_AS(parse({"snr-sweep", "--axis", "speed"}), UsageError);
  CHECK_THROWS_AS(parse({"snr-sweep", "--axis", "fill", "--values", "0.1", "-M", "5", "-N", "6"}),
                  UsageError);
  CHECK_THROWS_AS(parse({"psf", "--q", "0"}), UsageError);
  CHECK_THROWS_AS(parse({"fano-scatter", "--format", "xml"}), UsageError);
  CHECK_THROWS_AS(parse({"fano-scatter", "--workers", "0"}), UsageError);
  CHECK_THROWS_AS(parse({"loss-sweep", "--loss-grid", "0,1.5"}), UsageError);

  try {
    parse({"fano-scatter", "--s", "0.5"});
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("--s") != std::string::npos);
  }
}

TEST_CASE("SPECKLE_SEED overrides --seed") {
  ::setenv("SPECKLE_SEED", "77", 1);
  CHECK(parse({"fano-scatter", "--seed", "5"}).seed == 77);
  ::setenv("SPECKLE_SEED", "seven", 1);
  CHECK_THROWS_AS(parse({"fano-scatter"}), UsageError);
  ::unsetenv("SPECKLE_SEED");
  CHECK(parse({"fano-scatter", "--seed", "5"}).seed == 5);
}

TEST_CASE("table headers") {
  auto header = [](std::initializer_list<const char*> args) {
    return first_line(to_csv(build_table(parse(args))));
  };
  CHECK(header({"fano-scatter", "--trials", "5"}) == "trial,seed,sum_T,mean_n,variance,fano");
  CHECK(header({"snr-sweep", "--axis", "g", "--values", "0:1.5:0.1", "--s", "2", "--trials", "5"}) ==
        "axis_value,mean_n,fano_ratio,snr_ratio,stderr_snr,trials");
  CHECK(header({"loss-sweep", "--trials", "5", "--loss-grid", "0,0.5"}) ==
        "g,loss_rate,mean_n,fano_ratio,snr_ratio,stderr_snr,trials");
  CHECK(header({"superres", "--trials", "5", "--budgets", "1e8"}) == "s,mean_n,Q,W,W_Q,J");
  CHECK(header({"psf", "--step", "0.5"}) == "z,classical,reconstruction");
  CHECK(header({"photon-budget"}) == "wavelength_m,power_w,duration_s,focus_fraction,mean_photons");

  const auto basis = to_csv(build_table(parse({"prolate-basis", "--modes", "3"})));
  CHECK(first_line(basis).rfind("# c=1 K=3 lambda=", 0) == 0);
  CHECK(first_line(basis, 1) == "z,weight,phi_0,phi_1,phi_2");
}

TEST_CASE("csv round-trips doubles") {
  const auto t = build_table(parse({"fano-scatter", "--trials", "20", "--seed", "4"}));
  const auto samples = run_fano_scatter({50, 2.0}, 1.5, 1e4, 20, 4);
  std::istringstream in(to_csv(t));
  std::string line;
  std::getline(in, line);
  for (const auto& x : samples) {
    std::getline(in, line);
    const auto fano_text = line.substr(line.rfind(',') + 1);
    CHECK(std::stod(fano_text) == x.fano);
  }
}

TEST_CASE("json output") {
  const auto j = nlohmann::json::parse(
      to_json(build_table(parse({"fano-scatter", "--trials", "3", "--format", "json"}))));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  CHECK(j[1]["trial"] == 1);
  CHECK(j[2]["fano"].get<double>() < 1.0);

  const auto doc = nlohmann::json::parse(to_json(build_table(parse({"prolate-basis", "--modes", "2"}))));
  CHECK(doc["comment"].get<std::string>().rfind("c=1 K=2", 0) == 0);
  CHECK(doc["rows"][0].contains("phi_1"));
}

TEST_CASE("photon budget command") {
  std::string summary;
  const auto t = build_table(parse({"photon-budget"}), &summary);
  REQUIRE(t.rows.size() == 1);
  const double n = std::get<double>(t.rows[0].back());
  CHECK(std::abs(n - 3.47e10) / 3.47e10 < 0.01);
}

TEST_CASE("oracle-check passes and execute writes identical files") {
  const auto dir = std::filesystem::temp_directory_path() / "speckle_test_cli";
  std::filesystem::create_directories(dir);
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  CHECK(execute(parse({"oracle-check", "--cases", "50", "--out", a.c_str()})) == 0);
  CHECK(execute(parse({"oracle-check", "--cases", "50", "--out", b.c_str()})) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(first_line(slurp(a)).rfind("case,M,N,s,g,alpha2,", 0) == 0);

  const auto c1 = (dir / "c1.csv").string(), c4 = (dir / "c4.csv").string();
  execute(parse({"snr-sweep", "--axis", "s", "--values", "2:8:2", "--trials", "64", "-j", "1", "-o", c1.c_str()}));
  execute(parse({"snr-sweep", "--axis", "s", "--values", "2:8:2", "--trials", "64", "-j", "4", "-o", c4.c_str()}));
  CHECK(slurp(c1) == slurp(c4));

  const char* argv[] = {"speckle", "fano-scatter", "--s", "0.5"};
  CHECK(run(4, argv) == 2);
  const auto missing = (dir / "no" / "such" / "dir.csv").string();
  const char* argv2[] = {"speckle", "photon-budget", "-o", missing.c_str()};
  CHECK(run(4, argv2) == 2);
  std::filesystem::remove_all(dir);
}
