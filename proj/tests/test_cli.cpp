#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "helpers.hpp"
#include "market_eq/config_file.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  static int serial = 0;
  const fs::path base = fs::temp_directory_path() / ("market_eq_cli_" + std::to_string(++serial));
  const std::string out = base.string() + ".out", err = base.string() + ".err";
  const std::string cmd = std::string("'") + MARKET_EQ_CLI + "' " + args + " >'" + out + "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = market_eq::read_text_file(out);
  r.err = market_eq::read_text_file(err);
  fs::remove(out);
  fs::remove(err);
  return r;
}

std::string cfg(const std::string& name) { return "'" + test::source_path("configs/" + name) + "'"; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("market_eq_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("solve monopoly") {
  const Run r = run("solve --config " + cfg("monopoly.cfg"));
  CHECK(r.code == 0);
  CHECK(r.out.find("price                   5\n") != std::string::npos);
  CHECK(r.out.find("provider_utility        12.5\n") != std::string::npos);
}

TEST_CASE("solve reference matches the golden report") {
  const fs::path out = scratch("solve.txt");
  const Run r = run("solve --config " + cfg("reference.cfg") + " --out '" + out.string() + "'");
  CHECK(r.code == 0);
  const std::string golden = market_eq::read_text_file(test::source_path("tests/fixtures/reference_solve.txt"));
  CHECK(r.out == golden);
  CHECK(market_eq::read_text_file(out) == golden);
  fs::remove(out);
}

TEST_CASE("config errors exit 2 and name the user") {
  const Run r = run("solve --config " + cfg("invalid_dominance.cfg"));
  CHECK(r.code == 2);
  CHECK(r.err.find("user 1") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("solve").code == 2);
  CHECK(run("solve --config x --bogus").code == 2);
  CHECK(run("certify --count many").code == 2);
  CHECK(run("certify --fault everything").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("I/O errors exit 3") {
  CHECK(run("solve --config /nonexistent/market.cfg").code == 3);
  CHECK(run("solve --config " + cfg("reference.cfg") + " --out /proc/market_eq/report.txt").code == 3);
  CHECK(run("figure3 --config " + cfg("reference.cfg") + " --out-dir /proc/market_eq").code == 3);
}

TEST_CASE("sweep writes csv and svg") {
  const fs::path dir = scratch("sweep");
  const Run r = run("sweep --config " + cfg("reference.cfg") + " --spec '" +
                    test::source_path("sweeps/indirect.sweep") + "' --out-dir '" + dir.string() + "'");
  CHECK(r.code == 0);
  const std::string csv = market_eq::read_text_file(dir / "indirect.csv");
  CHECK(csv.rfind("indirect,user_utility_mean,provider_utility,total_demand,price,participating_devices\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(fs::exists(dir / "indirect.svg"));

  const fs::path bad = dir / "bad.sweep";
  {
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("parameter = indirect\nvalues = 0.1\noutputs =  ,\n", f);
    std::fclose(f);
  }
  CHECK(run("sweep --config " + cfg("reference.cfg") + " --spec '" + bad.string() + "' --out-dir '" +
            dir.string() + "'")
            .code == 2);
  fs::remove_all(dir);
}

TEST_CASE("figure3 writes every artifact") {
  const fs::path dir = scratch("fig3");
  const Run r = run("figure3 --config " + cfg("reference.cfg") + " --out-dir '" + dir.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  for (const char* name : {"fig3a_users.csv", "fig3a_users.svg", "fig3b_vendors.csv", "fig3b_vendors.svg",
                           "fig3c_cost.csv", "fig3c_cost.svg", "claims.txt"})
    CHECK(fs::exists(dir / name));
  fs::remove_all(dir);
}

TEST_CASE("certify") {
  const fs::path out = scratch("cert.json");
  const Run ok = run("certify --seed 7 --count 5 --out '" + out.string() + "'");
  CHECK(ok.code == 0);
  const std::string json = market_eq::read_text_file(out);
  CHECK(json.find("\"passed\": true") != std::string::npos);
  CHECK(json.find("stage1.price") != std::string::npos);

  const Run empty = run("certify --count 0");
  CHECK(empty.code == 0);
  CHECK(empty.out.empty());

  for (const char* fault : {"demand", "reward", "price"}) {
    INFO(fault);
    const Run bad = run(std::string("certify --count 3 --fault ") + fault + " --out '" + out.string() + "'");
    CHECK(bad.code == 4);
    const std::string report = market_eq::read_text_file(out);
    CHECK(report.find("first_counterexample") != std::string::npos);
    CHECK(report.find("[user.0]") != std::string::npos);
  }
  fs::remove(out);
}
