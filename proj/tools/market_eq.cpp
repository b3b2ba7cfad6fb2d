// market_eq: solve, sweep, figure3 and certify subcommands.
//
// Exit codes: 0 success, 2 config or usage error, 3 I/O or solver error,
// 4 certification failure or violated directional claim.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "market_eq/certify.hpp"
#include "market_eq/config_file.hpp"
#include "market_eq/errors.hpp"
#include "market_eq/experiments.hpp"
#include "market_eq/pricing.hpp"
#include "market_eq/report.hpp"
#include "market_eq/svg_chart.hpp"

namespace fs = std::filesystem;
using namespace market_eq;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kIo = 3, kCheck = 4 };

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

int cmd_solve(const fs::path& config, const fs::path& out) {
  const MarketConfig cfg = load_config(config);
  const std::string report = format_solve_report(cfg, optimize_price(cfg));
  std::fputs(report.c_str(), stdout);
  if (!out.empty()) write_text(out, report);
  return kOk;
}

int cmd_sweep(const fs::path& config, const fs::path& spec_path, const fs::path& out_dir) {
  const SweepSpec spec = parse_sweep_spec(read_text_file(spec_path), load_config(config));
  make_dir(out_dir);
  const SweepResult result = run_sweep(spec);
  for (std::size_t k = 0; k < result.rows.size(); ++k)
    if (result.rows[k].error)
      std::fprintf(stderr, "row %zu (%s = %g) failed: %s\n", k, result.parameter.c_str(), result.rows[k].value,
                   result.rows[k].error->c_str());
  const fs::path stem = out_dir / result.parameter;
  write_text(fs::path(stem).concat(".csv"), to_csv(result));
  emit_chart(result, result.columns, fs::path(stem).concat(".svg"));
  std::printf("wrote %s.csv and %s.svg (%zu rows)\n", stem.c_str(), stem.c_str(), result.rows.size());
  return kOk;
}

int cmd_figure3(const fs::path& config, const fs::path& out_dir) {
  const MarketConfig cfg = load_config(config);
  make_dir(out_dir);
  const Figure3Result result = figure3_suite(cfg);
  write_figure3(result, out_dir);
  for (const auto& c : result.claims) std::printf("%s %s\n", c.passed ? "PASS" : "FAIL", c.id.c_str());
  require_claims(result);
  return kOk;
}

int cmd_certify(std::uint64_t seed, std::size_t count, const fs::path& out, Fault fault) {
  const CertificationReport report = certify({seed, count, fault});
  for (const auto& c : report.checks)
    std::printf("%s %-32s %zu/%zu\n", c.failures == 0 ? "PASS" : "FAIL", c.name.c_str(), c.runs - c.failures,
                c.runs);
  const std::string json = report.to_json();
  if (!out.empty()) write_text(out, json);
  if (report.passed()) return kOk;
  std::fprintf(stderr, "first counterexample (%s, instance %zu): %s\n%s", report.first_failure->check.c_str(),
               report.first_failure->instance, report.first_failure->detail.c_str(),
               report.first_failure->config.c_str());
  return kCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium solver for a provider / vendor / user IoT market"};
  app.require_subcommand(1);

  std::string config, out, spec, out_dir;

  auto* solve = app.add_subcommand("solve", "Solve one market and print the equilibrium report");
  solve->add_option("--config", config, "Market config file")->required();
  solve->add_option("--out", out, "Also write the report here");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep, writing CSV and SVG");
  sweep->add_option("--config", config, "Base market config file")->required();
  sweep->add_option("--spec", spec, "Sweep description file")->required();
  sweep->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* figure3 = app.add_subcommand("figure3", "Run the externality and vendor-cost study");
  figure3->add_option("--config", config, "Base market config file")->required();
  figure3->add_option("--out-dir", out_dir, "Output directory")->required();

  std::uint64_t seed = 42;
  std::size_t count = 100;
  Fault fault = Fault::kNone;
  const std::map<std::string, Fault> faults = {
      {"none", Fault::kNone}, {"demand", Fault::kDemand}, {"reward", Fault::kReward}, {"price", Fault::kPrice}};
  auto* certify_cmd = app.add_subcommand("certify", "Check every solver against its brute-force oracle");
  certify_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  certify_cmd->add_option("--count", count, "Instances per check")->capture_default_str();
  certify_cmd->add_option("--out", out, "Write the JSON report here");
  certify_cmd->add_option("--fault", fault, "Corrupt a solver result")
      ->transform(CLI::CheckedTransformer(faults))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(config, out);
    if (*sweep) return cmd_sweep(config, spec, out_dir);
    if (*figure3) return cmd_figure3(config, out_dir);
    return cmd_certify(seed, count, out, fault);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "invalid config:\n");
    for (const auto& issue : e.issues()) std::fprintf(stderr, "  %s\n", issue.message.c_str());
    return kConfig;
  } catch (const DirectionalClaimViolated& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kCheck;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
}
