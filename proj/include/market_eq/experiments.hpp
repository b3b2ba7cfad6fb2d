#pragma once

// Parameter sweeps over the full three-stage solution, and the canonical
// externality / vendor-cost study built from them.

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "market_eq/model.hpp"
#include "market_eq/pricing.hpp"

namespace market_eq {

enum class SweepParameter { kUserCount, kVendorCount, kPerDeviceCost, kNetworkScale, kCongestion, kIndirect };

enum class Metric {
  kUserUtilityMean,
  kVendorUtilityMean,
  kProviderUtility,
  kTotalDemand,
  kProviderServedDemand,
  kPrice,
  kParticipatingDevices,
};

const char* to_string(SweepParameter p);
const char* to_string(Metric m);
// Accepts the names above; "kappa" and "eta" alias congestion and indirect.
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);
std::optional<Metric> parse_metric(std::string_view name);
const std::vector<Metric>& all_metrics();

double metric_value(const EquilibriumOutcome& outcome, Metric metric);

struct SweepSpec {
  MarketConfig base;
  SweepParameter parameter = SweepParameter::kPerDeviceCost;
  std::vector<double> values;
  std::vector<Metric> outputs = all_metrics();
  PriceSearchSettings search;
};

struct SweepRow {
  double value = 0.0;
  std::vector<double> metrics;       // NaN when the row failed
  std::optional<std::string> error;
};

// Table of results. Column names start as metric names; figure tables merge
// several sweeps and rename columns.
struct SweepResult {
  std::string parameter;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;

  // Index of a named column; throws std::out_of_range.
  std::size_t column(std::string_view name) const;
  std::vector<double> series(std::string_view name) const;
};

// Market at one swept value. Count sweeps clone the first user or vendor;
// cloned users interact through the mean off-diagonal coefficient of the base
// network. Not validated.
MarketConfig instantiate(const MarketConfig& base, SweepParameter parameter, double value);

// Throws std::invalid_argument unless values are non-empty and strictly
// monotone. A row whose market is invalid or fails to solve records its error
// and the sweep carries on.
SweepResult run_sweep(const SweepSpec& spec);

// Reads a sweep description:
//   parameter = per_device_cost
//   values = 0.5, 1.0, 1.5        (or: from = 0.5, to = 5.0, points = 10)
//   outputs = user_utility_mean, vendor_utility_mean   (optional)
SweepSpec parse_sweep_spec(std::string_view text, MarketConfig base);

// Header row of column names, one line per row, 12 significant digits,
// '\n' line endings.
void write_csv(const SweepResult& result, std::ostream& out);
std::string to_csv(const SweepResult& result);

// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct ClaimCheck {
  std::string id;
  bool passed = false;
  std::optional<std::size_t> row;  // first offending row
  std::string detail;
};

class DirectionalClaimViolated : public std::runtime_error {
 public:
  explicit DirectionalClaimViolated(const ClaimCheck& claim);
  const std::string& claim_id() const { return id_; }
  std::optional<std::size_t> row() const { return row_; }

 private:
  std::string id_;
  std::optional<std::size_t> row_;
};

struct Figure3Result {
  SweepResult users;    // user_count 1..10: with all effects, without g, without kappa
  SweepResult vendors;  // vendor_count 1..5: with and without eta
  SweepResult cost;     // per_device_cost 0.5..5.0 in 10 steps, every metric
  std::vector<ClaimCheck> claims;

  bool all_claims_hold() const;
};

// Runs the three canonical sweeps on `base` and evaluates every directional
// claim. Throws ConfigError when `base` is invalid.
Figure3Result figure3_suite(const MarketConfig& base, const PriceSearchSettings& search = {});

// Throws DirectionalClaimViolated for the first failed claim.
void require_claims(const Figure3Result& result);

// Writes fig3a_users / fig3b_vendors / fig3c_cost as .csv and .svg plus
// claims.txt into `dir`. Throws IoError.
void write_figure3(const Figure3Result& result, const std::filesystem::path& dir);

}  // namespace market_eq
