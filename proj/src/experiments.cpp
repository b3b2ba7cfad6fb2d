#include "market_eq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "market_eq/config_file.hpp"
#include "market_eq/svg_chart.hpp"

namespace market_eq {
namespace {

// Slack for comparing independently optimized equilibria: prices found by
// separate searches agree only to roundoff.
constexpr double kClaimSlack = 1e-9;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

[[noreturn]] void spec_error(int line, const std::string& msg) {
  const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  throw ConfigError({{IssueKind::kSyntax, "", 0, where + msg}});
}

std::size_t as_count(double value, std::size_t minimum) {
  if (!(value >= static_cast<double>(minimum)) || value != std::floor(value))
    throw std::invalid_argument("count sweep value must be an integer >= " + std::to_string(minimum));
  return static_cast<std::size_t>(value);
}

}  // namespace

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kUserCount: return "user_count";
    case SweepParameter::kVendorCount: return "vendor_count";
    case SweepParameter::kPerDeviceCost: return "per_device_cost";
    case SweepParameter::kNetworkScale: return "g_scale";
    case SweepParameter::kCongestion: return "congestion";
    case SweepParameter::kIndirect: return "indirect";
  }
  return "unknown";
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::kUserUtilityMean: return "user_utility_mean";
    case Metric::kVendorUtilityMean: return "vendor_utility_mean";
    case Metric::kProviderUtility: return "provider_utility";
    case Metric::kTotalDemand: return "total_demand";
    case Metric::kProviderServedDemand: return "provider_served_demand";
    case Metric::kPrice: return "price";
    case Metric::kParticipatingDevices: return "participating_devices";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  for (auto p : {SweepParameter::kUserCount, SweepParameter::kVendorCount, SweepParameter::kPerDeviceCost,
                 SweepParameter::kNetworkScale, SweepParameter::kCongestion, SweepParameter::kIndirect})
    if (name == to_string(p)) return p;
  if (name == "kappa") return SweepParameter::kCongestion;
  if (name == "eta") return SweepParameter::kIndirect;
  return std::nullopt;
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (auto m : all_metrics())
    if (name == to_string(m)) return m;
  return std::nullopt;
}

const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> metrics = {
      Metric::kUserUtilityMean, Metric::kVendorUtilityMean,     Metric::kProviderUtility,
      Metric::kTotalDemand,     Metric::kProviderServedDemand,  Metric::kPrice,
      Metric::kParticipatingDevices};
  return metrics;
}

double metric_value(const EquilibriumOutcome& outcome, Metric metric) {
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  switch (metric) {
    case Metric::kUserUtilityMean: return mean(outcome.user_utilities);
    case Metric::kVendorUtilityMean: {
      std::vector<double> u;
      for (const auto& v : outcome.vendors) u.push_back(v.utility);
      return mean(u);
    }
    case Metric::kProviderUtility: return outcome.provider_utility;
    case Metric::kTotalDemand: return outcome.demand.total();
    case Metric::kProviderServedDemand: return outcome.provider_served_demand();
    case Metric::kPrice: return outcome.price;
    case Metric::kParticipatingDevices: return outcome.participating_devices;
  }
  return kNaN;
}

std::size_t SweepResult::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw std::out_of_range("no column named " + std::string(name));
}

std::vector<double> SweepResult::series(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.metrics[c]);
  return out;
}

MarketConfig instantiate(const MarketConfig& base, SweepParameter parameter, double value) {
  MarketConfig cfg = base;
  switch (parameter) {
    case SweepParameter::kUserCount: {
      if (base.users.empty()) throw std::invalid_argument("base market has no user to clone");
      const std::size_t n = as_count(value, 1);
      cfg.users.assign(n, base.users.front());
      cfg.network = NetworkEffectMatrix(n, base.network.mean_off_diagonal());
      break;
    }
    case SweepParameter::kVendorCount: {
      const std::size_t m = as_count(value, 0);
      if (m > 0 && base.vendors.empty()) throw std::invalid_argument("base market has no vendor to clone");
      cfg.vendors.assign(m, m > 0 ? base.vendors.front() : VendorParams{});
      break;
    }
    case SweepParameter::kPerDeviceCost:
      for (auto& v : cfg.vendors) v.per_device_cost = value;
      break;
    case SweepParameter::kNetworkScale:
      for (std::size_t i = 0; i < cfg.network.size(); ++i)
        for (std::size_t j = 0; j < cfg.network.size(); ++j) cfg.network(i, j) *= value;
      break;
    case SweepParameter::kCongestion:
      cfg.externalities.congestion = value;
      break;
    case SweepParameter::kIndirect:
      cfg.externalities.indirect = value;
      break;
  }
  return cfg;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  const bool up = spec.values.size() < 2 || spec.values[1] > spec.values[0];
  for (std::size_t k = 1; k < spec.values.size(); ++k)
    if (up ? !(spec.values[k] > spec.values[k - 1]) : !(spec.values[k] < spec.values[k - 1]))
      throw std::invalid_argument("sweep values must be strictly monotone");

  SweepResult result;
  result.parameter = to_string(spec.parameter);
  for (auto m : spec.outputs) result.columns.push_back(to_string(m));

  // Rows run one after another; each price search parallelizes internally.
  for (double value : spec.values) {
    SweepRow row;
    row.value = value;
    try {
      const MarketConfig cfg = validate_config(instantiate(spec.base, spec.parameter, value));
      const EquilibriumOutcome outcome = optimize_price(cfg, spec.search);
      for (auto m : spec.outputs) row.metrics.push_back(metric_value(outcome, m));
    } catch (const std::exception& e) {
      row.error = e.what();
      row.metrics.assign(spec.outputs.size(), kNaN);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n == 1 ? lo : k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

SweepSpec parse_sweep_spec(std::string_view text, MarketConfig base) {
  const auto sections = parse_sections(text);
  if (sections.size() > 1) spec_error(sections[1].line, "sweep files have no sections");

  SweepSpec spec;
  spec.base = std::move(base);
  bool have_parameter = false;
  std::optional<double> from, to, points;
  for (const auto& kv : sections.front().entries) {
    if (kv.key == "parameter") {
      const auto p = parse_sweep_parameter(kv.value);
      if (!p) spec_error(kv.line, "unknown sweep parameter '" + kv.value + "'");
      spec.parameter = *p;
      have_parameter = true;
    } else if (kv.key == "values") {
      spec.values = parse_number_list(kv);
    } else if (kv.key == "from") {
      from = parse_number(kv);
    } else if (kv.key == "to") {
      to = parse_number(kv);
    } else if (kv.key == "points") {
      points = parse_number(kv);
    } else if (kv.key == "outputs") {
      spec.outputs.clear();
      std::string_view rest = kv.value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string name(rest.substr(0, comma));
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        const auto m = parse_metric(name);
        if (!m) spec_error(kv.line, "unknown metric '" + name + "'");
        spec.outputs.push_back(*m);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      if (spec.outputs.empty()) spec_error(kv.line, "outputs must name at least one metric");
    } else {
      spec_error(kv.line, "unknown key '" + kv.key + "'");
    }
  }
  if (!have_parameter) spec_error(0, "missing 'parameter'");
  if (from || to || points) {
    if (!spec.values.empty()) spec_error(0, "give either 'values' or 'from'/'to'/'points', not both");
    if (!from || !to || !points || *points < 1 || *points != std::floor(*points))
      spec_error(0, "'from', 'to' and an integer 'points' >= 1 are all required");
    spec.values = linspace(*from, *to, static_cast<std::size_t>(*points));
  }
  if (spec.values.empty()) spec_error(0, "no sweep values given");
  return spec;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << result.parameter;
  for (const auto& c : result.columns) out << ',' << c;
  out << '\n';
  for (const auto& row : result.rows) {
    out << num(row.value);
    for (double v : row.metrics) out << ',' << num(v);
    out << '\n';
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  write_csv(result, out);
  return out.str();
}

DirectionalClaimViolated::DirectionalClaimViolated(const ClaimCheck& claim)
    : std::runtime_error("directional claim " + claim.id + " violated" +
                         (claim.row ? " at row " + std::to_string(*claim.row) : std::string()) + ": " +
                         claim.detail),
      id_(claim.id),
      row_(claim.row) {}

bool Figure3Result::all_claims_hold() const {
  return std::all_of(claims.begin(), claims.end(), [](const ClaimCheck& c) { return c.passed; });
}

namespace {

SweepResult sweep(const MarketConfig& base, SweepParameter parameter, std::vector<double> values,
                  std::vector<Metric> outputs, const PriceSearchSettings& search) {
  SweepSpec spec;
  spec.base = base;
  spec.parameter = parameter;
  spec.values = std::move(values);
  spec.outputs = std::move(outputs);
  spec.search = search;
  return run_sweep(spec);
}

// Appends b's single column to a under a new name. Both sweeps share values.
void append_column(SweepResult& a, const SweepResult& b, const std::string& name) {
  a.columns.push_back(name);
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    a.rows[k].metrics.push_back(b.rows[k].metrics.front());
    if (!a.rows[k].error && b.rows[k].error) a.rows[k].error = b.rows[k].error;
  }
}

ClaimCheck pass(std::string id, std::string detail) { return {std::move(id), true, std::nullopt, std::move(detail)}; }
ClaimCheck fail(std::string id, std::size_t row, std::string detail) {
  return {std::move(id), false, row, std::move(detail)};
}

// lhs[k] >= rhs[k] - slack for every row.
ClaimCheck dominates(std::string id, const std::vector<double>& lhs, const std::vector<double>& rhs,
                     const std::string& what) {
  for (std::size_t k = 0; k < lhs.size(); ++k)
    if (!(lhs[k] >= rhs[k] - kClaimSlack))
      return fail(std::move(id), k, what + ": " + num(lhs[k]) + " < " + num(rhs[k]));
  return pass(std::move(id), what);
}

// direction > 0: non-decreasing; direction < 0: non-increasing.
ClaimCheck monotone(std::string id, const std::vector<double>& v, int direction, const std::string& what) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double step = direction * (v[k] - v[k - 1]);
    if (!(step >= -kClaimSlack)) return fail(std::move(id), k, what + ": " + num(v[k - 1]) + " -> " + num(v[k]));
  }
  if (v.empty() || std::isnan(v.front())) return fail(std::move(id), 0, what + ": missing values");
  return pass(std::move(id), what);
}

std::optional<std::size_t> row_at(const SweepResult& r, double value) {
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    if (r.rows[k].value == value) return k;
  return std::nullopt;
}

std::vector<ClaimCheck> evaluate_claims(const Figure3Result& f, const MarketConfig& base) {
  std::vector<ClaimCheck> claims;

  const auto with_g = f.users.series("user_utility_mean");
  const auto no_g = f.users.series("user_utility_mean_no_network");
  const auto no_kappa = f.users.series("user_utility_mean_no_congestion");
  std::vector<double> g_gap(with_g.size());
  for (std::size_t k = 0; k < g_gap.size(); ++k) g_gap[k] = with_g[k] - no_g[k];
  claims.push_back(dominates("3a.network_raises_utility", with_g, no_g,
                             "user utility with direct network effect >= without"));
  claims.push_back(monotone("3a.network_gap_widens", g_gap, +1,
                            "network-effect utility gap non-decreasing in user count"));
  claims.push_back(dominates("3a.congestion_lowers_utility", no_kappa, with_g,
                             "user utility without congestion >= with"));

  const auto with_eta = f.vendors.series("user_utility_mean");
  const auto no_eta = f.vendors.series("user_utility_mean_no_indirect");
  claims.push_back(dominates("3b.indirect_raises_utility", with_eta, no_eta,
                             "user utility with indirect network effect >= without"));

  const auto user_row = row_at(f.users, static_cast<double>(base.user_count()));
  const auto vendor_row = row_at(f.vendors, static_cast<double>(base.vendor_count()));
  if (!user_row || !vendor_row) {
    claims.push_back(fail("3b.indirect_gap_milder", 0, "reference market size is outside the sweeps"));
  } else {
    const double g_rel = g_gap[*user_row] / no_g[*user_row];
    const double eta_rel = (with_eta[*vendor_row] - no_eta[*vendor_row]) / no_eta[*vendor_row];
    const std::string detail = "relative indirect gap " + num(eta_rel) + " vs direct gap " + num(g_rel);
    claims.push_back(eta_rel < g_rel ? pass("3b.indirect_gap_milder", detail)
                                     : fail("3b.indirect_gap_milder", *vendor_row, detail));
  }

  const auto vendor_u = f.cost.series("vendor_utility_mean");
  ClaimCheck vanish = monotone("3c.vendor_utility_vanishes", vendor_u, -1,
                               "mean vendor utility non-increasing in device cost");
  if (vanish.passed && !(vendor_u.back() <= 1e-6))
    vanish = fail("3c.vendor_utility_vanishes", vendor_u.size() - 1,
                  "final mean vendor utility " + num(vendor_u.back()) + " > 1e-6");
  claims.push_back(vanish);
  claims.push_back(monotone("3c.demand_non_increasing", f.cost.series("total_demand"), -1,
                            "total demand non-increasing in device cost"));
  claims.push_back(monotone("3c.served_demand_non_decreasing", f.cost.series("provider_served_demand"), +1,
                            "provider-served demand non-decreasing in device cost"));
  return claims;
}

std::vector<double> count_range(std::size_t from, std::size_t to) {
  std::vector<double> out;
  for (std::size_t k = from; k <= to; ++k) out.push_back(static_cast<double>(k));
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

Figure3Result figure3_suite(const MarketConfig& base_in, const PriceSearchSettings& search) {
  const MarketConfig base = validate_config(base_in);
  const std::vector<Metric> user_only = {Metric::kUserUtilityMean};
  Figure3Result f;

  const auto users = count_range(1, 10);
  f.users = sweep(base, SweepParameter::kUserCount, users, user_only, search);
  append_column(f.users, sweep(instantiate(base, SweepParameter::kNetworkScale, 0.0), SweepParameter::kUserCount,
                               users, user_only, search),
                "user_utility_mean_no_network");
  append_column(f.users, sweep(instantiate(base, SweepParameter::kCongestion, 0.0), SweepParameter::kUserCount,
                               users, user_only, search),
                "user_utility_mean_no_congestion");

  const auto vendors = count_range(1, 5);
  f.vendors = sweep(base, SweepParameter::kVendorCount, vendors, user_only, search);
  append_column(f.vendors, sweep(instantiate(base, SweepParameter::kIndirect, 0.0), SweepParameter::kVendorCount,
                                 vendors, user_only, search),
                "user_utility_mean_no_indirect");

  f.cost = sweep(base, SweepParameter::kPerDeviceCost, linspace(0.5, 5.0, 10), all_metrics(), search);

  f.claims = evaluate_claims(f, base);
  return f;
}

void require_claims(const Figure3Result& result) {
  for (const auto& c : result.claims)
    if (!c.passed) throw DirectionalClaimViolated(c);
}

void write_figure3(const Figure3Result& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_file(dir / "fig3a_users.csv", to_csv(result.users));
  write_file(dir / "fig3b_vendors.csv", to_csv(result.vendors));
  write_file(dir / "fig3c_cost.csv", to_csv(result.cost));
  emit_chart(result.users, result.users.columns, dir / "fig3a_users.svg");
  emit_chart(result.vendors, result.vendors.columns, dir / "fig3b_vendors.svg");
  emit_chart(result.cost, {"user_utility_mean", "vendor_utility_mean", "provider_utility"}, dir / "fig3c_cost.svg");

  std::string claims;
  for (const auto& c : result.claims) {
    claims += (c.passed ? "PASS " : "FAIL ") + c.id + "  " + c.detail;
    if (c.row) claims += " (row " + std::to_string(*c.row) + ")";
    claims += '\n';
  }
  write_file(dir / "claims.txt", claims);
}

}  // namespace market_eq
