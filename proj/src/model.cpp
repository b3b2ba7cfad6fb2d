#include "market_eq/model.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

namespace market_eq {

const char* to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kDominanceViolation: return "DominanceViolation";
    case IssueKind::kShareOverflow: return "ShareOverflow";
    case IssueKind::kNonPositiveCoefficient: return "NonPositiveCoefficient";
    case IssueKind::kNegativeCoefficient: return "NegativeCoefficient";
    case IssueKind::kBadPriceBounds: return "BadPriceBounds";
    case IssueKind::kBadNetworkMatrix: return "BadNetworkMatrix";
    case IssueKind::kNoUsers: return "NoUsers";
    case IssueKind::kSyntax: return "Syntax";
  }
  return "Unknown";
}

namespace {

std::string summarize(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid market configuration";
  for (const auto& issue : issues) {
    out += "\n  ";
    out += to_string(issue.kind);
    out += ": ";
    out += issue.message;
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

NetworkEffectMatrix::NetworkEffectMatrix(std::size_t n, double off_diagonal)
    : n_(n), g_(n * n, off_diagonal) {
  for (std::size_t i = 0; i < n; ++i) g_[i * n + i] = 0.0;
}

double NetworkEffectMatrix::mean_off_diagonal() const {
  if (n_ < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) sum += (*this)(i, j);
  return sum / static_cast<double>(n_ * (n_ - 1));
}

int MarketConfig::total_devices() const {
  int total = 0;
  for (const auto& v : vendors) total += v.device_count;
  return total;
}

bool operator==(const MarketConfig& l, const MarketConfig& r) {
  return l.users == r.users && l.network == r.network && l.vendors == r.vendors &&
         l.externalities == r.externalities && l.price_min == r.price_min &&
         l.price_max == r.price_max;
}

DemandProfile::DemandProfile(std::vector<double> demand) : demand_(std::move(demand)) {
  for (std::size_t i = 0; i < demand_.size(); ++i) {
    if (demand_[i] < 0.0) throw std::invalid_argument("demand must be non-negative");
    if (demand_[i] > 0.0) active_.push_back(i);
    total_ += demand_[i];
  }
}

double EquilibriumOutcome::provider_served_demand() const {
  double dispatched = 0.0;
  for (const auto& v : vendors) dispatched += v.dispatch;
  return demand.total() - dispatched;
}

std::vector<ConfigIssue> check_config(const MarketConfig& cfg) {
  std::vector<ConfigIssue> issues;
  auto add = [&](IssueKind kind, std::string field, std::size_t index, std::string message) {
    issues.push_back({kind, std::move(field), index, std::move(message)});
  };

  const std::size_t n = cfg.user_count();
  if (n == 0) add(IssueKind::kNoUsers, "users", 0, "at least one user is required");

  for (std::size_t i = 0; i < n; ++i) {
    const auto& u = cfg.users[i];
    if (!positive(u.benefit_slope))
      add(IssueKind::kNonPositiveCoefficient, "benefit", i,
          "user " + std::to_string(i) + ": benefit must be > 0, got " + fmt(u.benefit_slope));
    if (!positive(u.saturation))
      add(IssueKind::kNonPositiveCoefficient, "saturation", i,
          "user " + std::to_string(i) + ": saturation must be > 0, got " + fmt(u.saturation));
  }

  const double kappa = cfg.externalities.congestion;
  if (!non_negative(kappa))
    add(IssueKind::kNegativeCoefficient, "congestion", 0,
        "congestion must be >= 0, got " + fmt(kappa));
  if (!non_negative(cfg.externalities.indirect))
    add(IssueKind::kNegativeCoefficient, "indirect", 0,
        "indirect must be >= 0, got " + fmt(cfg.externalities.indirect));

  bool network_ok = cfg.network.size() == n;
  if (!network_ok) {
    add(IssueKind::kBadNetworkMatrix, "network", 0,
        "network matrix is " + std::to_string(cfg.network.size()) + "x" +
            std::to_string(cfg.network.size()) + " but there are " + std::to_string(n) +
            " users");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (cfg.network(i, i) != 0.0) {
        network_ok = false;
        add(IssueKind::kBadNetworkMatrix, "network", i,
            "user " + std::to_string(i) + ": self network effect must be 0");
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!non_negative(cfg.network(i, j))) {
          network_ok = false;
          add(IssueKind::kNegativeCoefficient, "network", i,
              "user " + std::to_string(i) + ": network coefficient toward user " +
                  std::to_string(j) + " must be >= 0, got " + fmt(cfg.network(i, j)));
        }
      }
    }
  }

  // Strict diagonal dominance of the demand first-order system.
  if (network_ok && non_negative(kappa)) {
    for (std::size_t i = 0; i < n; ++i) {
      const double diag = cfg.users[i].saturation + 2.0 * kappa;
      double off = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) off += std::abs(cfg.network(i, j) - kappa);
      if (!(diag > off))
        add(IssueKind::kDominanceViolation, "network", i,
            "user " + std::to_string(i) + ": saturation + 2*congestion = " + fmt(diag) +
                " does not exceed coupling sum " + fmt(off));
    }
  }

  double share_total = 0.0;
  for (std::size_t j = 0; j < cfg.vendor_count(); ++j) {
    const auto& v = cfg.vendors[j];
    const std::string who = "vendor " + std::to_string(j) + ": ";
    if (v.device_count < 1)
      add(IssueKind::kNonPositiveCoefficient, "devices", j,
          who + "devices must be >= 1, got " + std::to_string(v.device_count));
    if (!non_negative(v.per_device_cost))
      add(IssueKind::kNegativeCoefficient, "cost_per_device", j,
          who + "cost_per_device must be >= 0, got " + fmt(v.per_device_cost));
    if (!positive(v.share_weight))
      add(IssueKind::kNonPositiveCoefficient, "share", j,
          who + "share must be > 0, got " + fmt(v.share_weight));
    if (!positive(v.reward_sensitivity))
      add(IssueKind::kNonPositiveCoefficient, "sensitivity", j,
          who + "sensitivity must be > 0, got " + fmt(v.reward_sensitivity));
    share_total += v.share_weight;
  }
  if (share_total > 1.0 + 1e-12)
    add(IssueKind::kShareOverflow, "share", 0,
        "vendor shares sum to " + fmt(share_total) + " > 1");

  if (!non_negative(cfg.price_min))
    add(IssueKind::kBadPriceBounds, "price_min", 0,
        "price_min must be >= 0, got " + fmt(cfg.price_min));
  if (cfg.price_max && !(std::isfinite(*cfg.price_max) && *cfg.price_max > cfg.price_min))
    add(IssueKind::kBadPriceBounds, "price_max", 0,
        "price_max must exceed price_min, got " + fmt(*cfg.price_max));

  return issues;
}

MarketConfig validate_config(MarketConfig cfg) {
  auto issues = check_config(cfg);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

namespace {

void check_user(const MarketConfig& cfg, std::size_t user, std::span<const double> demand) {
  if (user >= cfg.user_count()) throw std::out_of_range("user index out of range");
  if (demand.size() != cfg.user_count()) throw std::invalid_argument("demand size mismatch");
}

void check_vendor(const MarketConfig& cfg, std::size_t vendor) {
  if (vendor >= cfg.vendor_count()) throw std::out_of_range("vendor index out of range");
}

}  // namespace

double user_utility(const MarketConfig& cfg, std::size_t user, std::span<const double> demand,
                    double price, int devices) {
  check_user(cfg, user, demand);
  const auto& u = cfg.users[user];
  const double x = demand[user];
  double network = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    network += cfg.network(user, j) * demand[j];
    total += demand[j];
  }
  return u.benefit_slope * x - 0.5 * u.saturation * x * x + x * network +
         cfg.externalities.indirect * x * devices - cfg.externalities.congestion * x * total -
         price * x;
}

double user_utility(const MarketConfig& cfg, std::size_t user, const DemandProfile& demand,
                    double price, int devices) {
  return user_utility(cfg, user, demand.values(), price, devices);
}

double marginal_utility(const MarketConfig& cfg, std::size_t user, std::span<const double> demand,
                        double price, int devices) {
  check_user(cfg, user, demand);
  const auto& u = cfg.users[user];
  const double x = demand[user];
  double network = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    if (j != user) network += cfg.network(user, j) * demand[j];
    total += demand[j];
  }
  return u.benefit_slope - u.saturation * x + network + cfg.externalities.indirect * devices -
         cfg.externalities.congestion * (total + x) - price;
}

double dispatch_demand(const MarketConfig& cfg, std::size_t vendor, double total_demand,
                       double reward) {
  check_vendor(cfg, vendor);
  const auto& v = cfg.vendors[vendor];
  return std::max(0.0, v.share_weight * total_demand - v.reward_sensitivity * reward);
}

double vendor_utility(const MarketConfig& cfg, std::size_t vendor, double reward, double dispatch) {
  check_vendor(cfg, vendor);
  return (reward - cfg.vendors[vendor].cost()) * dispatch;
}

double provider_utility(double price, const DemandProfile& demand,
                        std::span<const VendorOutcome> vendors) {
  double paid = 0.0;
  for (const auto& v : vendors) paid += v.reward * v.dispatch;
  return price * demand.total() - paid;
}

}  // namespace market_eq
