#pragma once

// Domain types and payoff functions for the three-tier information market:
// one provider sells a service at a uniform price to N users, and M vendors
// supply sensing data through their IoT devices.
//
// User i with demand x_i earns
//
//   u_i = a_i x_i - (b_i / 2) x_i^2          internal benefit
//       + x_i * sum_j g_ij x_j               direct network effect
//       + eta * x_i * V                      indirect effect of V devices
//       - kappa * x_i * X                    congestion, X = sum_j x_j
//       - p * x_i                            payment
//
// Vendor j earns (r_j - c_j) * delta_j where delta_j is the demand dispatched
// to it, and the provider earns p * X - sum_j r_j * delta_j.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "market_eq/errors.hpp"

namespace market_eq {

struct UserParams {
  double benefit_slope = 0.0;  // a_i
  double saturation = 0.0;     // b_i
};

// Pairwise direct network-effect coefficients g_ij, stored row-major.
class NetworkEffectMatrix {
 public:
  NetworkEffectMatrix() = default;
  explicit NetworkEffectMatrix(std::size_t n, double off_diagonal = 0.0);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return g_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return g_[i * n_ + j]; }

  // Mean of the off-diagonal entries; 0 for a 1x1 matrix.
  double mean_off_diagonal() const;

  bool operator==(const NetworkEffectMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> g_;
};

struct VendorParams {
  int device_count = 1;
  double per_device_cost = 0.0;
  double share_weight = 0.0;         // w_j, fraction of X addressable
  double reward_sensitivity = 1.0;   // tau_j, dispatch lost per unit reward

  double cost() const { return device_count * per_device_cost; }

  bool operator==(const VendorParams&) const = default;
};

struct ExternalityParams {
  double congestion = 0.0;  // kappa
  double indirect = 0.0;    // eta, per participating device

  bool operator==(const ExternalityParams&) const = default;
};

struct MarketConfig {
  std::vector<UserParams> users;
  NetworkEffectMatrix network;
  std::vector<VendorParams> vendors;
  ExternalityParams externalities;
  double price_min = 0.0;
  std::optional<double> price_max;  // defaults to the demand choke price

  std::size_t user_count() const { return users.size(); }
  std::size_t vendor_count() const { return vendors.size(); }
  int total_devices() const;
};

inline bool operator==(const UserParams& l, const UserParams& r) {
  return l.benefit_slope == r.benefit_slope && l.saturation == r.saturation;
}
bool operator==(const MarketConfig& l, const MarketConfig& r);

// Demand vector together with its support and total.
class DemandProfile {
 public:
  DemandProfile() = default;
  explicit DemandProfile(std::vector<double> demand);

  static DemandProfile zeros(std::size_t n) { return DemandProfile(std::vector<double>(n, 0.0)); }

  std::span<const double> values() const { return demand_; }
  double operator[](std::size_t i) const { return demand_[i]; }
  std::size_t size() const { return demand_.size(); }
  const std::vector<std::size_t>& active() const { return active_; }
  double total() const { return total_; }

 private:
  std::vector<double> demand_;
  std::vector<std::size_t> active_;
  double total_ = 0.0;
};

struct VendorOutcome {
  double reward = 0.0;
  double dispatch = 0.0;
  double utility = 0.0;
  bool participating = false;
};

struct EquilibriumOutcome {
  double price = 0.0;
  std::vector<VendorOutcome> vendors;
  DemandProfile demand;
  std::vector<double> user_utilities;
  double provider_utility = 0.0;
  int participating_devices = 0;

  // Demand the provider serves itself, X - sum_j delta_j.
  double provider_served_demand() const;
};

// Returns every violated invariant; empty means the config is usable.
std::vector<ConfigIssue> check_config(const MarketConfig& cfg);

// Returns `cfg` unchanged or throws ConfigError listing every issue.
MarketConfig validate_config(MarketConfig cfg);

double user_utility(const MarketConfig& cfg, std::size_t user, std::span<const double> demand,
                    double price, int devices);
double user_utility(const MarketConfig& cfg, std::size_t user, const DemandProfile& demand,
                    double price, int devices);

// d u_i / d x_i at `demand`.
double marginal_utility(const MarketConfig& cfg, std::size_t user, std::span<const double> demand,
                        double price, int devices);

// delta_j(r) = max(0, w_j X - tau_j r): dispatch demand vendor j attracts at
// reward r when the users' total demand is X.
double dispatch_demand(const MarketConfig& cfg, std::size_t vendor, double total_demand,
                       double reward);

double vendor_utility(const MarketConfig& cfg, std::size_t vendor, double reward, double dispatch);

double provider_utility(double price, const DemandProfile& demand,
                        std::span<const VendorOutcome> vendors);

}  // namespace market_eq
