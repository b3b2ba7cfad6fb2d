#pragma once

#include <random>
#include <string>

#include "market_eq/config_file.hpp"
#include "market_eq/model.hpp"

namespace test {

inline market_eq::MarketConfig single_user(double a = 10.0, double b = 2.0) {
  market_eq::MarketConfig cfg;
  cfg.users = {{a, b}};
  cfg.network = market_eq::NetworkEffectMatrix(1);
  return cfg;
}

// Two identical users: a=10, b=2, g=0.5, kappa=0.25.
inline market_eq::MarketConfig symmetric_pair() {
  market_eq::MarketConfig cfg;
  cfg.users = {{10.0, 2.0}, {10.0, 2.0}};
  cfg.network = market_eq::NetworkEffectMatrix(2, 0.5);
  cfg.externalities.congestion = 0.25;
  return cfg;
}

inline market_eq::VendorParams vendor(int devices, double per_device_cost, double share, double sensitivity) {
  market_eq::VendorParams v;
  v.device_count = devices;
  v.per_device_cost = per_device_cost;
  v.share_weight = share;
  v.reward_sensitivity = sensitivity;
  return v;
}

inline std::string source_path(const std::string& relative) {
  return std::string(MARKET_EQ_SOURCE_DIR) + "/" + relative;
}

inline market_eq::MarketConfig reference() { return market_eq::load_config(source_path("configs/reference.cfg")); }

}  // namespace test
