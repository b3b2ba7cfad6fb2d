#pragma once

// Stage II: vendors' reward choice and which vendors end up participating.

#include <vector>

#include "market_eq/model.hpp"

namespace market_eq {

// Profit-maximizing reward for vendor j when users demand X in total.
// Vendor profit (r - c) * max(0, wX - tau r) is a concave parabola in r with
// vertex r* = (wX + tau c) / (2 tau); the vendor stays out unless wX > tau c.
VendorOutcome vendor_best_response(const MarketConfig& cfg, std::size_t vendor, double total_demand);

// Demand and vendor responses that are mutually consistent at `price`.
struct MarketResponse {
  DemandProfile demand;
  std::vector<VendorOutcome> vendors;
  int participating_devices = 0;

  std::vector<bool> participation() const;
};

// Starts from full participation and drops vendors that cannot profit at the
// induced demand until the participating set stops changing. Because losing
// devices only lowers demand, the result is the largest consistent set.
MarketResponse participation_fixed_point(const MarketConfig& cfg, double price);

}  // namespace market_eq
