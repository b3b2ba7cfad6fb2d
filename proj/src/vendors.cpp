#include "market_eq/vendors.hpp"

#include <stdexcept>

#include "market_eq/demand.hpp"

namespace market_eq {
namespace {

VendorOutcome absent(const VendorParams& v) { return {v.cost(), 0.0, 0.0, false}; }

}  // namespace

VendorOutcome vendor_best_response(const MarketConfig& cfg, std::size_t vendor, double total_demand) {
  if (vendor >= cfg.vendor_count()) throw std::out_of_range("vendor index out of range");
  const VendorParams& v = cfg.vendors[vendor];
  const double base = v.share_weight * total_demand;
  const double tau = v.reward_sensitivity;
  const double c = v.cost();
  const double margin = base - tau * c;
  if (!(margin > 0.0)) return absent(v);
  return {(base + tau * c) / (2.0 * tau), margin / 2.0, margin * margin / (4.0 * tau), true};
}

std::vector<bool> MarketResponse::participation() const {
  std::vector<bool> out;
  out.reserve(vendors.size());
  for (const auto& v : vendors) out.push_back(v.participating);
  return out;
}

MarketResponse participation_fixed_point(const MarketConfig& cfg, double price) {
  const std::size_t m = cfg.vendor_count();
  std::vector<bool> in(m, true);
  for (std::size_t pass = 0; pass <= m; ++pass) {
    MarketResponse r;
    for (std::size_t j = 0; j < m; ++j)
      if (in[j]) r.participating_devices += cfg.vendors[j].device_count;
    r.demand = solve_demand(cfg, price, r.participating_devices);
    r.vendors.reserve(m);
    bool changed = false;
    for (std::size_t j = 0; j < m; ++j) {
      r.vendors.push_back(in[j] ? vendor_best_response(cfg, j, r.demand.total())
                                : absent(cfg.vendors[j]));
      if (in[j] && !r.vendors[j].participating) {
        in[j] = false;
        changed = true;
      }
    }
    if (!changed) return r;
  }
  // Each pass that does not return removes a vendor, so m + 1 passes suffice.
  throw std::logic_error("participation fixed point did not settle");
}

}  // namespace market_eq
