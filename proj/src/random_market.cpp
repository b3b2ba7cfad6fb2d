#include "market_eq/random_market.hpp"

#include <algorithm>
#include <cmath>

namespace market_eq {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

MarketConfig random_dominant_market(std::mt19937_64& rng, const RandomMarketSpec& spec) {
  MarketConfig cfg;
  const auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(spec.max_users)));
  const auto m = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(spec.max_vendors)));

  for (std::size_t i = 0; i < n; ++i) cfg.users.push_back({uniform(rng, 5.0, 15.0), uniform(rng, 1.0, 3.0)});
  double kappa = uniform(rng, 0.0, spec.max_coupling);
  cfg.network = NetworkEffectMatrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) cfg.network(i, j) = uniform(rng, 0.0, spec.max_coupling);

  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += std::abs(cfg.network(i, j) - kappa);
    const double b = cfg.users[i].saturation;
    if (b + 2.0 * kappa - off < spec.min_margin && off > 2.0 * kappa)
      scale = std::min(scale, 0.999 * (b - spec.min_margin) / (off - 2.0 * kappa));
  }
  kappa *= scale;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cfg.network(i, j) *= scale;
  cfg.externalities = {kappa, uniform(rng, 0.0, 0.3)};

  for (std::size_t j = 0; j < m; ++j) {
    VendorParams v;
    v.device_count = uniform_int(rng, 1, 4);
    v.per_device_cost = uniform(rng, 0.0, 1.0);
    v.share_weight = uniform(rng, 0.05, 1.0 / static_cast<double>(m));
    v.reward_sensitivity = uniform(rng, 0.2, 2.0);
    cfg.vendors.push_back(v);
  }
  return cfg;
}

}  // namespace market_eq
