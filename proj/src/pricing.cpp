#include "market_eq/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "market_eq/demand.hpp"
#include "market_eq/parallel.hpp"

namespace market_eq {
namespace {

// Best (price, profit) seen so far; higher profit wins, then lower price.
class BestPrice {
 public:
  void offer(double price, double profit) {
    if (!found_ || profit > profit_ || (profit == profit_ && price < price_)) {
      found_ = true;
      price_ = price;
      profit_ = profit;
    }
  }
  double price() const { return price_; }

 private:
  bool found_ = false;
  double price_ = 0.0;
  double profit_ = -std::numeric_limits<double>::infinity();
};

void golden_section(const MarketConfig& cfg, double lo, double hi, const PriceSearchSettings& s,
                    BestPrice& best) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto profit = [&](double p) {
    const double v = provider_profit_at(cfg, p).profit;
    best.offer(p, v);
    return v;
  };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = profit(x1);
  double f2 = profit(x2);
  for (int it = 0; it < s.refine_iterations && hi - lo > s.tolerance; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = profit(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = profit(x2);
    }
  }
}

// Narrows [lo, hi] onto the price where the participating set switches away
// from `left_set`, then scores both sides of the switch.
void bracket_switch(const MarketConfig& cfg, double lo, double hi, const std::vector<bool>& left_set,
                    const PriceSearchSettings& s, BestPrice& best) {
  for (int it = 0; it < 200 && hi - lo > s.tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (provider_profit_at(cfg, mid).response.participation() == left_set)
      lo = mid;
    else
      hi = mid;
  }
  best.offer(lo, provider_profit_at(cfg, lo).profit);
  best.offer(hi, provider_profit_at(cfg, hi).profit);
}

}  // namespace

ProfitEvaluation provider_profit_at(const MarketConfig& cfg, double price) {
  ProfitEvaluation eval;
  eval.price = price;
  eval.response = participation_fixed_point(cfg, price);
  eval.profit = provider_utility(price, eval.response.demand, eval.response.vendors);
  return eval;
}

std::pair<double, double> price_search_range(const MarketConfig& cfg) {
  const double lo = cfg.price_min;
  double hi = demand_choke_price(cfg);
  if (cfg.price_max) hi = std::min(hi, *cfg.price_max);
  if (!(hi >= lo))
    throw SolverError(SolverFailure::kEmptyPriceRange, "price range is empty");
  return {lo, hi};
}

EquilibriumOutcome make_outcome(const MarketConfig& cfg, const ProfitEvaluation& eval) {
  EquilibriumOutcome out;
  out.price = eval.price;
  out.vendors = eval.response.vendors;
  out.demand = eval.response.demand;
  out.participating_devices = eval.response.participating_devices;
  out.provider_utility = eval.profit;
  out.user_utilities.reserve(cfg.user_count());
  for (std::size_t i = 0; i < cfg.user_count(); ++i)
    out.user_utilities.push_back(
        user_utility(cfg, i, out.demand, out.price, out.participating_devices));
  return out;
}

EquilibriumOutcome optimize_price(const MarketConfig& cfg, const PriceSearchSettings& settings) {
  if (settings.coarse_points < 3 || !(settings.tolerance > 0.0))
    throw std::invalid_argument("price search needs >= 3 coarse points and a positive tolerance");
  const auto [lo, hi] = price_search_range(cfg);
  if (hi == lo) return make_outcome(cfg, provider_profit_at(cfg, lo));

  const auto n = static_cast<std::size_t>(settings.coarse_points);
  std::vector<double> prices(n);
  for (std::size_t k = 0; k < n; ++k)
    prices[k] = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);

  std::vector<ProfitEvaluation> coarse(n);
  parallel_for(n, [&](std::size_t k) { coarse[k] = provider_profit_at(cfg, prices[k]); });

  BestPrice best;
  for (const auto& e : coarse) best.offer(e.price, e.profit);

  constexpr double kNone = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? coarse[k - 1].profit : kNone;
    const double right = k + 1 < n ? coarse[k + 1].profit : kNone;
    if (coarse[k].profit > left && coarse[k].profit >= right)
      golden_section(cfg, prices[k > 0 ? k - 1 : 0], prices[std::min(k + 1, n - 1)], settings, best);
  }

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto left_set = coarse[k].response.participation();
    if (left_set != coarse[k + 1].response.participation())
      bracket_switch(cfg, prices[k], prices[k + 1], left_set, settings, best);
  }

  return make_outcome(cfg, provider_profit_at(cfg, best.price()));
}

}  // namespace market_eq
