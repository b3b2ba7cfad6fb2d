#pragma once

// Stage I: the provider's uniform price.

#include "market_eq/model.hpp"
#include "market_eq/vendors.hpp"

namespace market_eq {

struct PriceSearchSettings {
  int coarse_points = 2001;
  int refine_iterations = 60;
  double tolerance = 1e-9;
};

struct ProfitEvaluation {
  double price = 0.0;
  double profit = 0.0;
  MarketResponse response;
};

// Provider profit p X - sum_j r_j delta_j once vendors and users respond to p.
ProfitEvaluation provider_profit_at(const MarketConfig& cfg, double price);

// Search interval [price_min, min(price_max, choke)]. Throws
// SolverError(kEmptyPriceRange) when it is empty.
std::pair<double, double> price_search_range(const MarketConfig& cfg);

// Assembles the full outcome (user utilities included) at a price.
EquilibriumOutcome make_outcome(const MarketConfig& cfg, const ProfitEvaluation& eval);

// Profit-maximizing price. Profit is only piecewise smooth in the price: it
// kinks where users leave the market and jumps where vendors stop
// participating. A coarse grid locates the pieces; golden-section search
// refines every sampled local maximum and bisection pins down every change of
// the participating vendor set, keeping whichever side earns more. Equal
// profits resolve to the lower price.
EquilibriumOutcome optimize_price(const MarketConfig& cfg, const PriceSearchSettings& settings = {});

}  // namespace market_eq
