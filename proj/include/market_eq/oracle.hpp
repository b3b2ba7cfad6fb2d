#pragma once

// Brute-force verifiers for small markets. Everything here is built from the
// payoff functions in model.hpp; nothing reads the analytic solvers' internals.
// price_grid_argmax is the exception by construction: it scans the provider's
// profit as evaluated through the lower stages.

#include <cstddef>
#include <optional>
#include <vector>

#include "market_eq/model.hpp"

namespace market_eq::oracle {

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.01;

  // Throws std::invalid_argument unless lo <= hi and step > 0.
  std::size_t count() const;
  double at(std::size_t k) const { return lo + static_cast<double>(k) * step; }
};

// Round-robin grid best responses starting from zero demand, until a full
// round moves nobody or the end-of-round state repeats (a cycle between
// neighbouring grid points). Throws SolverError(kNoConvergence) after `max_rounds`.
DemandProfile best_response_iteration(const MarketConfig& cfg, double price, int devices,
                                      const GridSpec& grid, int max_rounds = 10000);

struct NashCounterexample {
  std::size_t user = 0;
  double deviation = 0.0;
  double gain = 0.0;
};

// Largest profitable unilateral grid deviation, or nullopt when no user gains
// more than 1e-8 + (b_i + 2 kappa) step^2 / 2.
std::optional<NashCounterexample> verify_nash(const MarketConfig& cfg, double price, int devices,
                                              std::span<const double> demand, const GridSpec& grid);

struct GridOptimum {
  double argmax = 0.0;
  double value = 0.0;
};

// Reward grid scan of vendor profit; (c_j, 0) when no reward is profitable.
GridOptimum vendor_grid_argmax(const MarketConfig& cfg, std::size_t vendor, double total_demand,
                               const GridSpec& grid);

// Price grid scan of provider profit; ties go to the lower price.
GridOptimum price_grid_argmax(const MarketConfig& cfg, const GridSpec& grid);

// Demand equilibrium by trying all 2^N active sets and keeping the one that
// satisfies complementarity. Intended for N <= 10.
DemandProfile enumerate_demand_equilibrium(const MarketConfig& cfg, double price, int devices);

// Participating vendor set by trying all 2^M subsets: a subset is consistent
// when exactly its members can profit at the demand it induces. Returns the
// consistent subset with the most vendors (then most devices, then lowest
// mask). Intended for M <= 10.
std::vector<bool> exhaustive_participation(const MarketConfig& cfg, double price);

// Upper bound on any user's equilibrium demand from diagonal dominance:
// max_i (rhs_i)+ / min_i (diagonal - coupling).
double demand_bound(const MarketConfig& cfg, double price, int devices);

}  // namespace market_eq::oracle
