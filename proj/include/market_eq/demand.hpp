#pragma once

// Stage III: users' demand equilibrium for a given price and device count.

#include <vector>

#include "market_eq/dense.hpp"
#include "market_eq/model.hpp"

namespace market_eq {

// First-order conditions A x = rhs of every user, with
//   A(i,i) = b_i + 2 kappa,  A(i,j) = kappa - g_ij,  rhs_i = a_i + eta V - p.
struct Stage3System {
  DenseMatrix matrix;
  std::vector<double> rhs;
};

Stage3System build_system(const MarketConfig& cfg, double price, int devices);

// Unique x >= 0 where every user with x_i > 0 has zero marginal utility and
// every user with x_i = 0 has non-positive marginal utility. `cfg` must be
// valid (diagonal dominance makes the complementarity problem well posed).
DemandProfile solve_demand(const MarketConfig& cfg, double price, int devices);

// Price above which nobody buys even with every vendor participating.
double demand_choke_price(const MarketConfig& cfg);

}  // namespace market_eq
