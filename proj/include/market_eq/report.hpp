#pragma once

#include <string>

#include "market_eq/model.hpp"

namespace market_eq {

// Plain-text equilibrium report: price, provider profit, device count, per
// user demand / utility / first-order residual, per vendor outcome. Numbers
// use 8 significant digits and residuals below 1e-12 print as "< 1e-12", so
// the text is stable across platforms.
std::string format_solve_report(const MarketConfig& cfg, const EquilibriumOutcome& outcome);

// Largest first-order violation: |du_i/dx_i| for buyers, max(0, du_i/dx_i)
// for users who buy nothing.
double max_first_order_residual(const MarketConfig& cfg, const EquilibriumOutcome& outcome);

}  // namespace market_eq
