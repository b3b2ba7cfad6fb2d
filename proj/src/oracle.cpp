#include "market_eq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "market_eq/parallel.hpp"
#include "market_eq/pricing.hpp"

namespace market_eq::oracle {

std::size_t GridSpec::count() const {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("grid needs lo <= hi and step > 0");
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

DemandProfile best_response_iteration(const MarketConfig& cfg, double price, int devices,
                                      const GridSpec& grid, int max_rounds) {
  const std::size_t n = cfg.user_count();
  const std::size_t points = grid.count();
  std::vector<double> x(n, 0.0);
  std::set<std::vector<double>> seen;
  for (int round = 0; round < max_rounds; ++round) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> trial = x;
      double best_value = -std::numeric_limits<double>::infinity();
      double best_demand = x[i];
      for (std::size_t k = 0; k < points; ++k) {
        trial[i] = grid.at(k);
        const double value = user_utility(cfg, i, trial, price, devices);
        if (value > best_value) {
          best_value = value;
          best_demand = trial[i];
        }
      }
      if (best_demand != x[i]) {
        x[i] = best_demand;
        moved = true;
      }
    }
    if (!moved) return DemandProfile(std::move(x));
    // Near-ties can make neighbouring grid points alternate forever; every
    // state on such a cycle is a grid best response, so stop at the repeat.
    if (!seen.insert(x).second) return DemandProfile(std::move(x));
  }
  throw SolverError(SolverFailure::kNoConvergence, "best-response iteration did not converge");
}

std::optional<NashCounterexample> verify_nash(const MarketConfig& cfg, double price, int devices,
                                              std::span<const double> demand, const GridSpec& grid) {
  const std::size_t points = grid.count();
  std::optional<NashCounterexample> worst;
  std::vector<double> trial(demand.begin(), demand.end());
  for (std::size_t i = 0; i < cfg.user_count(); ++i) {
    const double slack = 1e-8 + (cfg.users[i].saturation + 2.0 * cfg.externalities.congestion) *
                                    grid.step * grid.step / 2.0;
    const double current = user_utility(cfg, i, demand, price, devices);
    for (std::size_t k = 0; k < points; ++k) {
      trial[i] = grid.at(k);
      const double gain = user_utility(cfg, i, trial, price, devices) - current;
      if (gain > slack && (!worst || gain > worst->gain)) worst = NashCounterexample{i, trial[i], gain};
    }
    trial[i] = demand[i];
  }
  return worst;
}

GridOptimum vendor_grid_argmax(const MarketConfig& cfg, std::size_t vendor, double total_demand,
                               const GridSpec& grid) {
  const std::size_t points = grid.count();
  GridOptimum best{0.0, -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < points; ++k) {
    const double r = grid.at(k);
    const double value = vendor_utility(cfg, vendor, r, dispatch_demand(cfg, vendor, total_demand, r));
    if (value > best.value) best = {r, value};
  }
  if (!(best.value > 0.0)) return {cfg.vendors[vendor].cost(), 0.0};
  return best;
}

GridOptimum price_grid_argmax(const MarketConfig& cfg, const GridSpec& grid) {
  const std::size_t points = grid.count();
  std::vector<double> profits(points);
  parallel_for(points, [&](std::size_t k) { profits[k] = provider_profit_at(cfg, grid.at(k)).profit; });
  std::size_t best = 0;
  for (std::size_t k = 1; k < points; ++k)
    if (profits[k] > profits[best]) best = k;
  return {grid.at(best), profits[best]};
}

namespace {

// Gauss-Jordan elimination without pivoting; fine for the strictly
// diagonally dominant blocks that arise here.
std::vector<double> gauss_jordan(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = a[k][k];
    for (std::size_t j = 0; j < n; ++j) a[k][j] /= pivot;
    b[k] /= pivot;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a[i][k];
      for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  return b;
}

}  // namespace

DemandProfile enumerate_demand_equilibrium(const MarketConfig& cfg, double price, int devices) {
  const std::size_t n = cfg.user_count();
  if (n > 20) throw std::invalid_argument("enumeration is limited to small markets");

  // Marginal utility is affine in demand, so its value at zero and at unit
  // vectors recovers the first-order system exactly.
  const std::vector<double> zero(n, 0.0);
  std::vector<double> intercept(n);
  std::vector<std::vector<double>> slope(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) intercept[i] = marginal_utility(cfg, i, zero, price, devices);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> unit(n, 0.0);
    unit[j] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      slope[i][j] = intercept[i] - marginal_utility(cfg, i, unit, price, devices);
  }

  std::vector<double> best;
  double best_violation = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) members.push_back(i);
    std::vector<std::vector<double>> sub(members.size(), std::vector<double>(members.size()));
    std::vector<double> rhs(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      rhs[r] = intercept[members[r]];
      for (std::size_t c = 0; c < members.size(); ++c) sub[r][c] = slope[members[r]][members[c]];
    }
    const auto solved = gauss_jordan(std::move(sub), std::move(rhs));
    std::vector<double> x(n, 0.0);
    double violation = 0.0;
    for (std::size_t r = 0; r < members.size(); ++r) {
      x[members[r]] = solved[r];
      violation = std::max(violation, -solved[r]);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!(mask >> i & 1)) violation = std::max(violation, marginal_utility(cfg, i, x, price, devices));
    if (violation < best_violation) {
      best_violation = violation;
      best = std::move(x);
    }
  }
  for (double& v : best) v = std::max(v, 0.0);
  return DemandProfile(std::move(best));
}

std::vector<bool> exhaustive_participation(const MarketConfig& cfg, double price) {
  const std::size_t m = cfg.vendor_count();
  if (m > 20) throw std::invalid_argument("enumeration is limited to few vendors");
  std::vector<bool> best(m, false);
  std::size_t best_size = 0;
  int best_devices = -1;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    int devices = 0;
    std::size_t size = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1) {
        devices += cfg.vendors[j].device_count;
        ++size;
      }
    const double total = enumerate_demand_equilibrium(cfg, price, devices).total();
    bool consistent = true;
    for (std::size_t j = 0; j < m && consistent; ++j) {
      // Profitable iff some demand is still dispatched at the break-even reward.
      const bool profitable = dispatch_demand(cfg, j, total, cfg.vendors[j].cost()) > 0.0;
      consistent = profitable == static_cast<bool>(mask >> j & 1);
    }
    if (!consistent) continue;
    if (size > best_size || (size == best_size && devices > best_devices)) {
      best_size = size;
      best_devices = devices;
      for (std::size_t j = 0; j < m; ++j) best[j] = mask >> j & 1;
    }
  }
  return best;
}

double demand_bound(const MarketConfig& cfg, double price, int devices) {
  const double kappa = cfg.externalities.congestion;
  double top = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cfg.user_count(); ++i) {
    top = std::max(top, cfg.users[i].benefit_slope + cfg.externalities.indirect * devices - price);
    double off = 0.0;
    for (std::size_t j = 0; j < cfg.user_count(); ++j)
      if (j != i) off += std::abs(cfg.network(i, j) - kappa);
    margin = std::min(margin, cfg.users[i].saturation + 2.0 * kappa - off);
  }
  return top / margin;
}

}  // namespace market_eq::oracle
