#include "market_eq/demand.hpp"

#include <algorithm>
#include <optional>

namespace market_eq {
namespace {

constexpr double kReadmitTolerance = 1e-12;

}  // namespace

Stage3System build_system(const MarketConfig& cfg, double price, int devices) {
  const std::size_t n = cfg.user_count();
  const double kappa = cfg.externalities.congestion;
  Stage3System sys{DenseMatrix(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      sys.matrix(i, j) = i == j ? cfg.users[i].saturation + 2.0 * kappa : kappa - cfg.network(i, j);
    sys.rhs[i] = cfg.users[i].benefit_slope + cfg.externalities.indirect * devices - price;
  }
  return sys;
}

// Active-set projection: solve the first-order system on the active users,
// evict the most negative demand until all are non-negative, then re-admit
// inactive users that would still gain from buying.
DemandProfile solve_demand(const MarketConfig& cfg, double price, int devices) {
  const std::size_t n = cfg.user_count();
  const Stage3System sys = build_system(cfg, price, devices);

  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  std::vector<double> x(n, 0.0);

  const std::size_t cap = 4 * std::max<std::size_t>(n, 1);
  std::size_t solves = 0;
  while (true) {
    while (true) {
      if (++solves > cap)
        throw SolverError(SolverFailure::kIterationCapExceeded,
                          "demand active-set iteration cap exceeded");
      std::fill(x.begin(), x.end(), 0.0);
      if (!active.empty()) {
        std::vector<double> rhs(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) rhs[k] = sys.rhs[active[k]];
        const auto sub = solve_linear(sys.matrix.principal(active), std::move(rhs));
        for (std::size_t k = 0; k < active.size(); ++k) x[active[k]] = sub[k];
      }
      // Most negative demand; lowest index wins ties since `active` is sorted.
      std::optional<std::size_t> worst;
      for (std::size_t k = 0; k < active.size(); ++k)
        if (x[active[k]] < 0.0 && (!worst || x[active[k]] < x[active[*worst]])) worst = k;
      if (!worst) break;
      x[active[*worst]] = 0.0;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(*worst));
    }

    bool readmitted = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::binary_search(active.begin(), active.end(), i)) continue;
      double marginal = sys.rhs[i];
      for (std::size_t j = 0; j < n; ++j) marginal -= sys.matrix(i, j) * x[j];
      if (marginal > kReadmitTolerance) {
        active.insert(std::upper_bound(active.begin(), active.end(), i), i);
        readmitted = true;
      }
    }
    if (!readmitted) return DemandProfile(std::move(x));
  }
}

double demand_choke_price(const MarketConfig& cfg) {
  double top = 0.0;
  for (const auto& u : cfg.users) top = std::max(top, u.benefit_slope);
  return top + cfg.externalities.indirect * cfg.total_devices();
}

}  // namespace market_eq
