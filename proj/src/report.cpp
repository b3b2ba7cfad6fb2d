#include "market_eq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace market_eq {
namespace {

std::string g8(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8g", v == 0.0 ? 0.0 : v);  // folds -0
  return buf;
}

std::string residual(double r) {
  if (r < 1e-12) return "< 1e-12";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

double user_residual(const MarketConfig& cfg, const EquilibriumOutcome& o, std::size_t i) {
  const double foc = marginal_utility(cfg, i, o.demand.values(), o.price, o.participating_devices);
  return o.demand[i] > 0.0 ? std::abs(foc) : std::max(0.0, foc);
}

void line(std::string& out, const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  out += buf;
}

}  // namespace

double max_first_order_residual(const MarketConfig& cfg, const EquilibriumOutcome& outcome) {
  double worst = 0.0;
  for (std::size_t i = 0; i < outcome.demand.size(); ++i) worst = std::max(worst, user_residual(cfg, outcome, i));
  return worst;
}

std::string format_solve_report(const MarketConfig& cfg, const EquilibriumOutcome& o) {
  std::string out;
  line(out, "price                   %s\n", g8(o.price).c_str());
  line(out, "provider_utility        %s\n", g8(o.provider_utility).c_str());
  line(out, "participating_devices   %d\n", o.participating_devices);
  line(out, "total_demand            %s\n", g8(o.demand.total()).c_str());
  line(out, "provider_served_demand  %s\n", g8(o.provider_served_demand()).c_str());
  line(out, "max_foc_residual        %s\n", residual(max_first_order_residual(cfg, o)).c_str());

  line(out, "\nusers %zu\n", o.demand.size());
  line(out, "%-6s %-14s %-14s %s\n", "index", "demand", "utility", "foc_residual");
  for (std::size_t i = 0; i < o.demand.size(); ++i)
    line(out, "%-6zu %-14s %-14s %s\n", i, g8(o.demand[i]).c_str(), g8(o.user_utilities[i]).c_str(),
         residual(user_residual(cfg, o, i)).c_str());

  line(out, "\nvendors %zu\n", o.vendors.size());
  line(out, "%-6s %-13s %-14s %-14s %s\n", "index", "participating", "reward", "dispatch", "utility");
  for (std::size_t j = 0; j < o.vendors.size(); ++j) {
    const auto& v = o.vendors[j];
    line(out, "%-6zu %-13s %-14s %-14s %s\n", j, v.participating ? "yes" : "no", g8(v.reward).c_str(),
         g8(v.dispatch).c_str(), g8(v.utility).c_str());
  }
  return out;
}

}  // namespace market_eq
