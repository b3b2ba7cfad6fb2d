#include "market_eq/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "json.hpp"
#include "market_eq/config_file.hpp"
#include "market_eq/demand.hpp"
#include "market_eq/oracle.hpp"
#include "market_eq/pricing.hpp"
#include "market_eq/random_market.hpp"
#include "market_eq/vendors.hpp"

namespace market_eq {
namespace {

constexpr std::uint64_t kStage3Salt = 0x5354414745330000ULL;
constexpr std::uint64_t kStage2Salt = 0x5354414745320000ULL;
constexpr std::uint64_t kStage1Salt = 0x5354414745310000ULL;
constexpr std::size_t kStage1Cap = 20;

std::string printf_string(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Collects per-check tallies in first-seen order plus the first failure.
class Recorder {
 public:
  Recorder(std::uint64_t seed, std::size_t count) {
    report_.seed = seed;
    report_.count = count;
  }

  void record(const std::string& check, std::size_t instance, const MarketConfig& cfg,
              const std::optional<std::string>& failure) {
    auto it = index_.find(check);
    if (it == index_.end()) {
      it = index_.emplace(check, report_.checks.size()).first;
      report_.checks.push_back({check, 0, 0});
    }
    auto& summary = report_.checks[it->second];
    ++summary.runs;
    if (!failure) return;
    ++summary.failures;
    if (!report_.first_failure)
      report_.first_failure = CertificationFailure{check, instance, *failure, format_config(cfg)};
  }

  // Runs one check, counting an exception as a failure of that check.
  template <typename Check>
  void check(const std::string& name, std::size_t instance, const MarketConfig& cfg, Check&& body) {
    std::optional<std::string> failure;
    try {
      failure = body();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    record(name, instance, cfg, failure);
  }

  CertificationReport take() { return std::move(report_); }

 private:
  CertificationReport report_;
  std::map<std::string, std::size_t> index_;
};

std::optional<std::string> check_first_order(const MarketConfig& cfg, double price, int devices,
                                             const DemandProfile& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double foc = marginal_utility(cfg, i, x.values(), price, devices);
    if (x[i] > 0.0 && std::abs(foc) > 1e-8)
      return printf_string("user %zu interior residual %.3e", i, foc);
    if (std::abs(x[i] * foc) > 1e-8)
      return printf_string("user %zu complementarity product %.3e", i, x[i] * foc);
    if (x[i] == 0.0 && foc > 1e-8)
      return printf_string("user %zu priced out but marginal utility %.3e > 0", i, foc);
  }
  return std::nullopt;
}

double max_abs_diff(const DemandProfile& a, const DemandProfile& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

DemandProfile corrupt(const DemandProfile& x) {
  auto values = std::vector<double>(x.values().begin(), x.values().end());
  values[0] += 0.5;
  return DemandProfile(std::move(values));
}

}  // namespace

std::string CertificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["count"] = count;
  j["passed"] = passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name}, {"runs", c.runs}, {"failures", c.failures}});
  if (first_failure) {
    j["first_counterexample"] = {{"check", first_failure->check},
                                 {"instance", first_failure->instance},
                                 {"detail", first_failure->detail},
                                 {"config", first_failure->config}};
  }
  return j.dump(2) + "\n";
}

CertificationReport certify_stage3(const CertifyOptions& options) {
  Recorder rec(options.seed, options.count);
  std::mt19937_64 rng(options.seed ^ kStage3Salt);
  for (std::size_t k = 0; k < options.count; ++k) {
    const MarketConfig cfg = random_dominant_market(rng);
    const double price = uniform(rng, 0.0, 1.1 * demand_choke_price(cfg));
    const int devices = uniform_int(rng, 0, cfg.total_devices());

    DemandProfile x = solve_demand(cfg, price, devices);
    if (options.fault == Fault::kDemand) x = corrupt(x);
    const double step = 0.01;

    rec.check("stage3.best_response_agreement", k, cfg, [&]() -> std::optional<std::string> {
      const oracle::GridSpec grid{0.0, oracle::demand_bound(cfg, price, devices) + 1.0, step};
      const double gap = max_abs_diff(x, oracle::best_response_iteration(cfg, price, devices, grid));
      if (gap <= step + 1e-12) return std::nullopt;
      return printf_string("max |x - x_grid| = %.6g > %.6g", gap, step);
    });

    rec.check("stage3.nash", k, cfg, [&]() -> std::optional<std::string> {
      double top = 0.0;
      for (double v : x.values()) top = std::max(top, v);
      const auto cex = oracle::verify_nash(cfg, price, devices, x.values(), {0.0, 2.0 * top + 1.0, step});
      if (!cex) return std::nullopt;
      return printf_string("user %zu gains %.6g by deviating to %.6g", cex->user, cex->gain, cex->deviation);
    });

    rec.check("stage3.first_order", k, cfg, [&] { return check_first_order(cfg, price, devices, x); });

    rec.check("stage3.enumeration", k, cfg, [&]() -> std::optional<std::string> {
      const double gap = max_abs_diff(x, oracle::enumerate_demand_equilibrium(cfg, price, devices));
      if (gap <= 1e-9) return std::nullopt;
      return printf_string("max |x - x_enum| = %.6g", gap);
    });
  }
  return rec.take();
}

CertificationReport certify_stage2(const CertifyOptions& options, std::size_t fixed_point_count) {
  Recorder rec(options.seed, options.count);
  std::mt19937_64 rng(options.seed ^ kStage2Salt);

  for (std::size_t k = 0; k < options.count; ++k) {
    MarketConfig cfg;
    cfg.users = {{10.0, 2.0}};
    cfg.network = NetworkEffectMatrix(1);
    VendorParams v;
    v.device_count = uniform_int(rng, 1, 4);
    v.per_device_cost = uniform(rng, 0.0, 1.0);
    v.share_weight = uniform(rng, 0.01, 1.0);
    v.reward_sensitivity = uniform(rng, 0.2, 2.0);
    cfg.vendors = {v};
    const double total = uniform(rng, 0.0, 20.0);

    rec.check("stage2.best_response", k, cfg, [&]() -> std::optional<std::string> {
      VendorOutcome closed = vendor_best_response(cfg, 0, total);
      if (options.fault == Fault::kReward) closed.reward += 0.01;
      const double step = 1e-3;
      const double top = std::max(v.cost(), v.share_weight * total / v.reward_sensitivity) + 1.0;
      const auto grid = oracle::vendor_grid_argmax(cfg, 0, total, {0.0, top, step});
      if (std::abs(closed.reward - grid.argmax) <= step + 1e-12) return std::nullopt;
      return printf_string("X = %.6g: closed-form reward %.9g vs grid %.9g", total, closed.reward, grid.argmax);
    });
  }

  for (std::size_t k = 0; k < fixed_point_count; ++k) {
    const MarketConfig cfg = random_dominant_market(rng, {.max_users = 3, .max_vendors = 5});
    const double price = uniform(rng, 0.0, demand_choke_price(cfg));
    rec.check("stage2.participation", k, cfg, [&]() -> std::optional<std::string> {
      const auto fixed = participation_fixed_point(cfg, price).participation();
      const auto exhaustive = oracle::exhaustive_participation(cfg, price);
      if (fixed == exhaustive) return std::nullopt;
      auto describe = [](const std::vector<bool>& set) {
        std::string out;
        for (bool b : set) out += b ? '1' : '0';
        return out;
      };
      return printf_string("p = %.9g: fixed point ", price) + describe(fixed) + " vs exhaustive " +
             describe(exhaustive);
    });
  }
  return rec.take();
}

std::vector<MarketConfig> stage1_markets(const CertifyOptions& options) {
  std::mt19937_64 rng(options.seed ^ kStage1Salt);
  std::vector<MarketConfig> out;
  for (std::size_t k = 0; k < options.count; ++k) out.push_back(random_dominant_market(rng));
  return out;
}

CertificationReport certify_stage1(const CertifyOptions& options) {
  Recorder rec(options.seed, options.count);
  const auto markets = stage1_markets(options);
  for (std::size_t k = 0; k < markets.size(); ++k) {
    const MarketConfig& cfg = markets[k];
    rec.check("stage1.price", k, cfg, [&]() -> std::optional<std::string> {
      EquilibriumOutcome best = optimize_price(cfg);
      if (options.fault == Fault::kPrice) best = make_outcome(cfg, provider_profit_at(cfg, best.price + 0.01));
      const auto [lo, hi] = price_search_range(cfg);
      const double step = 1e-4;
      const auto coarse = oracle::price_grid_argmax(cfg, {lo, hi, step});
      // Profit jumps where vendors drop out, so a 1e-4 grid can sit well below
      // the supremum; the profit comparison uses a 1e-7 grid around the coarse
      // winner.
      const auto fine = oracle::price_grid_argmax(
          cfg, {std::max(lo, coarse.argmax - step), std::min(hi, coarse.argmax + step), 1e-7});
      const double grid_profit = std::max(fine.value, coarse.value);
      const double dp = std::abs(best.price - coarse.argmax);
      const double dprofit = std::abs(best.provider_utility - grid_profit);
      if (dp <= step && dprofit <= 1e-6) return std::nullopt;
      return printf_string("price %.9g vs grid %.9g, profit %.12g vs grid %.12g", best.price, coarse.argmax,
                           best.provider_utility, grid_profit);
    });
  }
  return rec.take();
}

CertificationReport merge_reports(std::vector<CertificationReport> reports) {
  CertificationReport out;
  if (!reports.empty()) {
    out.seed = reports.front().seed;
    out.count = reports.front().count;
  }
  for (auto& r : reports) {
    for (auto& c : r.checks) out.checks.push_back(std::move(c));
    if (!out.first_failure && r.first_failure) out.first_failure = std::move(r.first_failure);
  }
  return out;
}

CertificationReport certify(const CertifyOptions& options) {
  CertifyOptions stage1 = options;
  stage1.count = std::min(options.count, kStage1Cap);
  return merge_reports({certify_stage3(options), certify_stage2(options, options.count),
                        certify_stage1(stage1)});
}

}  // namespace market_eq
