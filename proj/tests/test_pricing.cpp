#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "market_eq/demand.hpp"
#include "market_eq/errors.hpp"
#include "market_eq/oracle.hpp"
#include "market_eq/parallel.hpp"
#include "market_eq/pricing.hpp"
#include "market_eq/random_market.hpp"

#include <cstdlib>

using namespace market_eq;

TEST_CASE("provider profit at boundary prices") {
  const MarketConfig cfg = test::reference();
  const ProfitEvaluation above = provider_profit_at(cfg, demand_choke_price(cfg) + 0.5);
  CHECK(above.profit == 0.0);
  CHECK(above.response.demand.total() == 0.0);
  CHECK(above.response.participating_devices == 0);

  const ProfitEvaluation free = provider_profit_at(cfg, 0.0);
  double paid = 0.0;
  for (const auto& v : free.response.vendors) paid += v.reward * v.dispatch;
  CHECK(free.profit == doctest::Approx(-paid));
  CHECK(free.profit <= 0.0);

  const MarketConfig monopoly = test::single_user();
  for (double p : {1.0, 3.0, 5.0, 8.5}) CHECK(provider_profit_at(monopoly, p).profit == doctest::Approx(p * (10 - p) / 2));
}

TEST_CASE("monopoly price") {
  const EquilibriumOutcome o = optimize_price(test::single_user());
  CHECK(std::abs(o.price - 5.0) <= 1e-6);
  CHECK(std::abs(o.provider_utility - 12.5) <= 1e-8);
}

TEST_CASE("search range and settings") {
  MarketConfig cfg = test::single_user();
  CHECK(price_search_range(cfg) == std::pair{0.0, 10.0});
  cfg.price_max = 4.0;
  cfg.price_min = 1.0;
  CHECK(price_search_range(cfg) == std::pair{1.0, 4.0});
  CHECK(optimize_price(cfg).price == doctest::Approx(4.0));
  cfg.price_min = 11.0;
  cfg.price_max = 12.0;
  CHECK_THROWS_AS(price_search_range(cfg), SolverError);
  CHECK_THROWS_AS(optimize_price(test::single_user(), {2, 60, 1e-9}), std::invalid_argument);
  CHECK_THROWS_AS(optimize_price(test::single_user(), {11, 60, 0.0}), std::invalid_argument);
}

TEST_CASE("flat profit resolves to the lowest price") {
  // Nobody can afford anything at any price: profit is zero everywhere.
  MarketConfig cfg = test::single_user();
  cfg.price_min = 10.0;
  cfg.price_max = 10.0 + 1e-3;
  const EquilibriumOutcome o = optimize_price(cfg);
  CHECK(o.price == 10.0);
  CHECK(o.provider_utility == 0.0);
}

TEST_CASE("reference market against a fine price grid") {
  const MarketConfig cfg = test::reference();
  const EquilibriumOutcome o = optimize_price(cfg);
  const auto [lo, hi] = price_search_range(cfg);
  const auto grid = oracle::price_grid_argmax(cfg, {lo, hi, 1e-4});
  CHECK(std::abs(o.price - grid.argmax) <= 1e-4);
  CHECK(std::abs(o.provider_utility - grid.value) <= 1e-6);

  // 1e5-point verification grid.
  const oracle::GridSpec dense{lo, hi, (hi - lo) / 99999.0};
  std::vector<double> profits(dense.count());
  parallel_for(profits.size(), [&](std::size_t k) { profits[k] = provider_profit_at(cfg, dense.at(k)).profit; });
  for (double p : profits) CHECK(o.provider_utility >= p - 1e-7);
}

TEST_CASE("outcome is internally consistent") {
  const MarketConfig cfg = test::reference();
  const EquilibriumOutcome o = optimize_price(cfg);
  const EquilibriumOutcome again = make_outcome(cfg, provider_profit_at(cfg, o.price));
  CHECK(again.provider_utility == doctest::Approx(o.provider_utility).epsilon(1e-12));
  CHECK(again.participating_devices == o.participating_devices);
  for (std::size_t i = 0; i < o.demand.size(); ++i) {
    CHECK(std::abs(again.demand[i] - o.demand[i]) <= 1e-9);
    CHECK(std::abs(again.user_utilities[i] - o.user_utilities[i]) <= 1e-9);
  }
  double paid = 0.0;
  int devices = 0;
  for (std::size_t j = 0; j < o.vendors.size(); ++j) {
    paid += o.vendors[j].reward * o.vendors[j].dispatch;
    if (o.vendors[j].participating) devices += cfg.vendors[j].device_count;
  }
  CHECK(std::abs(o.price * o.demand.total() - paid - o.provider_utility) <= 1e-9);
  CHECK(devices == o.participating_devices);
}

TEST_CASE("result does not depend on the worker count") {
  const MarketConfig cfg = test::reference();
  ::setenv("MARKET_EQ_THREADS", "1", 1);
  const EquilibriumOutcome serial = optimize_price(cfg);
  ::setenv("MARKET_EQ_THREADS", "4", 1);
  const EquilibriumOutcome parallel = optimize_price(cfg);
  ::unsetenv("MARKET_EQ_THREADS");
  CHECK(serial.price == parallel.price);
  CHECK(serial.provider_utility == parallel.provider_utility);
}

TEST_CASE("property: optimum beats a price grid and is never negative") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const MarketConfig cfg = random_dominant_market(rng);
    const EquilibriumOutcome o = optimize_price(cfg);
    CHECK(o.provider_utility >= 0.0);
    const auto [lo, hi] = price_search_range(cfg);
    const auto grid = oracle::price_grid_argmax(cfg, {lo, hi, (hi - lo) / 2000.0});
    CHECK(o.provider_utility >= grid.value - 1e-9);
  }
}

TEST_CASE("property: higher benefit slopes never lower the price for identical users") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) {
    MarketConfig cfg = random_dominant_market(rng);
    cfg.users.assign(cfg.user_count(), cfg.users.front());
    cfg.vendors.clear();
    MarketConfig richer = cfg;
    for (auto& u : richer.users) u.benefit_slope += 1.0;
    const double p = optimize_price(cfg).price, q = optimize_price(richer).price;
    CHECK(std::abs(p - oracle::price_grid_argmax(cfg, {0.0, price_search_range(cfg).second, 1e-3}).argmax) <= 2e-3);
    CHECK(std::abs(q - oracle::price_grid_argmax(richer, {0.0, price_search_range(richer).second, 1e-3}).argmax) <=
          2e-3);
    CHECK(q >= p - 1e-6);
  }
}

TEST_CASE("higher benefits can move the provider from a niche to the mass market") {
  // Strong user a = 10, weak user a = 4: serving only the strong user at 5
  // earns 12.5, serving both at 3.5 earns 12.25. After +1 on both, the niche
  // price 5.5 earns 15.125 but serving both at 4 earns 16.
  MarketConfig cfg;
  cfg.users = {{10.0, 2.0}, {4.0, 2.0}};
  cfg.network = NetworkEffectMatrix(2);
  MarketConfig richer = cfg;
  for (auto& u : richer.users) u.benefit_slope += 1.0;
  const EquilibriumOutcome before = optimize_price(cfg), after = optimize_price(richer);
  CHECK(before.price == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(before.provider_utility == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(after.price == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(after.provider_utility == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(oracle::price_grid_argmax(richer, {0.0, 11.0, 1e-3}).argmax == doctest::Approx(4.0));
}
