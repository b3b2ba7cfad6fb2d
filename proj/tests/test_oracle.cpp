#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "market_eq/demand.hpp"
#include "market_eq/errors.hpp"
#include "market_eq/oracle.hpp"
#include "market_eq/pricing.hpp"
#include "market_eq/random_market.hpp"
#include "market_eq/vendors.hpp"

using namespace market_eq;
using oracle::GridSpec;

TEST_CASE("grid spec") {
  CHECK(GridSpec{0.0, 1.0, 0.01}.count() == 101);
  CHECK(GridSpec{0.0, 0.0, 0.5}.count() == 1);
  CHECK(GridSpec{0.0, 1.0, 0.3}.count() == 4);
  CHECK_THROWS_AS(GridSpec({1.0, 0.0, 0.1}).count(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 0.0}).count(), std::invalid_argument);
}

TEST_CASE("best-response iteration") {
  const auto one = oracle::best_response_iteration(test::single_user(), 2.0, 0, {0.0, 10.0, 0.01});
  CHECK(one[0] == doctest::Approx(4.0).epsilon(1e-12));

  const auto pair = oracle::best_response_iteration(test::symmetric_pair(), 2.0, 0, {0.0, 10.0, 0.01});
  CHECK(std::abs(pair[0] - 32.0 / 9.0) <= 0.01);
  CHECK(std::abs(pair[1] - 32.0 / 9.0) <= 0.01);
  CHECK(pair[0] == doctest::Approx(3.56));

  CHECK(oracle::best_response_iteration(test::single_user(), 12.0, 0, {0.0, 10.0, 0.01}).total() == 0.0);
  CHECK_THROWS_AS(oracle::best_response_iteration(test::symmetric_pair(), 2.0, 0, {0.0, 10.0, 0.01}, 1),
                  SolverError);
}

TEST_CASE("nash verification") {
  const MarketConfig cfg = test::symmetric_pair();
  const DemandProfile x = solve_demand(cfg, 2.0, 0);
  const GridSpec grid{0.0, 10.0, 0.01};
  CHECK_FALSE(oracle::verify_nash(cfg, 2.0, 0, x.values(), grid));

  std::vector<double> bad(x.values().begin(), x.values().end());
  bad[1] += 0.5;
  const auto cex = oracle::verify_nash(cfg, 2.0, 0, bad, grid);
  REQUIRE(cex);
  CHECK(cex->user == 1);
  CHECK(cex->gain > 0.0);

  const std::vector<double> zero{0.0};
  CHECK_FALSE(oracle::verify_nash(test::single_user(), 12.0, 0, zero, grid));
}

TEST_CASE("vendor grid argmax") {
  MarketConfig cfg = test::single_user();
  cfg.vendors = {test::vendor(1, 1.0, 0.1, 0.5)};
  const auto best = oracle::vendor_grid_argmax(cfg, 0, 10.0, {0.0, 3.0, 1e-3});
  CHECK(std::abs(best.argmax - 1.5) <= 1e-3);
  CHECK(best.value == doctest::Approx(0.125).epsilon(1e-6));

  cfg.vendors[0].per_device_cost = 2.5;
  const auto none = oracle::vendor_grid_argmax(cfg, 0, 10.0, {0.0, 3.0, 1e-3});
  CHECK(none.argmax == 2.5);
  CHECK(none.value == 0.0);
}

TEST_CASE("price grid argmax") {
  const auto mono = oracle::price_grid_argmax(test::single_user(), {0.0, 10.0, 1e-3});
  CHECK(mono.argmax == doctest::Approx(5.0));
  CHECK(mono.value == doctest::Approx(12.5));

  // Nobody buys at any price in range: profit is zero and the lowest price wins.
  MarketConfig cfg = test::single_user(1.0, 2.0);
  const auto zero = oracle::price_grid_argmax(cfg, {1.0, 3.0, 0.5});
  CHECK(zero.argmax == 1.0);
  CHECK(zero.value == 0.0);
}

TEST_CASE("active-set enumeration and demand bound") {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 100; ++k) {
    const MarketConfig cfg = random_dominant_market(rng, {.max_users = 5});
    const double p = uniform(rng, 0.0, 1.1 * demand_choke_price(cfg));
    const int v = uniform_int(rng, 0, cfg.total_devices());
    const DemandProfile a = solve_demand(cfg, p, v), b = oracle::enumerate_demand_equilibrium(cfg, p, v);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i] - b[i]) <= 1e-9);
      CHECK(a[i] <= oracle::demand_bound(cfg, p, v) + 1e-9);
    }
  }
}

TEST_CASE("exhaustive participation") {
  MarketConfig cfg = test::symmetric_pair();
  cfg.externalities.indirect = 0.1;
  cfg.vendors = {test::vendor(1, 0.0, 0.3, 1.0), test::vendor(1, 50.0, 0.3, 1.0)};
  CHECK(oracle::exhaustive_participation(cfg, 2.0) == std::vector<bool>{true, false});
  cfg.vendors.clear();
  CHECK(oracle::exhaustive_participation(cfg, 2.0).empty());
}

TEST_CASE("property: random grid fuzz of vendor best responses") {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 200; ++k) {
    MarketConfig cfg = test::single_user();
    cfg.vendors = {test::vendor(uniform_int(rng, 1, 3), uniform(rng, 0.0, 1.0), uniform(rng, 0.01, 1.0),
                                uniform(rng, 0.2, 2.0))};
    const double total = uniform(rng, 0.0, 20.0);
    const VendorOutcome closed = vendor_best_response(cfg, 0, total);
    const double top = std::max(cfg.vendors[0].cost(), cfg.vendors[0].share_weight * total /
                                                            cfg.vendors[0].reward_sensitivity) + 1.0;
    const auto grid = oracle::vendor_grid_argmax(cfg, 0, total, {0.0, top, 1e-3});
    CHECK(std::abs(grid.argmax - closed.reward) <= 1e-3 + 1e-12);
  }
}
