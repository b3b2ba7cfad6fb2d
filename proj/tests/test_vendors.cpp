#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "market_eq/demand.hpp"
#include "market_eq/oracle.hpp"
#include "market_eq/random_market.hpp"
#include "market_eq/vendors.hpp"

using namespace market_eq;

namespace {

MarketConfig with_vendor(double w, double tau, double c) {
  MarketConfig cfg = test::single_user();
  cfg.vendors = {test::vendor(1, c, w, tau)};
  return cfg;
}

}  // namespace

TEST_CASE("closed-form best response") {
  const VendorOutcome v = vendor_best_response(with_vendor(0.1, 0.5, 1.0), 0, 10.0);
  CHECK(v.participating);
  CHECK(v.reward == doctest::Approx(1.5));
  CHECK(v.dispatch == doctest::Approx(0.25));
  CHECK(v.utility == doctest::Approx(0.125));

  const VendorOutcome out = vendor_best_response(with_vendor(0.1, 0.5, 3.0), 0, 10.0);
  CHECK_FALSE(out.participating);
  CHECK(out.reward == 3.0);
  CHECK(out.dispatch == 0.0);
  CHECK(out.utility == 0.0);

  // Break-even exactly: zero profit resolves to staying out.
  CHECK_FALSE(vendor_best_response(with_vendor(0.1, 0.5, 2.0), 0, 10.0).participating);
  CHECK_FALSE(vendor_best_response(with_vendor(0.1, 0.5, 0.0), 0, 0.0).participating);
  CHECK_THROWS_AS(vendor_best_response(with_vendor(0.1, 0.5, 1.0), 1, 10.0), std::out_of_range);
}

TEST_CASE("grid scan agrees with the closed form") {
  const MarketConfig cfg = with_vendor(0.1, 0.5, 1.0);
  const auto grid = oracle::vendor_grid_argmax(cfg, 0, 10.0, {0.0, 3.0, 1e-3});
  CHECK(std::abs(grid.argmax - 1.5) <= 1e-3);
}

TEST_CASE("property: best response invariants") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 300; ++k) {
    const double w = uniform(rng, 0.01, 1.0), tau = uniform(rng, 0.1, 3.0), c = uniform(rng, 0.0, 2.0);
    const double total = uniform(rng, 0.0, 20.0);
    const MarketConfig cfg = with_vendor(w, tau, c);
    const VendorOutcome v = vendor_best_response(cfg, 0, total);
    CHECK(v.utility >= 0.0);
    CHECK(v.dispatch <= w * total + 1e-12);
    if (!v.participating) {
      CHECK(v.dispatch == 0.0);
      CHECK(v.utility == 0.0);
      continue;
    }
    CHECK(v.reward >= c);
    CHECK(v.dispatch > 0.0);
    CHECK(v.utility == doctest::Approx(vendor_utility(cfg, 0, v.reward, v.dispatch)));
    for (double eps : {1e-3, 1e-2, 0.1})
      for (double r : {v.reward - eps, v.reward + eps})
        CHECK(vendor_utility(cfg, 0, r, dispatch_demand(cfg, 0, total, r)) <= v.utility + 1e-12);

    const VendorOutcome dearer = vendor_best_response(with_vendor(w, tau, c + 0.1), 0, total);
    CHECK(dearer.utility <= v.utility + 1e-12);
    CHECK(dearer.dispatch <= v.dispatch + 1e-12);
    if (dearer.participating) CHECK(dearer.reward >= v.reward - 1e-12);
  }
}

TEST_CASE("participation fixed point") {
  MarketConfig cfg = test::symmetric_pair();
  const MarketResponse none = participation_fixed_point(cfg, 2.0);
  CHECK(none.participating_devices == 0);
  CHECK(none.vendors.empty());
  CHECK(none.demand.total() == doctest::Approx(solve_demand(cfg, 2.0, 0).total()));

  cfg.externalities.indirect = 0.1;
  cfg.vendors = {test::vendor(2, 0.0, 0.2, 1.0), test::vendor(3, 0.0, 0.3, 0.5)};
  const MarketResponse all = participation_fixed_point(cfg, 2.0);
  CHECK(all.participating_devices == 5);
  CHECK(all.participation() == std::vector<bool>{true, true});
}

TEST_CASE("reference market participation matches frozen values") {
  const MarketConfig cfg = test::reference();
  const double price = 5.1594405367;
  const MarketResponse r = participation_fixed_point(cfg, price);
  CHECK(r.participation() == oracle::exhaustive_participation(cfg, price));
  CHECK(r.participating_devices == 5);
  CHECK(r.demand.total() == doctest::Approx(11.888112).epsilon(1e-7));
  for (const auto& v : r.vendors) {
    CHECK(v.reward == doctest::Approx(0.6444056).epsilon(1e-7));
    CHECK(v.dispatch == doctest::Approx(0.21776224).epsilon(1e-7));
  }
}

TEST_CASE("property: fixed point is consistent and matches subset enumeration") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 100; ++k) {
    const MarketConfig cfg = random_dominant_market(rng, {.max_users = 3, .max_vendors = 5});
    const double p = uniform(rng, 0.0, demand_choke_price(cfg));
    const MarketResponse r = participation_fixed_point(cfg, p);
    CHECK(r.participation() == oracle::exhaustive_participation(cfg, p));

    int devices = 0;
    double dispatched = 0.0;
    for (std::size_t j = 0; j < r.vendors.size(); ++j) {
      const VendorOutcome again = vendor_best_response(cfg, j, r.demand.total());
      CHECK(again.participating == r.vendors[j].participating);
      if (r.vendors[j].participating) devices += cfg.vendors[j].device_count;
      dispatched += r.vendors[j].dispatch;
    }
    CHECK(devices == r.participating_devices);
    CHECK(dispatched <= r.demand.total() + 1e-12);
    CHECK(solve_demand(cfg, p, devices).values()[0] == doctest::Approx(r.demand[0]));
  }
}
