#pragma once

#include <cstdint>
#include <random>

#include "market_eq/model.hpp"

namespace market_eq {

// Uniform double in [lo, hi) from the top 53 bits, so a seed reproduces the
// same draws on every standard library.
double uniform(std::mt19937_64& rng, double lo, double hi);
int uniform_int(std::mt19937_64& rng, int lo, int hi);  // inclusive

struct RandomMarketSpec {
  std::size_t max_users = 3;
  std::size_t max_vendors = 3;
  // g_ij and kappa are drawn from [0, max_coupling]. With N <= 3 and
  // saturation >= 1 the default keeps every user's coupling at most half of
  // its own curvature.
  double max_coupling = 0.25;
  double min_margin = 0.1;
};

// Random market whose users satisfy b_i + 2 kappa - sum_j |g_ij - kappa| >=
// min_margin; kappa and g are scaled down together when a draw falls short.
MarketConfig random_dominant_market(std::mt19937_64& rng, const RandomMarketSpec& spec = {});

}  // namespace market_eq
