#pragma once

// Randomized oracle-versus-solver agreement checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "market_eq/model.hpp"

namespace market_eq {

// Deliberate solver corruption, used to prove the checks can fail.
enum class Fault { kNone, kDemand, kReward, kPrice };

struct CertifyOptions {
  std::uint64_t seed = 42;
  std::size_t count = 100;
  Fault fault = Fault::kNone;
};

struct CheckSummary {
  std::string name;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

struct CertificationFailure {
  std::string check;
  std::size_t instance = 0;
  std::string detail;
  std::string config;  // config file text of the failing market
};

struct CertificationReport {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<CheckSummary> checks;
  std::optional<CertificationFailure> first_failure;

  bool passed() const { return !first_failure; }
  // Deterministic JSON rendering (no timings).
  std::string to_json() const;
};

// Demand solver against best-response iteration (grid 0.01), Nash deviation
// scan, first-order residuals and exhaustive active-set enumeration.
CertificationReport certify_stage3(const CertifyOptions& options);

// Closed-form vendor reward against a 1e-3 reward grid on random
// (w, tau, c, X), and the participation fixed point against 2^M subset
// enumeration with up to five vendors.
CertificationReport certify_stage2(const CertifyOptions& options, std::size_t fixed_point_count);

// optimize_price against a 1e-4 price grid: price within 1e-4 of the grid
// argmax, and profit within 1e-6 of the best of that grid refined to 1e-7
// around its argmax.
CertificationReport certify_stage1(const CertifyOptions& options);

// The markets certify_stage1 draws for `options`, in order.
std::vector<MarketConfig> stage1_markets(const CertifyOptions& options);

// All of the above with `count` instances per check; the Stage I price grid
// is expensive, so it runs on the first min(count, 20) markets only.
CertificationReport certify(const CertifyOptions& options);

CertificationReport merge_reports(std::vector<CertificationReport> reports);

}  // namespace market_eq
