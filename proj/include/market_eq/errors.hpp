#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace market_eq {

enum class IssueKind {
  kDominanceViolation,
  kShareOverflow,
  kNonPositiveCoefficient,
  kNegativeCoefficient,
  kBadPriceBounds,
  kBadNetworkMatrix,
  kNoUsers,
  kSyntax,
};

const char* to_string(IssueKind kind);

// One violated invariant. `index` is the user/vendor index when the issue is
// tied to a single entity, `field` names the offending parameter.
struct ConfigIssue {
  IssueKind kind;
  std::string field;
  std::size_t index = 0;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

enum class SolverFailure {
  kSingularSystem,
  kIterationCapExceeded,
  kEmptyPriceRange,
  kNoConvergence,
};

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverFailure failure, const std::string& what)
      : std::runtime_error(what), failure_(failure) {}
  SolverFailure failure() const { return failure_; }

 private:
  SolverFailure failure_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace market_eq
