#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace udag {

struct SuiteOptions {
  std::uint64_t seed = 7;
  int workers = 1;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::string claim;      // what is being checked, in words
  std::string tolerance;  // how it is judged
  bool pass = false;
  double seconds = 0.0;
  nlohmann::json report;  // {experiment, params, estimates, gof, pass, tolerances, seed}
};

inline constexpr int kCriterionCount = 13;

// Named groups of criteria for `verify <suite>`.
const std::map<std::string, std::vector<int>>& suite_table();
// Throws ArgumentError for an unknown name.
std::vector<int> suite_criteria(const std::string& name);

/// Runs acceptance criteria, sharing sample sets between criteria that use
/// the same runs (for example the n = 10^6 chain samples behind the mean,
/// second-moment and KS checks).
class AcceptanceRunner {
 public:
  explicit AcceptanceRunner(SuiteOptions options);
  ~AcceptanceRunner();

  CriterionResult run(int id);

 private:
  struct Cache;
  SuiteOptions options_;
  std::unique_ptr<Cache> cache_;
};

// "[PASS] 3 mean scaling: ..." style single line.
std::string summary_line(const CriterionResult& result);

}  // namespace udag
