#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavroute/params.hpp"

namespace cavroute {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast built-in sanity suite behind the `check` subcommand: gradient vs
/// finite differences, simplex projection, marginal-cost oracle agreement,
/// CD/CS knapsack spot checks. Deterministic for a given seed.
std::vector<CheckResult> run_self_checks(const Parameters& params,
                                         std::uint64_t seed);

}  // namespace cavroute
