#pragma once

// Randomized property suites for the inequalities and identities the bounds
// rely on. Every suite is a pure function of (instances, seed).

#include <cstdint>
#include <string>
#include <vector>

namespace qdecouple::verify {

struct SuiteResult {
  std::string name;
  std::uint64_t seed = 0;
  int instances = 0;
  int checks = 0;
  int passed = 0;
  double worst_violation = 0.0;  // largest amount by which a check failed its inequality
  std::vector<std::string> failures;  // first few, for diagnostics

  bool ok() const { return checks > 0 && passed == checks; }
};

/// Absolute slack granted to every check, scaled by max(1, |reference|).
inline constexpr double kSlack = 1e-9;

const std::vector<std::string>& suite_names();
bool has_suite(const std::string& name);

/// Throws Error(InvalidParams) for unknown names.
///
/// The Monte Carlo suites (haar_average, randomizing) run
/// max(1, instances/10) and min(instances, 20) instances respectively.
SuiteResult run_suite(const std::string& name, int instances, std::uint64_t seed);
std::vector<SuiteResult> run_all(int instances, std::uint64_t seed);

}  // namespace qdecouple::verify
