// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdlib>
#include <iostream>

#include "steerlab/acceptance.hpp"

int main() {
  steer::acceptance::Options options;
  if (const char* seed = std::getenv("STEER_SEED")) options.seed = std::strtoull(seed, nullptr, 10);
  const auto results = steer::acceptance::run(options);
  steer::acceptance::print(std::cout, results);
  const bool ok = steer::acceptance::all_passed(results);
  std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << "\n";
  return ok ? 0 : 1;
}
