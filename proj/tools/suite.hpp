#pragma once

// The acceptance suite shared by `tpoly verify-all` and the acceptance test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tpoly::suite {

struct Options {
  int d = 2;
  int yOrder = 4;
  int xOrder = 3;
  int arityCap = 2;
  std::uint64_t seed = 1;
};

struct Check {
  int criterion = 0;
  std::string name;
  bool ok = false;
  double seconds = 0;
  double limit = 0;  // seconds; a slower run fails
  std::string detail;
};

/// One line: `CHECK <n>-<name> PASS|FAIL [<t>s (limit <L>s)] <detail>`.
std::string format(const Check& c, bool withTime = true);

/// Runs criteria 1..10 in order, calling onResult after each.
std::vector<Check> run_acceptance(const Options& opts, const std::function<void(const Check&)>& onResult = {});

}  // namespace tpoly::suite
