#pragma once

// Seeded generators for randomized property checks.

#include <cstdint>
#include <optional>
#include <random>

#include "tpoly/graded.hpp"

namespace tpoly {

struct ElementShape {
  bool useX = true;
  bool useY = true;
  bool usePsi = true;
  bool useEta = true;
  int terms = 4;
  int maxCoefficient = 5;
  int maxXDegree = 2;
  int maxYDegree = 2;
  std::optional<int> oddDegree;  // fix |psi|+|eta| when set
  std::optional<int> etaDegree;  // fix |eta| when set
  int minYDegree = 0;
};

class Random {
 public:
  explicit Random(std::uint64_t seed) : eng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin() { return uniform(0, 1) == 1; }
  Rational rational(int maxAbs);
  Rational nonzero_rational(int maxAbs);

  Monomial monomial(int dim, const ElementShape& shape);
  GradedElement element(int dim, TruncationPolicy policy, const ElementShape& shape);
  RationalMatrix invertible_matrix(int dim, int maxAbs = 2);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tpoly
