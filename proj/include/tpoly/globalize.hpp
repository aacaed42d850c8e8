#pragma once

// Globalization of a graph-backed L-infinity automorphism of formal polyvector fields:
//   extend_vertical (act on y, psi with x, eta inert) -> twist by B -> F^glob = sigma F^{vert,B}(tau ...).

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "tpoly/fedosov.hpp"
#include "tpoly/gra_action.hpp"
#include "tpoly/linfty.hpp"

namespace tpoly {

class ConditionGateError : public std::invalid_argument {
 public:
  ConditionGateError(int condition, const std::string& detail)
      : std::invalid_argument("condition (" + std::to_string(condition) + ") fails: " + detail),
        condition_(condition) {}
  int condition() const { return condition_; }

 private:
  int condition_;
};

/// The components of arity >= 2 as one invariant graph sum.
InvariantGraphSum higher_components(const GraphMorphism& f);

/// Runs check_conditions on F and throws ConditionGateError naming the first failure.
/// Only conditions 1..upTo are enforced.
ConditionReport condition_gate(const GraphMorphism& f, int arityCap, int d, int upTo = 4);

/// Step 1: same graphs acting on fiber variables. Gated by conditions (1) and (2).
std::shared_ptr<GraphMorphism> extend_vertical(const GraphMorphism& f, int arityCap, int d);

/// F^glob_n(f_1..f_n) = sigma(F^{vert,B}_n(tau f_1, ..., tau f_n)).
class GlobalMorphism : public LInftyMorphism {
 public:
  GlobalMorphism(std::shared_ptr<const FedosovData> fd, MorphismPtr twisted, int arityCap);

  GradedElement component(const Args& args) const override;
  std::optional<int> max_arity() const override { return arityCap_; }
  std::string describe() const override;

  const FedosovData& fedosov() const { return *fd_; }
  const LInftyMorphism& twisted() const { return *twisted_; }
  /// tau(f), memoized.
  const GradedElement& lift(const GradedElement& f) const;

 private:
  std::shared_ptr<const FedosovData> fd_;
  MorphismPtr twisted_;
  int arityCap_;
  mutable std::map<std::string, GradedElement> lifts_;
};

struct GlobalizeResult {
  std::shared_ptr<GlobalMorphism> morphism;
  ConditionReport conditions;
  std::string report;
};

/// Full pipeline. F should carry components up to arityCap + d (the twist inserts up to d copies
/// of B); fewer components are allowed and noted in the report.
GlobalizeResult globalize(const GraphMorphism& f, const ConnectionJet& cj, TruncationPolicy policy, int arityCap);

/// Descent: F^{vert,B}_n maps tuples of D-cocycles tau(f_i) to D-cocycles, n <= arityCap.
bool check_descent(const GlobalMorphism& g, int arityCap, std::uint64_t seed = 1, int trials = 3);

/// Random polyvector sampler matching the global morphism's dimension and policy.
std::function<GradedElement(Random&)> polyvector_sampler(int d, TruncationPolicy policy, int maxXDegree = 2,
                                                         int terms = 3);

struct InvarianceReport {
  bool unchanged = true;
  int perturbations = 0;
  int comparisons = 0;
  int nonzeroValues = 0;  // evaluations where F^{vert,B} was nonzero
  std::string detail;
};

/// Perturbs B by eta^i H^k_ij(x) y^j psi_k for random H and compares F^{vert,B}_n on random
/// vertical inputs, n <= arityCap.
InvarianceReport step2_invariance_report(const GraphMorphism& f, const FedosovData& fd, int arityCap,
                                         int perturbations = 10, std::uint64_t seed = 1, bool zeroH = false);

}  // namespace tpoly
