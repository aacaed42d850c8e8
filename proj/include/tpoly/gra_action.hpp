#pragma once

// The action of Gra on polyvector fields: a graph with n vertices becomes an n-ary
// polydifferential operator Phi_Gamma = mu o prod_edges Delta_(i,j), where
//   Delta_(i,j) = sum_k d/dx^k_(j) d/dpsi_k^(i) + d/dpsi_k^(j) d/dx^k_(i).

#include <string>
#include <vector>

#include "tpoly/graded.hpp"
#include "tpoly/graph.hpp"

namespace tpoly {

/// Which even variables the edge operators differentiate. In Fiber mode the operators act
/// on y and psi; x and eta are inert coefficients (the C^infty[eta]-linear extension).
enum class Variables { Base, Fiber };

/// Reference evaluation: applies the edge operators one at a time to the expanded tensor
/// product of the arguments, in the stored edge order, then multiplies the slots.
GradedElement phi(const Graph& g, const std::vector<GradedElement>& args, Variables vars = Variables::Base);
GradedElement phi(const GraphSum& g, const std::vector<GradedElement>& args, Variables vars = Variables::Base);

/// Second evaluation path: sums over all orientations and indices of the edges (directed
/// graphs), applying each vertex's derivatives to its argument and collecting the signs in
/// closed form. Much faster; used by the morphism layer.
GradedElement phi_directed_expansion(const Graph& g, const std::vector<GradedElement>& args,
                                     Variables vars = Variables::Base);
GradedElement phi_directed_expansion(const GraphSum& g, const std::vector<GradedElement>& args,
                                     Variables vars = Variables::Base);

/// phi(g1 o_i g2)(args) == phi(g1)(args_<i, phi(g2)(args_i..), args_>..) with the Koszul sign
/// of moving the (parity |E(g2)|) operator past the earlier arguments.
bool operad_morphism_check(const Graph& g1, int i, const Graph& g2, const std::vector<GradedElement>& args);

/// lambda_n = n! / 2^(n-1): the scale that turns graph classes into CE cochains so that the
/// graph bracket becomes the Nijenhuis-Richardson bracket and MC maps to the Schouten bracket.
Rational cochain_scale(int n);

/// Evaluates the arity-n part of an invariant graph sum as a symmetric cochain:
///   sum_rep c * lambda_n * avg_sigma Phi_{sigma rep}(args).
GradedElement evaluate_cochain(const InvariantGraphSum& gamma, const std::vector<GradedElement>& args,
                               Variables vars = Variables::Base);

struct ConditionReport {
  bool formal = true;          // (1) truncation coherence on formal (jet) inputs
  bool equivariant = true;     // (2) linear changes of coordinates
  bool vectorFields = true;    // (3) vanishing on vector fields, arity >= 2
  bool linearVectorField = true;  // (4) vanishing with a linear vector field argument
  std::vector<int> aritiesChecked;
  std::string detail;

  bool all() const { return formal && equivariant && vectorFields && linearVectorField; }
  /// 1-based index of the first failing condition, 0 if none.
  int first_failure() const;
};

/// Randomized check of the four conditions on every component of gamma whose arity is at
/// most arityCap + d (the components a globalized morphism of arity <= arityCap can reach).
ConditionReport check_conditions(const InvariantGraphSum& gamma, int arityCap, int d, std::uint64_t seed = 1,
                                 int trials = 3);

}  // namespace tpoly
