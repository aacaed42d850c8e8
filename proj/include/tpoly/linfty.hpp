#pragma once

// Finite-arity L-infinity machinery on shifted polyvector fields (and vertical forms):
// symmetric cochains, the Nijenhuis-Richardson bracket, exponentials, Maurer-Cartan twisting.
//
// Shifted degrees: V = T_poly[2], so the Koszul parity of an element is its odd degree.
// Structure maps Q1 (differential) and Q2 (bracket) have degree 1, morphism components degree 0.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpoly/gra_action.hpp"
#include "tpoly/graded.hpp"
#include "tpoly/graph.hpp"

namespace tpoly {

class Random;

class TerminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Args = std::vector<GradedElement>;

/// A graded symmetric n-ary map given by evaluation.
struct Cochain {
  int arity = 1;
  int parity = 0;
  std::function<GradedElement(const Args&)> eval;

  GradedElement operator()(const Args& a) const { return eval(a); }
};

/// Koszul sign (+1/-1) of listing args in the order `perm` (perm[k] = original index).
int koszul_sign(const Args& args, const std::vector<int>& perm);

/// (p o q)(a_1..a_{p+q-1}) = sum over (q, p-1)-unshuffles of eps * p(q(a_I), a_J).
Cochain insert(const Cochain& p, const Cochain& q);
/// [p,q] = p o q - (-1)^{|p||q|} q o p
Cochain nr_bracket(const Cochain& p, const Cochain& q);
Cochain scaled(const Cochain& p, const Rational& c);
Cochain sum(const Cochain& p, const Cochain& q);

/// Chevalley-Eilenberg cochain backed by graphs: each arity-n component is the evaluation of
/// the arity-n part of an invariant graph sum (see evaluate_cochain).
struct CECochain {
  InvariantGraphSum graphs;
  int arityCap = 2;
  Variables vars = Variables::Base;

  static CECochain schouten(int arityCap, Variables vars = Variables::Base);

  /// Arities present, ascending.
  std::vector<int> arities() const;
  Cochain component(int n) const;
  GradedElement operator()(const Args& a) const { return evaluate_cochain(graphs, a, vars); }
};

/// Graph-side NR bracket, truncated at the smaller arityCap.
CECochain nr_bracket(const CECochain& a, const CECochain& b);
/// True if [pi,pi] vanishes up to pi.arityCap.
bool is_lie_structure(const CECochain& pi);
/// d_pi(a) = [pi, a]; throws std::invalid_argument if pi is not a Lie structure.
CECochain ce_differential(const CECochain& pi, const CECochain& a);

/// Taylor components F_1, F_2, ... evaluated on shifted elements.
class LInftyMorphism {
 public:
  virtual ~LInftyMorphism() = default;
  /// F_n(args), n = args.size() >= 1.
  virtual GradedElement component(const Args& args) const = 0;
  /// Components above this arity vanish; nullopt if unknown.
  virtual std::optional<int> max_arity() const = 0;
  virtual std::string describe() const = 0;
};

using MorphismPtr = std::shared_ptr<const LInftyMorphism>;

/// F_n = sum of graph operators per arity; the unit graph at arity 1 gives the identity.
class GraphMorphism : public LInftyMorphism {
 public:
  GraphMorphism(std::map<int, InvariantGraphSum> components, int arityCap, Variables vars = Variables::Base);
  static std::shared_ptr<GraphMorphism> identity(int arityCap, Variables vars = Variables::Base);

  GradedElement component(const Args& args) const override;
  std::optional<int> max_arity() const override;
  std::string describe() const override;

  const std::map<int, InvariantGraphSum>& components() const { return components_; }
  int arity_cap() const { return arityCap_; }
  Variables variables() const { return vars_; }
  /// Same graphs acting on other variables (Base -> Fiber is the vertical extension).
  std::shared_ptr<GraphMorphism> with_variables(Variables vars) const;
  /// Components of arity <= cap.
  std::shared_ptr<GraphMorphism> truncated_arity(int cap) const;

  /// Lines `F <n> : <coef> * <graph>`.
  std::string serialize() const;

 private:
  std::map<int, InvariantGraphSum> components_;
  int arityCap_;
  Variables vars_;
};

/// Parses morphism files: lines `F <n> : <coef> * <graph>` add a component term, and
/// `exp: <coef> * <graph>` adds a term to a degree-0 cochain that is exponentiated.
/// `order: <k>` truncates the exponential at k-th powers. Blank lines and `#` comments skip.
std::shared_ptr<GraphMorphism> parse_morphism(const std::string& text, int arityCap);

/// Componentwise evaluation-based morphism.
class CochainMorphism : public LInftyMorphism {
 public:
  CochainMorphism(std::map<int, Cochain> components, int arityCap);
  GradedElement component(const Args& args) const override;
  std::optional<int> max_arity() const override;
  std::string describe() const override;

 private:
  std::map<int, Cochain> components_;
  int arityCap_;
};

/// exp(gamma) for a graph cochain of degree 0 without arity-1 part: G^(0) = id,
/// G^(k) = G^(k-1) o gamma, F = sum G^(k)/k! up to arityCap; maxOrder bounds k.
std::shared_ptr<GraphMorphism> exponential(const CECochain& gamma, int maxOrder = 1 << 20);
/// Evaluation-based exponential of a cochain series (arity -> component) with gamma_1 = 0.
std::shared_ptr<CochainMorphism> exponential(const std::map<int, Cochain>& gamma, int arityCap);

/// (F o G)_n = sum over set partitions {B_1..B_k} of F_k(G(a_B1), ..., G(a_Bk)).
class ComposedMorphism : public LInftyMorphism {
 public:
  ComposedMorphism(MorphismPtr outer, MorphismPtr inner, int arityCap);
  GradedElement component(const Args& args) const override;
  std::optional<int> max_arity() const override { return arityCap_; }
  std::string describe() const override;

 private:
  MorphismPtr outer_;
  MorphismPtr inner_;
  int arityCap_;
};

/// How a twisting series is cut off.
struct TerminationWitness {
  enum class Kind { FormDegree, Arity } kind;
  int bound;  // largest number of inserted MC elements that can contribute
  std::string to_string() const;
};

/// Finds a witness that sum_i F_{n+i}(pi^i, ...) is finite: every term of pi has positive form
/// degree (bounded by d), or F has finitely many components. Throws TerminationError otherwise.
TerminationWitness termination_witness(const LInftyMorphism& f, const GradedElement& pi, int n);

/// pi' = sum_{i>=1} 1/i! F_i(pi, ..., pi).
GradedElement push_mc(const LInftyMorphism& f, const GradedElement& pi);

/// (F_pi)_n(x) = sum_i 1/i! F_{n+i}(pi^i, x).
class TwistedMorphism : public LInftyMorphism {
 public:
  TwistedMorphism(MorphismPtr f, GradedElement pi);
  GradedElement component(const Args& args) const override;
  std::optional<int> max_arity() const override { return f_->max_arity(); }
  std::string describe() const override;
  const GradedElement& mc() const { return pi_; }

 private:
  MorphismPtr f_;
  GradedElement pi_;
};

MorphismPtr twist(MorphismPtr f, const GradedElement& pi);

/// Q1 may be empty (zero differential).
struct LInftyStructure {
  std::function<GradedElement(const GradedElement&)> q1;
  std::function<GradedElement(const GradedElement&, const GradedElement&)> q2;
};

struct MorphismCheck {
  bool ok = true;
  int failingArity = 0;
  int equationsChecked = 0;
  std::string detail;
};

/// Left and right sides of the arity-n morphism equation on the given inputs:
///   sum eps F(Q1 a_i, rest) + sum eps F(Q2(a_i,a_j), rest) == Q1 F_n(a) + 1/2 sum eps Q2(F(a_I), F(a_J)).
std::pair<GradedElement, GradedElement> morphism_equation(const LInftyMorphism& f, const LInftyStructure& source,
                                                          const LInftyStructure& target, const Args& args);

/// Checks the equations for arities fromArity..arityCap on `trials` random input tuples.
MorphismCheck check_morphism(const LInftyMorphism& f, const LInftyStructure& source, const LInftyStructure& target,
                             int arityCap, const std::function<GradedElement(Random&)>& sample, std::uint64_t seed = 1,
                             int trials = 3, int fromArity = 1);

LInftyStructure schouten_structure();

struct GaugeReport {
  bool arityOneAgrees = true;     // exp(gamma)_1 == exp(gamma')_1
  bool arityTwoDifference = true;  // exp(gamma')_2 - exp(gamma)_2 == (d_pi beta)_2
  bool correctionClosed = true;    // d_pi of the correction vanishes at arity 3
  bool nontrivial = false;         // the correction was nonzero on some input
  bool ok() const { return arityOneAgrees && arityTwoDifference && correctionClosed && nontrivial; }
};

/// Lowest-order gauge check: gamma' = gamma + d_pi(beta) for an arity-1 cochain beta of odd
/// degree; compares exp(gamma) and exp(gamma') at arities 1 and 2.
GaugeReport gauge_check(const Cochain& pi, const std::map<int, Cochain>& gamma, const Cochain& beta,
                        const std::function<GradedElement(Random&)>& sample, std::uint64_t seed = 1, int trials = 5);

}  // namespace tpoly
