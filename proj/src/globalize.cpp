#include "tpoly/globalize.hpp"

#include <sstream>

#include "tpoly/random.hpp"
#include "tpoly/schouten.hpp"

namespace tpoly {

InvariantGraphSum higher_components(const GraphMorphism& f) {
  InvariantGraphSum out;
  for (const auto& [n, g] : f.components()) {
    if (n >= 2) out += g;
  }
  return out;
}

ConditionReport condition_gate(const GraphMorphism& f, int arityCap, int d, int upTo) {
  ConditionReport r = check_conditions(higher_components(f), arityCap, d);
  const int bad = r.first_failure();
  if (bad != 0 && bad <= upTo) throw ConditionGateError(bad, r.detail);
  return r;
}

std::shared_ptr<GraphMorphism> extend_vertical(const GraphMorphism& f, int arityCap, int d) {
  condition_gate(f, arityCap, d, 2);
  return f.with_variables(Variables::Fiber);
}

GlobalMorphism::GlobalMorphism(std::shared_ptr<const FedosovData> fd, MorphismPtr twisted, int arityCap)
    : fd_(std::move(fd)), twisted_(std::move(twisted)), arityCap_(arityCap) {}

const GradedElement& GlobalMorphism::lift(const GradedElement& f) const {
  const std::string key = serialize(f);
  auto it = lifts_.find(key);
  if (it == lifts_.end()) it = lifts_.emplace(key, tau(*fd_, f)).first;
  return it->second;
}

GradedElement GlobalMorphism::component(const Args& args) const {
  if (args.empty()) throw std::invalid_argument("F^glob evaluated on no arguments");
  const int d = fd_->jet.dim();
  if (static_cast<int>(args.size()) > arityCap_) return GradedElement(d, fd_->policy);
  Args lifted;
  for (const auto& f : args) {
    if (!is_polyvector(f)) throw std::invalid_argument("F^glob takes polyvector fields (no y, no eta)");
    lifted.push_back(lift(f));
  }
  return sigma(twisted_->component(lifted));
}

std::string GlobalMorphism::describe() const {
  return "global morphism, arity cap " + std::to_string(arityCap_) + ", over " + twisted_->describe();
}

GlobalizeResult globalize(const GraphMorphism& f, const ConnectionJet& cj, TruncationPolicy policy, int arityCap) {
  const int d = cj.dim();
  GlobalizeResult result;
  result.conditions = condition_gate(f, arityCap, d);
  auto fd = std::make_shared<const FedosovData>(solve_A(cj, policy));
  auto fvert = extend_vertical(f, arityCap, d);
  MorphismPtr twisted = twist(fvert, fd->bForm);
  result.morphism = std::make_shared<GlobalMorphism>(fd, twisted, arityCap);

  std::ostringstream os;
  os << "conditions (1)-(4) hold on arities";
  if (result.conditions.aritiesChecked.empty()) os << " (none above 1)";
  for (int n : result.conditions.aritiesChecked) os << " " << n;
  os << "\n";
  os << "Fedosov: |A| = " << fd->aForm.size() << " terms, |B| = " << fd->bForm.size() << " terms, "
     << fd->iterations << " iterations, policy y<=" << policy.yOrder << " x<=" << policy.xOrder << "\n";
  if (!fd->bForm.is_zero()) {
    os << "twist series: " << termination_witness(*fvert, fd->bForm, 1).to_string() << " at arity 1\n";
  }
  const int have = f.max_arity().value_or(0);
  if (have < arityCap + d && f.arity_cap() < arityCap + d) {
    os << "note: F carries arities <= " << f.arity_cap() << "; twist terms need up to " << arityCap + d << "\n";
  }
  result.report = os.str();
  return result;
}

std::function<GradedElement(Random&)> polyvector_sampler(int d, TruncationPolicy policy, int maxXDegree, int terms) {
  return [=](Random& rng) {
    ElementShape shape;
    shape.useY = false;
    shape.useEta = false;
    shape.terms = terms;
    shape.maxCoefficient = 3;
    shape.maxXDegree = maxXDegree;
    shape.oddDegree = rng.uniform(0, d);
    return rng.element(d, policy, shape);
  };
}

bool check_descent(const GlobalMorphism& g, int arityCap, std::uint64_t seed, int trials) {
  Random rng(seed);
  const FedosovData& fd = g.fedosov();
  auto sample = polyvector_sampler(fd.jet.dim(), fd.policy);
  for (int n = 1; n <= arityCap; ++n) {
    for (int t = 0; t < trials; ++t) {
      Args lifted;
      for (int s = 0; s < n; ++s) lifted.push_back(g.lift(sample(rng)));
      if (!is_zero_mod_truncation(differential_D(fd, g.twisted().component(lifted)))) return false;
    }
  }
  return true;
}

InvarianceReport step2_invariance_report(const GraphMorphism& f, const FedosovData& fd, int arityCap,
                                         int perturbations, std::uint64_t seed, bool zeroH) {
  const int d = fd.jet.dim();
  const TruncationPolicy pol = fd.policy;
  auto fvert = f.with_variables(Variables::Fiber);
  const MorphismPtr base = twist(fvert, fd.bForm);
  Random rng(seed);

  ElementShape shape;
  shape.terms = 3;
  shape.maxCoefficient = 3;
  shape.useEta = false;
  shape.maxXDegree = 1;
  shape.maxYDegree = 3;
  shape.minYDegree = 1;

  InvarianceReport report;
  for (int p = 0; p < perturbations; ++p) {
    GradedElement h(d, pol);
    if (!zeroH) {
      for (int i = 1; i <= d; ++i) {
        for (int j = 1; j <= d; ++j) {
          for (int k = 1; k <= d; ++k) {
            Monomial m;
            m.y[j - 1] = 1;
            if (rng.coin()) m.x[rng.uniform(0, d - 1)] = 1;
            m.odd = static_cast<std::uint16_t>((1u << odd_bit(Psi(k))) | (1u << odd_bit(Eta(i))));
            h.add_term(m, rng.rational(2));
          }
        }
      }
    }
    ++report.perturbations;
    const MorphismPtr moved = twist(fvert, fd.bForm + h);
    for (int n = 1; n <= arityCap; ++n) {
      Args x;
      for (int s = 0; s < n; ++s) {
        shape.oddDegree = rng.uniform(0, 9) < 7 ? std::min(2, d) : 1;
        x.push_back(rng.element(d, pol, shape));
      }
      const GradedElement a = base->component(x);
      const GradedElement b = moved->component(x);
      ++report.comparisons;
      if (!a.is_zero()) ++report.nonzeroValues;
      if (!equal_mod_truncation(a, b)) {
        if (report.unchanged) {
          report.detail = "arity " + std::to_string(n) + " changes by " + serialize(b - a);
        }
        report.unchanged = false;
      }
    }
  }
  return report;
}

}  // namespace tpoly
