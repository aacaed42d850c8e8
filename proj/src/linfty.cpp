#include "tpoly/linfty.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "tpoly/random.hpp"
#include "tpoly/schouten.hpp"

namespace tpoly {

namespace {

GradedElement zero_like(const Args& args) {
  if (args.empty()) throw std::invalid_argument("cochain evaluated on no arguments");
  TruncationPolicy p = args.front().policy();
  for (const auto& a : args) p = TruncationPolicy::meet(p, a.policy());
  return GradedElement(args.front().dim(), p);
}

int parity_of(const GradedElement& a) {
  if (a.is_zero()) return 0;
  auto d = a.degree();
  if (!d) throw std::invalid_argument("Koszul sign needs homogeneous arguments");
  return *d & 1;
}

// Calls fn on every tuple of homogeneous parts; the results add up by multilinearity.
GradedElement split_homogeneous(const Args& args, const std::function<GradedElement(const Args&)>& fn) {
  std::vector<std::vector<GradedElement>> parts;
  bool homogeneous = true;
  for (const auto& a : args) {
    auto p = a.homogeneous_parts();
    if (p.size() > 1) homogeneous = false;
    if (p.empty()) p.push_back(a);
    parts.push_back(std::move(p));
  }
  if (homogeneous) return fn(args);
  GradedElement out = zero_like(args);
  std::vector<std::size_t> pick(args.size(), 0);
  while (true) {
    Args h;
    for (std::size_t s = 0; s < args.size(); ++s) h.push_back(parts[s][pick[s]]);
    out += fn(h);
    int s = static_cast<int>(args.size()) - 1;
    while (s >= 0 && ++pick[s] == parts[s].size()) pick[s--] = 0;
    if (s < 0) break;
  }
  return out;
}

Args pick_args(const Args& args, const std::vector<int>& idx) {
  Args out;
  for (int i : idx) out.push_back(args[i]);
  return out;
}

Rational factorial(int n) {
  Rational r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

InvariantGraphSum restrict_arity(const InvariantGraphSum& g, int lo, int hi) {
  GraphSum kept;
  for (const auto& [h, c] : g.representatives().terms()) {
    if (h.vertices() >= lo && h.vertices() <= hi) kept.add(h, c);
  }
  return symmetrize(kept);
}

}  // namespace

int koszul_sign(const Args& args, const std::vector<int>& perm) {
  int parity = 0;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    for (std::size_t l = k + 1; l < perm.size(); ++l) {
      if (perm[k] > perm[l]) parity += parity_of(args[perm[k]]) * parity_of(args[perm[l]]);
    }
  }
  return parity & 1 ? -1 : 1;
}

Cochain insert(const Cochain& p, const Cochain& q) {
  Cochain out;
  out.arity = p.arity + q.arity - 1;
  out.parity = (p.parity + q.parity) & 1;
  out.eval = [p, q](const Args& all) {
    return split_homogeneous(all, [&](const Args& args) {
      const int n = static_cast<int>(args.size());
      GradedElement acc = zero_like(args);
      std::vector<bool> mask(n, false);
      std::fill(mask.begin(), mask.begin() + q.arity, true);
      do {
        std::vector<int> in;
        std::vector<int> rest;
        for (int i = 0; i < n; ++i) (mask[i] ? in : rest).push_back(i);
        std::vector<int> perm = in;
        perm.insert(perm.end(), rest.begin(), rest.end());
        Args outer{q(pick_args(args, in))};
        for (int i : rest) outer.push_back(args[i]);
        GradedElement v = p(outer);
        if (koszul_sign(args, perm) < 0) v = -v;
        acc += v;
      } while (std::prev_permutation(mask.begin(), mask.end()));
      return acc;
    });
  };
  return out;
}

Cochain scaled(const Cochain& p, const Rational& c) {
  Cochain out = p;
  out.eval = [p, c](const Args& a) { return c * p(a); };
  return out;
}

Cochain sum(const Cochain& p, const Cochain& q) {
  if (p.arity != q.arity) throw std::invalid_argument("sum of cochains of different arity");
  Cochain out = p;
  out.eval = [p, q](const Args& a) { return p(a) + q(a); };
  return out;
}

Cochain nr_bracket(const Cochain& p, const Cochain& q) {
  const int s = (p.parity * q.parity) & 1 ? 1 : -1;
  return sum(insert(p, q), scaled(insert(q, p), s));
}

// ------------------------------------------------------------------ graph cochains

CECochain CECochain::schouten(int arityCap, Variables vars) { return {mc_element(), arityCap, vars}; }

std::vector<int> CECochain::arities() const {
  std::vector<int> out;
  for (const auto& [g, c] : graphs.representatives().terms()) out.push_back(g.vertices());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Cochain CECochain::component(int n) const {
  InvariantGraphSum part = restrict_arity(graphs, n, n);
  int parity = 0;
  if (auto d = part.degree()) parity = *d & 1;
  Variables v = vars;
  return {n, parity, [part, v](const Args& a) { return evaluate_cochain(part, a, v); }};
}

CECochain nr_bracket(const CECochain& a, const CECochain& b) {
  const int cap = std::min(a.arityCap, b.arityCap);
  return {restrict_arity(lie_bracket(a.graphs, b.graphs), 1, cap), cap, a.vars};
}

bool is_lie_structure(const CECochain& pi) { return nr_bracket(pi, pi).graphs.is_zero(); }

CECochain ce_differential(const CECochain& pi, const CECochain& a) {
  if (!is_lie_structure(pi)) {
    throw std::invalid_argument("ce_differential: [pi,pi] does not vanish up to arity " +
                                std::to_string(pi.arityCap));
  }
  return nr_bracket(pi, a);
}

// ------------------------------------------------------------------ morphisms

GraphMorphism::GraphMorphism(std::map<int, InvariantGraphSum> components, int arityCap, Variables vars)
    : arityCap_(arityCap), vars_(vars) {
  for (auto& [n, g] : components) {
    if (n >= 1 && n <= arityCap && !g.is_zero()) components_.emplace(n, std::move(g));
  }
}

std::shared_ptr<GraphMorphism> GraphMorphism::identity(int arityCap, Variables vars) {
  return std::make_shared<GraphMorphism>(std::map<int, InvariantGraphSum>{{1, symmetrize(Graph::unit())}}, arityCap,
                                         vars);
}

GradedElement GraphMorphism::component(const Args& args) const {
  auto it = components_.find(static_cast<int>(args.size()));
  if (it == components_.end()) return zero_like(args);
  return evaluate_cochain(it->second, args, vars_);
}

std::optional<int> GraphMorphism::max_arity() const {
  return components_.empty() ? 0 : components_.rbegin()->first;
}

std::string GraphMorphism::describe() const {
  std::ostringstream os;
  os << "graph morphism, arity cap " << arityCap_ << ", components";
  for (const auto& [n, g] : components_) os << " F" << n << "(" << g.representatives().size() << " graphs)";
  return os.str();
}

std::shared_ptr<GraphMorphism> GraphMorphism::with_variables(Variables vars) const {
  return std::make_shared<GraphMorphism>(components_, arityCap_, vars);
}

std::shared_ptr<GraphMorphism> GraphMorphism::truncated_arity(int cap) const {
  return std::make_shared<GraphMorphism>(components_, std::min(cap, arityCap_), vars_);
}

std::string GraphMorphism::serialize() const {
  std::ostringstream os;
  for (const auto& [n, g] : components_) {
    for (const auto& [h, c] : g.representatives().terms()) {
      os << "F " << n << " : " << format_rational(c) << " * " << h.to_string() << "\n";
    }
  }
  return os.str();
}

std::shared_ptr<GraphMorphism> parse_morphism(const std::string& text, int arityCap) {
  std::map<int, InvariantGraphSum> explicitParts;
  InvariantGraphSum gamma;
  int order = 1 << 20;
  bool hasExp = false;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  // "<coef> * <graph>" -> coef * [graph]
  auto term = [&](const std::string& s, int column) {
    const auto star = s.find('*');
    if (star == std::string::npos) throw ParseError("expected '<coef> * <graph>'", lineNo, column);
    Rational c;
    try {
      c = parse_rational(trim(s.substr(0, star)));
    } catch (const std::exception&) {
      throw ParseError("bad coefficient '" + trim(s.substr(0, star)) + "'", lineNo, column);
    }
    const SignedGraph g = parse_graph(trim(s.substr(star + 1)), lineNo);
    if (g.sign == 0) return InvariantGraphSum{};
    return symmetrize(g.graph) * (c * g.sign);
  };
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected ':'", lineNo, 1);
    const std::string head = trim(line.substr(0, colon));
    const std::string body = line.substr(colon + 1);
    const int column = static_cast<int>(colon) + 2;
    if (head == "exp") {
      gamma += term(body, column);
      hasExp = true;
    } else if (head == "order") {
      try {
        order = std::stoi(trim(body));
      } catch (const std::exception&) {
        throw ParseError("bad order", lineNo, column);
      }
    } else if (head.size() > 1 && head[0] == 'F') {
      int n = 0;
      try {
        n = std::stoi(head.substr(1));
      } catch (const std::exception&) {
        throw ParseError("bad arity in '" + head + "'", lineNo, 1);
      }
      InvariantGraphSum t = term(body, column);
      for (const auto& [g, c] : t.representatives().terms()) {
        if (g.vertices() != n) throw ParseError("graph arity does not match F " + std::to_string(n), lineNo, column);
      }
      explicitParts[n] += t;
    } else {
      throw ParseError("unknown line kind '" + head + "'", lineNo, 1);
    }
  }
  std::map<int, InvariantGraphSum> parts;
  if (hasExp) parts = exponential(CECochain{gamma, arityCap}, order)->components();
  for (const auto& [n, g] : explicitParts) parts[n] += g;
  return std::make_shared<GraphMorphism>(parts, arityCap);
}

CochainMorphism::CochainMorphism(std::map<int, Cochain> components, int arityCap)
    : components_(std::move(components)), arityCap_(arityCap) {}

GradedElement CochainMorphism::component(const Args& args) const {
  const int n = static_cast<int>(args.size());
  auto it = components_.find(n);
  if (it == components_.end() || n > arityCap_) return zero_like(args);
  return it->second(args);
}

std::optional<int> CochainMorphism::max_arity() const {
  int m = 0;
  for (const auto& [n, c] : components_) {
    if (n <= arityCap_) m = n;
  }
  return m;
}

std::string CochainMorphism::describe() const {
  return "evaluation morphism, arity cap " + std::to_string(arityCap_);
}

std::shared_ptr<GraphMorphism> exponential(const CECochain& gamma, int maxOrder) {
  for (const auto& [g, c] : gamma.graphs.representatives().terms()) {
    if (g.degree() != 0) throw std::invalid_argument("exponential: cochain must have degree 0");
    if (g.vertices() == 1) throw std::invalid_argument("exponential: arity-1 part must vanish");
  }
  const int cap = gamma.arityCap;
  InvariantGraphSum power = symmetrize(Graph::unit());
  std::map<int, InvariantGraphSum> parts;
  for (int k = 0; k <= maxOrder && !power.is_zero(); ++k) {
    for (const auto& [g, c] : power.representatives().terms()) parts[g.vertices()] += symmetrize(g) * c;
    if (k == maxOrder) break;
    GraphSum next;
    for (const auto& [g, c] : power.representatives().terms()) {
      for (const auto& [h, e] : gamma.graphs.representatives().terms()) {
        if (g.vertices() + h.vertices() - 1 <= cap) next += insertion_sum(GraphSum(g, c), GraphSum(h, e));
      }
    }
    power = symmetrize(next) * Rational(1, k + 1);
  }
  return std::make_shared<GraphMorphism>(parts, cap, gamma.vars);
}

std::shared_ptr<CochainMorphism> exponential(const std::map<int, Cochain>& gamma, int arityCap) {
  for (const auto& [n, c] : gamma) {
    if (n < 2) throw std::invalid_argument("exponential: arity-1 part must vanish");
  }
  // powers[n] = (G^(k))_n for the current k.
  std::map<int, Cochain> power{{1, Cochain{1, 0, [](const Args& a) { return a.front(); }}}};
  std::map<int, Cochain> total = power;
  for (int k = 1; !power.empty(); ++k) {
    std::map<int, Cochain> next;
    for (const auto& [n, g] : power) {
      for (const auto& [m, c] : gamma) {
        const int a = n + m - 1;
        if (a > arityCap) continue;
        Cochain t = scaled(insert(g, c), Rational(1, k));
        next[a] = next.count(a) ? sum(next[a], t) : t;
      }
    }
    for (const auto& [n, g] : next) total[n] = total.count(n) ? sum(total[n], g) : g;
    power = std::move(next);
  }
  return std::make_shared<CochainMorphism>(total, arityCap);
}

ComposedMorphism::ComposedMorphism(MorphismPtr outer, MorphismPtr inner, int arityCap)
    : outer_(std::move(outer)), inner_(std::move(inner)), arityCap_(arityCap) {}

GradedElement ComposedMorphism::component(const Args& all) const {
  if (static_cast<int>(all.size()) > arityCap_) return zero_like(all);
  return split_homogeneous(all, [this](const Args& args) {
    const int n = static_cast<int>(args.size());
    GradedElement acc = zero_like(args);
    std::vector<int> block(n, 0);
    // Restricted growth strings enumerate set partitions; blocks come ordered by least element.
    std::function<void(int, int)> rec = [&](int i, int blocks) {
      if (i == n) {
        std::vector<std::vector<int>> bs(blocks);
        for (int k = 0; k < n; ++k) bs[block[k]].push_back(k);
        std::vector<int> perm;
        Args inner;
        for (const auto& b : bs) {
          perm.insert(perm.end(), b.begin(), b.end());
          inner.push_back(inner_->component(pick_args(args, b)));
        }
        GradedElement v = outer_->component(inner);
        if (koszul_sign(args, perm) < 0) v = -v;
        acc += v;
        return;
      }
      for (int b = 0; b <= blocks; ++b) {
        block[i] = b;
        rec(i + 1, std::max(blocks, b + 1));
      }
    };
    rec(0, 0);
    return acc;
  });
}

std::string ComposedMorphism::describe() const {
  return "composite of (" + outer_->describe() + ") after (" + inner_->describe() + ")";
}

// ------------------------------------------------------------------ twisting

std::string TerminationWitness::to_string() const {
  return std::string(kind == Kind::FormDegree ? "form degree" : "arity") + " bound " + std::to_string(bound);
}

TerminationWitness termination_witness(const LInftyMorphism& f, const GradedElement& pi, int n) {
  std::optional<TerminationWitness> best;
  bool positiveForm = true;
  for (const auto& [m, c] : pi.terms()) {
    if (m.eta_degree() == 0) positiveForm = false;
  }
  if (positiveForm) best = TerminationWitness{TerminationWitness::Kind::FormDegree, pi.dim()};
  if (auto m = f.max_arity()) {
    const int b = std::max(0, *m - n);
    if (!best || b < best->bound) best = TerminationWitness{TerminationWitness::Kind::Arity, b};
  }
  if (!best) {
    throw TerminationError(
        "twisting series does not terminate: the MC element has terms of form degree 0 and the morphism has "
        "unbounded arity");
  }
  return *best;
}

GradedElement push_mc(const LInftyMorphism& f, const GradedElement& pi) {
  const auto w = termination_witness(f, pi, 0);
  GradedElement out(pi.dim(), pi.policy());
  for (int i = 1; i <= w.bound; ++i) out += f.component(Args(i, pi)) * (1 / factorial(i));
  return out;
}

TwistedMorphism::TwistedMorphism(MorphismPtr f, GradedElement pi) : f_(std::move(f)), pi_(std::move(pi)) {}

GradedElement TwistedMorphism::component(const Args& args) const {
  const auto w = termination_witness(*f_, pi_, static_cast<int>(args.size()));
  GradedElement out = zero_like(args);
  for (int i = 0; i <= w.bound; ++i) {
    Args full(i, pi_);
    full.insert(full.end(), args.begin(), args.end());
    out += f_->component(full) * (1 / factorial(i));
  }
  return out;
}

std::string TwistedMorphism::describe() const { return "twist of (" + f_->describe() + ")"; }

MorphismPtr twist(MorphismPtr f, const GradedElement& pi) {
  if (pi.is_zero()) return f;
  return std::make_shared<TwistedMorphism>(std::move(f), pi);
}

// ------------------------------------------------------------------ morphism equations

std::pair<GradedElement, GradedElement> morphism_equation(const LInftyMorphism& f, const LInftyStructure& source,
                                                          const LInftyStructure& target, const Args& args) {
  const int n = static_cast<int>(args.size());
  GradedElement lhs = zero_like(args);
  GradedElement rhs = zero_like(args);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  auto rest_without = [&](std::vector<int> taken) {
    std::vector<int> r;
    for (int i : all) {
      if (std::find(taken.begin(), taken.end(), i) == taken.end()) r.push_back(i);
    }
    return r;
  };

  if (source.q1) {
    for (int i = 0; i < n; ++i) {
      auto rest = rest_without({i});
      std::vector<int> perm{i};
      perm.insert(perm.end(), rest.begin(), rest.end());
      Args in{source.q1(args[i])};
      for (int r : rest) in.push_back(args[r]);
      GradedElement v = f.component(in);
      lhs += koszul_sign(args, perm) < 0 ? -v : v;
    }
  }
  if (source.q2) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        auto rest = rest_without({i, j});
        std::vector<int> perm{i, j};
        perm.insert(perm.end(), rest.begin(), rest.end());
        Args in{source.q2(args[i], args[j])};
        for (int r : rest) in.push_back(args[r]);
        GradedElement v = f.component(in);
        lhs += koszul_sign(args, perm) < 0 ? -v : v;
      }
    }
  }
  if (target.q1) rhs += target.q1(f.component(args));
  if (target.q2 && n >= 2) {
    std::map<std::vector<int>, GradedElement> values;
    auto value = [&](const std::vector<int>& idx) -> const GradedElement& {
      auto it = values.find(idx);
      if (it == values.end()) it = values.emplace(idx, f.component(pick_args(args, idx))).first;
      return it->second;
    };
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      std::vector<int> in;
      std::vector<int> out;
      for (int i = 0; i < n; ++i) (mask >> i & 1 ? in : out).push_back(i);
      std::vector<int> perm = in;
      perm.insert(perm.end(), out.begin(), out.end());
      const GradedElement& a = value(in);
      const GradedElement& b = value(out);
      if (a.is_zero() && a.precision().is_exact()) continue;
      if (b.is_zero() && b.precision().is_exact()) continue;
      GradedElement v = target.q2(a, b) * Rational(1, 2);
      rhs += koszul_sign(args, perm) < 0 ? -v : v;
    }
  }
  return {lhs, rhs};
}

MorphismCheck check_morphism(const LInftyMorphism& f, const LInftyStructure& source, const LInftyStructure& target,
                             int arityCap, const std::function<GradedElement(Random&)>& sample, std::uint64_t seed,
                             int trials, int fromArity) {
  MorphismCheck result;
  Random rng(seed);
  for (int n = fromArity; n <= arityCap; ++n) {
    for (int t = 0; t < trials; ++t) {
      Args args;
      for (int s = 0; s < n; ++s) args.push_back(sample(rng));
      auto [lhs, rhs] = morphism_equation(f, source, target, args);
      ++result.equationsChecked;
      if (!equal_mod_truncation(lhs, rhs)) {
        if (result.ok) {
          result.ok = false;
          result.failingArity = n;
          result.detail = "arity " + std::to_string(n) + ": " + serialize(lhs - rhs);
        }
      }
    }
  }
  return result;
}

LInftyStructure schouten_structure() {
  return {{}, [](const GradedElement& a, const GradedElement& b) { return schouten_bracket(a, b); }};
}

GaugeReport gauge_check(const Cochain& pi, const std::map<int, Cochain>& gamma, const Cochain& beta,
                        const std::function<GradedElement(Random&)>& sample, std::uint64_t seed, int trials) {
  if (beta.arity != 1 || beta.parity != 1) throw std::invalid_argument("gauge_check: beta must be arity 1 and odd");
  const Cochain correction = nr_bracket(pi, beta);
  std::map<int, Cochain> shifted = gamma;
  shifted[2] = shifted.count(2) ? sum(shifted[2], correction) : correction;
  const auto f = exponential(gamma, 3);
  const auto g = exponential(shifted, 3);
  const Cochain closed = nr_bracket(pi, correction);

  GaugeReport report;
  Random rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Args x{sample(rng), sample(rng), sample(rng)};
    if (!equal_mod_truncation(f->component({x[0]}), g->component({x[0]}))) report.arityOneAgrees = false;
    const GradedElement diff = g->component({x[0], x[1]}) - f->component({x[0], x[1]});
    const GradedElement expect = correction({x[0], x[1]});
    if (!equal_mod_truncation(diff, expect)) report.arityTwoDifference = false;
    if (!expect.is_zero()) report.nontrivial = true;
    if (!is_zero_mod_truncation(closed(x))) report.correctionClosed = false;
  }
  return report;
}

}  // namespace tpoly
