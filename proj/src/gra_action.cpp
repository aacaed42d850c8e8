#include "tpoly/gra_action.hpp"

#include <bit>
#include <functional>
#include <map>
#include <stdexcept>

#include "tpoly/random.hpp"
#include "tpoly/schouten.hpp"

namespace tpoly {

namespace {

int common_dim(const std::vector<GradedElement>& args) {
  if (args.empty()) throw std::invalid_argument("graph evaluation needs at least one argument");
  int d = args.front().dim();
  for (const auto& a : args) {
    if (a.dim() != d) throw std::invalid_argument("arguments of different dimension");
  }
  return d;
}

TruncationPolicy common_policy(const std::vector<GradedElement>& args) {
  TruncationPolicy p = args.front().policy();
  for (const auto& a : args) p = TruncationPolicy::meet(p, a.policy());
  return p;
}

void check_arity(const Graph& g, const std::vector<GradedElement>& args) {
  if (static_cast<int>(args.size()) != g.vertices()) {
    throw std::invalid_argument("graph with " + std::to_string(g.vertices()) + " vertices applied to " +
                                std::to_string(args.size()) + " arguments");
  }
}

using Tensor = std::map<std::vector<Monomial>, Rational>;

int parity_before(const std::vector<Monomial>& slots, int s) {
  int p = 0;
  for (int l = 0; l < s; ++l) p += slots[l].odd_degree();
  return p & 1;
}

// d/dpsi_k on slot s of a tensor monomial; returns 0 if it vanishes.
int apply_psi(std::vector<Monomial>& slots, int s, int k) {
  const int bit = k - 1;
  Monomial& m = slots[s];
  if (!(m.odd >> bit & 1)) return 0;
  int sign = parity_before(slots, s) ? -1 : 1;
  if (std::popcount(static_cast<unsigned>(m.odd & ((1u << bit) - 1))) & 1) sign = -sign;
  m.odd = static_cast<std::uint16_t>(m.odd & ~(1u << bit));
  return sign;
}

int apply_even(std::vector<Monomial>& slots, int s, int k, Variables vars) {
  auto& e = vars == Variables::Base ? slots[s].x[k - 1] : slots[s].y[k - 1];
  if (e == 0) return 0;
  const int f = e;
  --e;
  return f;
}

}  // namespace

GradedElement phi(const Graph& g, const std::vector<GradedElement>& args, Variables vars) {
  check_arity(g, args);
  const int d = common_dim(args);
  for (const auto& a : args) {
    if (!a.precision().is_exact()) throw std::invalid_argument("phi: reference evaluation needs exact inputs");
  }
  const int n = g.vertices();

  Tensor state;
  state[{}] = 1;
  for (int s = 0; s < n; ++s) {
    Tensor next;
    for (const auto& [slots, c] : state) {
      for (const auto& [m, a] : args[s].terms()) {
        auto ext = slots;
        ext.push_back(m);
        next[ext] += c * a;
      }
    }
    state = std::move(next);
  }

  const auto& edges = g.edges();
  for (auto e = edges.rbegin(); e != edges.rend(); ++e) {
    const int a = e->first;
    const int b = e->second;
    Tensor next;
    for (const auto& [slots, c] : state) {
      for (int k = 1; k <= d; ++k) {
        for (int orient = 0; orient < 2; ++orient) {
          const int ps = orient == 0 ? a : b;
          const int xs = orient == 0 ? b : a;
          auto t = slots;
          const int s1 = apply_psi(t, ps, k);
          if (s1 == 0) continue;
          const int s2 = apply_even(t, xs, k, vars);
          if (s2 == 0) continue;
          next[t] += c * s1 * s2;
        }
      }
    }
    std::erase_if(next, [](const auto& kv) { return sgn(kv.second) == 0; });
    state = std::move(next);
  }

  GradedElement out(d, common_policy(args));
  for (const auto& [slots, c] : state) {
    Monomial acc = slots.front();
    int sign = 1;
    bool zero = false;
    for (int s = 1; s < n && !zero; ++s) {
      const int ps = odd_product_sign(acc.odd, slots[s].odd);
      if (ps == 0) {
        zero = true;
        break;
      }
      sign *= ps;
      for (int i = 0; i < kMaxDim; ++i) {
        acc.x[i] = static_cast<std::uint8_t>(acc.x[i] + slots[s].x[i]);
        acc.y[i] = static_cast<std::uint8_t>(acc.y[i] + slots[s].y[i]);
      }
      acc.odd |= slots[s].odd;
    }
    if (!zero) out.add_term(acc, c * sign);
  }
  return out;
}

GradedElement phi(const GraphSum& g, const std::vector<GradedElement>& args, Variables vars) {
  GradedElement out(common_dim(args), common_policy(args));
  for (const auto& [h, c] : g.terms()) out += c * phi(h, args, vars);
  return out;
}

namespace {

struct SlotInfo {
  GradedElement part;
  int degree = 0;
  bool exact = true;
  bool vectorField = false;
  std::uint16_t psiMask = 0;
  std::array<int, kMaxDim> maxEven{};
};

SlotInfo describe(const GradedElement& part, Variables vars) {
  SlotInfo s;
  s.part = part;
  s.degree = part.degree().value_or(0);
  s.exact = part.precision().is_exact();
  s.vectorField = !part.is_zero();
  for (const auto& [m, c] : part.terms()) {
    s.psiMask |= static_cast<std::uint16_t>(m.odd & 0xff);
    if (m.psi_degree() != 1) s.vectorField = false;
    for (int i = 0; i < kMaxDim; ++i) {
      s.maxEven[i] = std::max<int>(s.maxEven[i], vars == Variables::Base ? m.x[i] : m.y[i]);
    }
  }
  return s;
}

class DirectedExpansion {
 public:
  DirectedExpansion(const Graph& g, std::vector<SlotInfo> slots, int dim, Variables vars)
      : g_(g), slots_(std::move(slots)), dim_(dim), vars_(vars), n_(g.vertices()) {
    psiOps_.resize(n_);
    evenOps_.assign(n_, std::array<int, kMaxDim>{});
  }

  void run(GradedElement& out) {
    out_ = &out;
    recurse(0, 0);
  }

 private:
  bool viable(int s) const {
    const auto& info = slots_[s];
    if (!info.exact) return true;
    std::uint16_t used = 0;
    for (int k : psiOps_[s]) {
      const std::uint16_t bit = static_cast<std::uint16_t>(1u << (k - 1));
      if (used & bit || !(info.psiMask & bit)) return false;
      used |= bit;
    }
    for (int i = 0; i < dim_; ++i) {
      if (evenOps_[s][i] > info.maxEven[i]) return false;
    }
    return true;
  }

  void recurse(std::size_t e, int inversions) {
    if (e == g_.edges().size()) {
      leaf(inversions);
      return;
    }
    const int a = g_.edges()[e].first;
    const int b = g_.edges()[e].second;
    for (int k = 1; k <= dim_; ++k) {
      for (int orient = 0; orient < 2; ++orient) {
        const int ps = orient == 0 ? a : b;
        const int xs = orient == 0 ? b : a;
        // Sorting the word of psi-derivatives by slot: count earlier ops on later slots.
        int inv = 0;
        for (int s = ps + 1; s < n_; ++s) inv += static_cast<int>(psiOps_[s].size());
        psiOps_[ps].push_back(k);
        ++evenOps_[xs][k - 1];
        if (viable(ps) && viable(xs)) recurse(e + 1, inversions + inv);
        --evenOps_[xs][k - 1];
        psiOps_[ps].pop_back();
      }
    }
  }

  const GradedElement& derived(int s) {
    auto key = std::make_tuple(s, psiOps_[s], evenOps_[s]);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    GradedElement r = slots_[s].part;
    for (auto k = psiOps_[s].rbegin(); k != psiOps_[s].rend(); ++k) r = derive(Psi(*k), r);
    for (int i = 0; i < dim_; ++i) {
      for (int c = 0; c < evenOps_[s][i]; ++c) r = derive(vars_ == Variables::Base ? X(i + 1) : Y(i + 1), r);
    }
    if (slots_[s].vectorField && psiOps_[s].size() >= 2 && !r.is_zero()) {
      throw std::logic_error("vector field differentiated twice in psi survived");
    }
    return cache_.emplace(key, std::move(r)).first->second;
  }

  void leaf(int inversions) {
    int parity = inversions;
    int before = 0;
    for (int s = 0; s < n_; ++s) {
      parity += static_cast<int>(psiOps_[s].size()) * before;
      before += slots_[s].degree;
    }
    GradedElement prod = derived(0);
    if (prod.is_zero() && prod.precision().is_exact()) return;
    for (int s = 1; s < n_; ++s) {
      const GradedElement& f = derived(s);
      if (f.is_zero() && f.precision().is_exact()) return;
      prod = multiply(prod, f);
      if (prod.is_zero() && prod.precision().is_exact()) return;
    }
    if (parity & 1) prod = -prod;
    *out_ += prod;
  }

  const Graph& g_;
  std::vector<SlotInfo> slots_;
  int dim_;
  Variables vars_;
  int n_;
  std::vector<std::vector<int>> psiOps_;
  std::vector<std::array<int, kMaxDim>> evenOps_;
  std::map<std::tuple<int, std::vector<int>, std::array<int, kMaxDim>>, GradedElement> cache_;
  GradedElement* out_ = nullptr;
};

}  // namespace

GradedElement phi_directed_expansion(const Graph& g, const std::vector<GradedElement>& args, Variables vars) {
  check_arity(g, args);
  const int d = common_dim(args);
  const int n = g.vertices();
  GradedElement out(d, common_policy(args));

  std::vector<std::vector<GradedElement>> parts(n);
  for (int s = 0; s < n; ++s) {
    parts[s] = args[s].homogeneous_parts();
    if (parts[s].empty()) {
      if (args[s].precision().is_exact()) return out;
      parts[s].push_back(args[s]);
    }
  }
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    std::vector<SlotInfo> slots;
    for (int s = 0; s < n; ++s) slots.push_back(describe(parts[s][pick[s]], vars));
    DirectedExpansion(g, std::move(slots), d, vars).run(out);
    int s = n - 1;
    while (s >= 0 && ++pick[s] == parts[s].size()) pick[s--] = 0;
    if (s < 0) break;
  }
  return out;
}

GradedElement phi_directed_expansion(const GraphSum& g, const std::vector<GradedElement>& args, Variables vars) {
  GradedElement out(common_dim(args), common_policy(args));
  for (const auto& [h, c] : g.terms()) out += c * phi_directed_expansion(h, args, vars);
  return out;
}

bool operad_morphism_check(const Graph& g1, int i, const Graph& g2, const std::vector<GradedElement>& args) {
  const int n2 = g2.vertices();
  if (static_cast<int>(args.size()) != g1.vertices() + n2 - 1) {
    throw std::invalid_argument("operad_morphism_check: wrong number of arguments");
  }
  const GradedElement lhs = phi_directed_expansion(compose(g1, i, g2), args);

  std::vector<GradedElement> inner(args.begin() + (i - 1), args.begin() + (i - 1 + n2));
  std::vector<GradedElement> outer(args.begin(), args.begin() + (i - 1));
  outer.push_back(phi_directed_expansion(g2, inner));
  outer.insert(outer.end(), args.begin() + (i - 1 + n2), args.end());
  int before = 0;
  for (int l = 0; l < i - 1; ++l) {
    auto deg = args[l].degree();
    if (!deg && !args[l].is_zero()) throw std::invalid_argument("operad_morphism_check: inhomogeneous argument");
    before += deg.value_or(0);
  }
  GradedElement rhs = phi_directed_expansion(g1, outer);
  if ((g2.edge_count() * before) & 1) rhs = -rhs;
  return equal_mod_truncation(lhs, rhs);
}

Rational cochain_scale(int n) {
  Rational r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  for (int k = 1; k < n; ++k) r /= 2;
  return r;
}

GradedElement evaluate_cochain(const InvariantGraphSum& gamma, const std::vector<GradedElement>& args,
                               Variables vars) {
  const int n = static_cast<int>(args.size());
  GraphSum labeled;
  const GraphSum all = gamma.expand();
  for (const auto& [g, c] : all.terms()) {
    if (g.vertices() == n) labeled.add(g, c);
  }
  return cochain_scale(n) * phi_directed_expansion(labeled, args, vars);
}

int ConditionReport::first_failure() const {
  if (!formal) return 1;
  if (!equivariant) return 2;
  if (!vectorFields) return 3;
  if (!linearVectorField) return 4;
  return 0;
}

ConditionReport check_conditions(const InvariantGraphSum& gamma, int arityCap, int d, std::uint64_t seed,
                                 int trials) {
  ConditionReport report;
  std::map<int, InvariantGraphSum> byArity;
  for (const auto& [g, c] : gamma.representatives().terms()) {
    const int n = g.vertices();
    if (n < 2 || n > arityCap + d) continue;
    InvariantGraphSum piece = symmetrize(g);
    byArity[n] += piece * c;
  }

  Random rng(seed);
  const TruncationPolicy full{0, 8};
  const TruncationPolicy cut{0, 3};
  auto polyvector = [&](std::optional<int> degree) {
    ElementShape shape;
    shape.useY = false;
    shape.useEta = false;
    shape.terms = 3;
    shape.maxCoefficient = 3;
    shape.maxXDegree = 3;
    shape.oddDegree = degree;
    return rng.element(d, full, shape);
  };
  auto note = [&report](const std::string& what, int n) {
    if (report.detail.empty()) report.detail = what + " fails at arity " + std::to_string(n);
  };

  for (const auto& [n, piece] : byArity) {
    report.aritiesChecked.push_back(n);
    for (int t = 0; t < trials; ++t) {
      std::vector<GradedElement> args;
      for (int s = 0; s < n; ++s) args.push_back(polyvector(rng.uniform(0, d)));
      const GradedElement value = evaluate_cochain(piece, args);

      std::vector<GradedElement> cutArgs;
      for (const auto& a : args) cutArgs.push_back(a.truncated(cut));
      if (!equal_mod_truncation(evaluate_cochain(piece, cutArgs), value)) {
        report.formal = false;
        note("truncation coherence", n);
      }

      const RationalMatrix m = rng.invertible_matrix(d);
      std::vector<GradedElement> moved;
      for (const auto& a : args) moved.push_back(substitute_linear(a, m));
      if (!equal_mod_truncation(evaluate_cochain(piece, moved), substitute_linear(value, m))) {
        report.equivariant = false;
        note("equivariance", n);
      }

      std::vector<GradedElement> fields;
      for (int s = 0; s < n; ++s) fields.push_back(polyvector(1));
      if (!is_zero_mod_truncation(evaluate_cochain(piece, fields))) {
        report.vectorFields = false;
        note("vanishing on vector fields", n);
      }

      GradedElement linear(d, full);
      for (int i = 1; i <= d; ++i) {
        for (int j = 1; j <= d; ++j) {
          Monomial mono;
          mono.x[j - 1] = 1;
          mono.odd = static_cast<std::uint16_t>(1u << odd_bit(Psi(i)));
          linear.add_term(mono, rng.rational(3));
        }
      }
      std::vector<GradedElement> withLinear = args;
      withLinear[0] = linear;
      if (!is_zero_mod_truncation(evaluate_cochain(piece, withLinear))) {
        report.linearVectorField = false;
        note("vanishing on a linear vector field", n);
      }
    }
  }
  return report;
}

}  // namespace tpoly
