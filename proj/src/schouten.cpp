#include "tpoly/schouten.hpp"

#include <bit>
#include <unordered_map>

namespace tpoly {

namespace {

struct Derived {
  Monomial m;
  Rational c;
  int degree;  // odd degree of the original term
};

// Precision of one of the two products in the bracket formula, conservatively: the error
// sets of the factors shifted by the derivative, combined as in a product.
Precision product_precision(const GradedElement& a, const GradedElement& b, int dy, int dx) {
  if (a.precision().is_exact() && b.precision().is_exact()) return {};
  auto sa = a.minimal_support();
  for (auto& p : sa) p = {std::max(p.y + dy, 0), std::max(p.x + dx, 0)};
  return Precision::product(a.precision().shifted(dy, dx), sa, b.precision(), b.minimal_support());
}

// Sum over i of s(a,b) * d_{v^i} a * d_{psi_i} b for all term pairs, with s depending on the
// odd degrees of the two original terms.
template <class Sign>
void accumulate(GenKind even, const GradedElement& f, const GradedElement& g, Sign sign,
                std::unordered_map<Monomial, Rational, MonomialHash>& acc, Precision& dropped,
                const TruncationPolicy& pol) {
  const int d = f.dim();
  const bool isX = even == GenKind::X;
  for (int i = 0; i < d; ++i) {
    std::map<DegreePair, std::vector<Derived>> left;
    for (const auto& [m, c] : f.terms()) {
      const int e = isX ? m.x[i] : m.y[i];
      if (e == 0) continue;
      Derived t{m, c * e, m.odd_degree()};
      (isX ? t.m.x[i] : t.m.y[i])--;
      left[{t.m.y_degree(), t.m.x_degree()}].push_back(std::move(t));
    }
    if (left.empty()) continue;
    const std::uint16_t mask = static_cast<std::uint16_t>(1u << i);
    std::map<DegreePair, std::vector<Derived>> right;
    for (const auto& [m, c] : g.terms()) {
      if (!(m.odd & mask)) continue;
      Derived t{m, c, m.odd_degree()};
      t.m.odd = static_cast<std::uint16_t>(m.odd & ~mask);
      if (std::popcount(static_cast<unsigned>(m.odd & (mask - 1))) & 1) t.c = -t.c;
      right[{t.m.y_degree(), t.m.x_degree()}].push_back(std::move(t));
    }
    Rational prod;
    for (const auto& [da, as] : left) {
      for (const auto& [db, bs] : right) {
        if (da.y + db.y > pol.yOrder || da.x + db.x > pol.xOrder) {
          dropped.add_corner({da.y + db.y, da.x + db.x});
          continue;
        }
        for (const auto& ta : as) {
          for (const auto& tb : bs) {
            const int s = odd_product_sign(ta.m.odd, tb.m.odd);
            if (s == 0) continue;
            Monomial m;
            for (int k = 0; k < kMaxDim; ++k) {
              m.x[k] = static_cast<std::uint8_t>(ta.m.x[k] + tb.m.x[k]);
              m.y[k] = static_cast<std::uint8_t>(ta.m.y[k] + tb.m.y[k]);
            }
            m.odd = static_cast<std::uint16_t>(ta.m.odd | tb.m.odd);
            mpq_mul(prod.get_mpq_t(), ta.c.get_mpq_t(), tb.c.get_mpq_t());
            if (s * sign(ta.degree, tb.degree) < 0) mpq_neg(prod.get_mpq_t(), prod.get_mpq_t());
            auto [it, inserted] = acc.try_emplace(m, prod);
            if (!inserted) it->second += prod;
          }
        }
      }
    }
  }
}

GradedElement bracket(GenKind even, const GradedElement& f, const GradedElement& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("dimension mismatch");
  const auto pol = TruncationPolicy::meet(f.policy(), g.policy());
  GradedElement out(f.dim(), pol);
  const int dy = even == GenKind::Y ? -1 : 0;
  const int dx = even == GenKind::X ? -1 : 0;
  Precision prec = product_precision(f, g, dy, dx);
  prec.merge(product_precision(g, f, dy, dx));
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  Precision dropped;
  // (-1)^{|f|} d_v f d_psi g
  accumulate(even, f, g, [](int a, int) { return (a & 1) ? -1 : 1; }, acc, dropped, pol);
  // (-1)^{|f||g|+|g|} d_v g d_psi f: here the left factor comes from g.
  accumulate(even, g, f, [](int b, int a) { return ((a * b + b) & 1) ? -1 : 1; }, acc, dropped, pol);
  for (const auto& [m, c] : acc) {
    if (sgn(c) != 0) out.add_term(m, c);
  }
  prec.merge(dropped);
  out.set_precision(prec);
  return out;
}

Monomial rename(const Monomial& m, bool xToY) {
  Monomial n = m;
  if (xToY) {
    n.y = m.x;
    n.x = {};
  } else {
    n.x = m.y;
    n.y = {};
  }
  return n;
}

}  // namespace

bool is_polyvector(const GradedElement& f) {
  for (const auto& [m, c] : f.terms()) {
    if (m.y_degree() != 0 || m.eta_degree() != 0) return false;
  }
  return true;
}

GradedElement schouten_bracket(const GradedElement& f, const GradedElement& g) {
  if (!is_polyvector(f) || !is_polyvector(g)) {
    throw std::invalid_argument("Schouten bracket expects polyvector fields (x and psi only)");
  }
  return bracket(GenKind::X, f, g);
}

GradedElement vertical_bracket(const GradedElement& f, const GradedElement& g) {
  return bracket(GenKind::Y, f, g);
}

GradedElement delta(const GradedElement& f) {
  GradedElement out(f.dim(), f.policy());
  out.set_precision(f.precision().shifted(-1, 0));
  for (int i = 1; i <= f.dim(); ++i) out += multiply_generator(Eta(i), derive(Y(i), f));
  return out;
}

GradedElement delta_star(const GradedElement& f) {
  GradedElement out(f.dim(), f.policy());
  out.set_precision(f.precision().shifted(1, 0));
  for (const auto& [m, c] : f.terms()) {
    const int q = m.eta_degree();
    if (q == 0) continue;
    const int w = m.y_degree() + q;
    auto piece = GradedElement::monomial(f.dim(), f.policy(), m, c / w);
    for (int a = 1; a <= f.dim(); ++a) {
      if (!(m.odd & (1u << odd_bit(Eta(a))))) continue;
      out += multiply_generator(Y(a), derive(Eta(a), piece));
    }
  }
  return out;
}

GradedElement sigma(const GradedElement& f) {
  GradedElement out(f.dim(), f.policy());
  out.set_precision(f.precision().y_free_part());
  for (const auto& [m, c] : f.terms()) {
    if (m.y_degree() == 0 && m.eta_degree() == 0) out.add_term(m, c);
  }
  return out;
}

GradedElement de_rham(const GradedElement& f) {
  GradedElement out(f.dim(), f.policy());
  out.set_precision(f.precision().shifted(0, -1));
  for (int i = 1; i <= f.dim(); ++i) out += multiply_generator(Eta(i), derive(X(i), f));
  return out;
}

GradedElement rename_x_to_y(const GradedElement& f) {
  const auto& p = f.policy();
  GradedElement out(f.dim(), {std::max(p.xOrder, p.yOrder), p.xOrder});
  for (const auto& [m, c] : f.terms()) {
    if (m.y_degree() != 0) throw std::invalid_argument("rename_x_to_y expects an element without y");
    out.add_term(rename(m, true), c);
  }
  Precision pr;
  for (const auto& corner : f.precision().corners()) pr.add_corner({corner.x, corner.y});
  out.set_precision(pr);
  return out;
}

GradedElement rename_y_to_x(const GradedElement& f) {
  const auto& p = f.policy();
  GradedElement out(f.dim(), {p.yOrder, std::max(p.xOrder, p.yOrder)});
  for (const auto& [m, c] : f.terms()) {
    if (m.x_degree() != 0) throw std::invalid_argument("rename_y_to_x expects an element without x");
    out.add_term(rename(m, false), c);
  }
  Precision pr;
  for (const auto& corner : f.precision().corners()) pr.add_corner({corner.x, corner.y});
  out.set_precision(pr);
  return out;
}

}  // namespace tpoly
