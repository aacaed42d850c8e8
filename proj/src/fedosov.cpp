#include "tpoly/fedosov.hpp"

#include <sstream>

#include "tpoly/schouten.hpp"

namespace tpoly {

namespace {

GradedElement gen(int d, TruncationPolicy p, GeneratorId g) { return GradedElement::generator(d, p, g); }

bool has_form_degree_at_least_one(const GradedElement& f) {
  for (const auto& [m, c] : f.terms()) {
    if (m.eta_degree() == 0) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- ConnectionJet

ConnectionJet::ConnectionJet(int dim, int xOrder) : dim_(dim), xOrder_(xOrder) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("connection dimension out of range");
  if (xOrder < 0 || xOrder > kMaxOrder) throw std::invalid_argument("connection x-order out of range");
}

void ConnectionJet::set(int k, int i, int j, const GradedElement& value) {
  for (int v : {k, i, j}) {
    if (v < 1 || v > dim_) throw std::invalid_argument("Christoffel index out of range");
  }
  for (const auto& [m, c] : value.terms()) {
    if (m.y_degree() != 0 || m.odd != 0) {
      throw std::invalid_argument("Christoffel symbols must be polynomials in x");
    }
  }
  if (i > j) std::swap(i, j);
  GradedElement v(dim_, {kMaxOrder, xOrder_});
  for (const auto& [m, c] : value.terms()) v.add_term(m, c);
  v.set_precision(Precision::exact());
  if (v.is_zero()) {
    entries_.erase({k, i, j});
  } else {
    entries_[{k, i, j}] = v;
  }
}

GradedElement ConnectionJet::christoffel(int k, int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = entries_.find({k, i, j});
  if (it == entries_.end()) return GradedElement(dim_, {kMaxOrder, xOrder_});
  return it->second;
}

ConnectionJet ConnectionJet::parse(std::string_view text, int dim, int xOrder) {
  ConnectionJet cj(dim, xOrder);
  std::map<std::tuple<int, int, int>, std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected ':'", lineNo, static_cast<int>(line.size()) + 1);
    std::istringstream head(line.substr(0, colon));
    std::string word;
    int k = 0, i = 0, j = 0;
    if (!(head >> word) || word != "Gamma") throw ParseError("expected 'Gamma k i j'", lineNo, 1);
    if (!(head >> k >> i >> j)) throw ParseError("expected three indices", lineNo, 1);
    std::string extra;
    if (head >> extra) throw ParseError("unexpected text before ':'", lineNo, 1);
    for (int v : {k, i, j}) {
      if (v < 1 || v > dim) throw ParseError("index out of range", lineNo, 1);
    }
    GradedElement value;
    try {
      value = parse_element(std::string_view(line).substr(colon + 1), dim, {kMaxOrder, xOrder}, lineNo);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()).substr(0, std::string(e.what()).find(" (line")), lineNo,
                       e.column() + static_cast<int>(colon) + 1);
    }
    for (const auto& [m, c] : value.terms()) {
      if (m.y_degree() != 0 || m.odd != 0) throw ParseError("Christoffel symbols must be polynomials in x", lineNo, 1);
    }
    const auto key = std::make_tuple(k, std::min(i, j), std::max(i, j));
    const std::string canon = serialize(value);
    if (auto it = seen.find(key); it != seen.end()) {
      if (it->second != canon) {
        throw ParseError("Gamma " + std::to_string(k) + " " + std::to_string(i) + " " + std::to_string(j) +
                             " conflicts with its symmetric partner (connection must be torsion-free)",
                         lineNo, 1);
      }
      continue;
    }
    seen[key] = canon;
    cj.set(k, i, j, value);
  }
  return cj;
}

std::string ConnectionJet::to_string() const {
  std::string out;
  for (const auto& [key, v] : entries_) {
    auto [k, i, j] = key;
    out += "Gamma " + std::to_string(k) + " " + std::to_string(i) + " " + std::to_string(j) + " : " +
           serialize(v) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- forms

GradedElement gamma_form(const ConnectionJet& cj, TruncationPolicy policy) {
  const int d = cj.dim();
  GradedElement out(d, policy);
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j)
      for (int k = 1; k <= d; ++k) {
        auto c = cj.christoffel(k, i, j);
        if (c.is_zero()) continue;
        auto ypsi = multiply(gen(d, policy, Y(j)), gen(d, policy, Psi(k)));
        out -= multiply(gen(d, policy, Eta(i)), multiply(c.truncated(policy), ypsi));
      }
  return out;
}

GradedElement riemann_component(const ConnectionJet& cj, int l, int k, int i, int j, TruncationPolicy policy) {
  const int d = cj.dim();
  const TruncationPolicy xp{policy.yOrder, cj.x_order()};
  auto G = [&](int a, int b, int c) { return cj.christoffel(a, b, c).truncated(xp); };
  GradedElement r = derive(X(i), G(l, j, k)) - derive(X(j), G(l, i, k));
  for (int m = 1; m <= d; ++m) {
    r -= multiply(G(l, i, m), G(m, j, k));
    r += multiply(G(l, j, m), G(m, i, k));
  }
  return r;
}

GradedElement curvature(const ConnectionJet& cj, TruncationPolicy policy) {
  const int d = cj.dim();
  GradedElement out(d, policy);
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) {
      if (i == j) continue;
      auto ee = multiply(gen(d, policy, Eta(i)), gen(d, policy, Eta(j)));
      for (int k = 1; k <= d; ++k)
        for (int l = 1; l <= d; ++l) {
          auto r = riemann_component(cj, l, k, i, j, policy);
          if (r.is_zero() && r.precision().is_exact()) continue;
          auto ypsi = multiply(gen(d, policy, Y(k)), gen(d, policy, Psi(l)));
          out += multiply(ee, multiply(r.truncated(policy), ypsi)) * Rational(-1, 2);
        }
    }
  return out;
}

GradedElement nabla(const ConnectionJet& cj, const GradedElement& f) {
  if (cj.dim() != f.dim()) throw std::invalid_argument("dimension mismatch between connection and form");
  auto out = de_rham(f);
  if (!cj.is_flat()) out += vertical_bracket(gamma_form(cj, f.policy()), f);
  return out;
}

// ---------------------------------------------------------------- Fedosov connection

FedosovData solve_A(const ConnectionJet& cj, TruncationPolicy policy) {
  policy.validate();
  FedosovData fd;
  fd.jet = cj;
  fd.policy = policy;
  const int d = cj.dim();
  fd.gammaForm = gamma_form(cj, policy);
  fd.curvature = curvature(cj, policy);
  GradedElement a(d, policy);
  const auto seed = delta_star(fd.curvature);
  for (int it = 0; it < policy.yOrder; ++it) {
    auto rhs = nabla(cj, a) + vertical_bracket(a, a) * Rational(1, 2);
    a = seed + delta_star(rhs);
    ++fd.iterations;
  }
  fd.aForm = a;
  GradedElement e(d, policy);
  for (int i = 1; i <= d; ++i) e += multiply(gen(d, policy, Eta(i)), gen(d, policy, Psi(i)));
  fd.bForm = fd.gammaForm + e + fd.aForm;
  return fd;
}

GradedElement fedosov_residual(const FedosovData& fd) {
  const auto& a = fd.aForm;
  return fd.curvature + nabla(fd.jet, a) + vertical_bracket(a, a) * Rational(1, 2) - delta(a);
}

GradedElement differential_D(const FedosovData& fd, const GradedElement& f) {
  auto out = nabla(fd.jet, f) - delta(f);
  if (!fd.aForm.is_zero()) out += vertical_bracket(fd.aForm, f);
  return out;
}

GradedElement tau(const FedosovData& fd, const GradedElement& f0) {
  for (const auto& [m, c] : f0.terms()) {
    if (m.y_degree() != 0 || m.eta_degree() != 0) throw std::invalid_argument("tau expects a y- and eta-free input");
  }
  auto base = f0.truncated(fd.policy);
  GradedElement f = base;
  for (int it = 0; it < fd.policy.yOrder; ++it) {
    auto rhs = nabla(fd.jet, f);
    if (!fd.aForm.is_zero()) rhs += vertical_bracket(fd.aForm, f);
    f = base + delta_star(rhs);
  }
  return f;
}

GradedElement invert_exact(const FedosovData& fd, const GradedElement& f) {
  if (!has_form_degree_at_least_one(f)) throw NotACocycle("invert_exact needs form degree >= 1 in every term");
  if (!is_zero_mod_truncation(differential_D(fd, f))) throw NotACocycle("input is not D-closed");
  const auto seed = -delta_star(f);
  GradedElement g(f.dim(), TruncationPolicy::meet(fd.policy, f.policy()));
  for (int it = 0; it <= fd.policy.yOrder; ++it) {
    auto rhs = nabla(fd.jet, g);
    if (!fd.aForm.is_zero()) rhs += vertical_bracket(fd.aForm, g);
    g = seed + delta_star(rhs);
  }
  return g;
}

bool check_lemma4(const FedosovData& fd, const GradedElement& f0, const GradedElement& g0) {
  auto lhs = sigma(vertical_bracket(tau(fd, f0), tau(fd, g0)));
  auto rhs = schouten_bracket(f0.truncated(fd.policy), g0.truncated(fd.policy));
  return equal_mod_truncation(lhs, rhs);
}

}  // namespace tpoly
