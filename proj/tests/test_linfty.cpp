#include <doctest.h>

#include "tpoly/fedosov.hpp"
#include "tpoly/linfty.hpp"
#include "tpoly/random.hpp"
#include "tpoly/schouten.hpp"

using namespace tpoly;

namespace {

const TruncationPolicy kPol{4, 16};

GradedElement el(std::string_view s, int d = 2) { return parse_element(s, d, kPol); }

GradedElement random_polyvector(Random& rng, int d, std::optional<int> degree = std::nullopt, int terms = 2) {
  ElementShape shape;
  shape.useY = false;
  shape.useEta = false;
  shape.terms = terms;
  shape.maxCoefficient = 3;
  shape.maxXDegree = 3;
  shape.oddDegree = degree ? degree : std::optional<int>(rng.uniform(0, d));
  return rng.element(d, kPol, shape);
}

// Contraction with the one-form x2 dx1 + dx2: an odd arity-1 cochain.
GradedElement contract(const GradedElement& f) {
  const int d = f.dim();
  GradedElement out = multiply(parse_element("x2", d, f.policy()), derive(Psi(1), f));
  if (d >= 2) out += derive(Psi(2), f);
  return out;
}

const Cochain kContract{1, 1, [](const Args& a) { return contract(a[0]); }};
const Cochain kSchouten{2, 1, [](const Args& a) { return schouten_bracket(a[0], a[1]); }};
// A symmetric degree-0 binary cochain.
const Cochain kGamma2{2, 0, [](const Args& a) { return contract(schouten_bracket(a[0], a[1])); }};
const Cochain kIdentity{1, 0, [](const Args& a) { return a[0]; }};

std::vector<InvariantGraphSum> small_classes() {
  std::vector<InvariantGraphSum> out;
  for (const char* s : {"n=2; edges=", "n=2; edges=(1,2)", "n=3; edges=", "n=3; edges=(1,2)", "n=3; edges=(1,2),(2,3)",
                        "n=3; edges=(1,2),(1,3),(2,3)"}) {
    auto c = symmetrize(parse_graph(s).graph);
    if (!c.is_zero()) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("Koszul signs and insertion") {
  const Args a{el("p1"), el("x1"), el("p2")};
  CHECK(koszul_sign(a, {0, 1, 2}) == 1);
  CHECK(koszul_sign(a, {2, 0, 1}) == -1);
  CHECK(koszul_sign(a, {1, 0, 2}) == 1);

  // (b o b)(f,g,h) = b(b(f,g),h) + eps b(b(f,h),g) + eps b(b(g,h),f): the L-infinity[1] Jacobiator.
  Random rng(21);
  const Cochain bb = insert(kSchouten, kSchouten);
  for (int t = 0; t < 20; ++t) {
    const Args x{random_polyvector(rng, 2), random_polyvector(rng, 2), random_polyvector(rng, 2)};
    CHECK(bb(x).is_zero());
    CHECK(nr_bracket(kSchouten, kSchouten)(x).is_zero());
  }
}

TEST_CASE("graph bracket and insertion match evaluation") {
  Random rng(22);
  const auto classes = small_classes();
  REQUIRE(classes.size() >= 4);
  int nonzero = 0;
  for (const auto& a : classes) {
    for (const auto& b : classes) {
      const int na = a.representatives().terms().begin()->first.vertices();
      const int nb = b.representatives().terms().begin()->first.vertices();
      if (na + nb - 1 > 4) continue;
      const CECochain ca{a, 6};
      const CECochain cb{b, 6};
      const CECochain br = nr_bracket(ca, cb);
      const Cochain ins = insert(ca.component(na), cb.component(nb));
      const Cochain brEval = nr_bracket(ca.component(na), cb.component(nb));
      const InvariantGraphSum insGraph = symmetrize(insertion_sum(a.representatives(), b.representatives()));
      for (int t = 0; t < 3; ++t) {
        Args x;
        for (int s = 0; s < na + nb - 1; ++s) x.push_back(random_polyvector(rng, 2));
        const auto viaGraphs = br(x);
        INFO(a.to_string(), " / ", b.to_string(), " : ", serialize(viaGraphs), " vs ", serialize(brEval(x)));
        CHECK(viaGraphs.same_terms(brEval(x)));
        CHECK(evaluate_cochain(insGraph, x).same_terms(ins(x)));
        if (!viaGraphs.is_zero()) ++nonzero;
      }
    }
  }
  CHECK(nonzero > 5);
}

TEST_CASE("NR bracket: antisymmetry and Jacobi on evaluation cochains") {
  Random rng(23);
  const std::vector<Cochain> cs{kContract, kSchouten, kGamma2, kIdentity};
  for (const auto& p : cs) {
    for (const auto& q : cs) {
      const Cochain pq = nr_bracket(p, q);
      const Cochain qp = nr_bracket(q, p);
      Args x;
      for (int s = 0; s < pq.arity; ++s) x.push_back(random_polyvector(rng, 2));
      const GradedElement sym = (p.parity * q.parity) & 1 ? pq(x) - qp(x) : pq(x) + qp(x);
      CHECK(sym.is_zero());
    }
  }
  for (const auto& p : cs) {
    for (const auto& q : cs) {
      for (const auto& r : cs) {
        if (p.arity + q.arity + r.arity - 2 > 3) continue;
        const Cochain lhs = nr_bracket(p, nr_bracket(q, r));
        const Cochain a = nr_bracket(nr_bracket(p, q), r);
        const Cochain b = nr_bracket(q, nr_bracket(p, r));
        Args x;
        for (int s = 0; s < lhs.arity; ++s) x.push_back(random_polyvector(rng, 2));
        GradedElement rhs = a(x);
        if ((p.parity * q.parity) & 1) rhs -= b(x);
        else rhs += b(x);
        CHECK(lhs(x).same_terms(rhs));
      }
    }
  }
}

TEST_CASE("CE differential") {
  const CECochain pi = CECochain::schouten(5);
  CHECK(is_lie_structure(pi));
  CHECK(ce_differential(pi, pi).graphs.is_zero());

  // d(Psi_K4) = 0 on the graph side and by evaluation at arity 5.
  const CECochain k4{symmetrize(Graph::complete(4)), 5};
  CHECK(ce_differential(pi, k4).graphs.is_zero());
  Random rng(24);
  const Cochain dk4 = nr_bracket(pi.component(2), k4.component(4));
  int tested = 0;
  for (int t = 0; t < 4; ++t) {
    Args x;
    for (int s = 0; s < 5; ++s) x.push_back(random_polyvector(rng, 2, rng.uniform(1, 2), 2));
    CHECK(dk4(x).is_zero());
    ++tested;
  }
  CHECK(tested == 4);

  // d^2 = 0 on random graph cochains.
  for (const auto& c : small_classes()) {
    const CECochain a{c, 5};
    CHECK(ce_differential(pi, ce_differential(pi, a)).graphs.is_zero());
  }

  // A degree-1 perturbation whose square does not vanish is refused.
  const CECochain bad{mc_element() + symmetrize(Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}})), 5};
  CHECK_FALSE(is_lie_structure(bad));
  CHECK_THROWS_AS(ce_differential(bad, pi), std::invalid_argument);
}

TEST_CASE("exponentials") {
  Random rng(25);
  const auto id = exponential(CECochain{InvariantGraphSum{}, 4});
  CHECK(id->components().size() == 1);
  CHECK(id->components().at(1) == symmetrize(Graph::unit()));

  const InvariantGraphSum k4 = symmetrize(Graph::complete(4));
  const auto f6 = exponential(CECochain{k4, 6});
  CHECK(f6->components().size() == 2);
  CHECK(f6->components().at(4) == k4);
  const auto f7 = exponential(CECochain{k4, 7});
  CHECK(f7->components().at(7) == symmetrize(insertion_sum(k4.representatives(), k4.representatives())) *
                                      Rational(1, 2));
  CHECK(exponential(CECochain{k4, 7}, 1)->components().count(7) == 0);
  CHECK_THROWS_AS(exponential(CECochain{mc_element(), 4}), std::invalid_argument);

  // Only gamma_2: F1 = id, F2 = gamma_2, F3 = 1/2 (gamma o gamma)_3, expanded by hand.
  const auto f = exponential(std::map<int, Cochain>{{2, kGamma2}}, 3);
  for (int t = 0; t < 5; ++t) {
    const Args x{random_polyvector(rng, 2), random_polyvector(rng, 2), random_polyvector(rng, 2)};
    CHECK(f->component({x[0]}).same_terms(x[0]));
    CHECK(f->component({x[0], x[1]}).same_terms(kGamma2({x[0], x[1]})));
    auto g = [](const GradedElement& a, const GradedElement& b) { return kGamma2({a, b}); };
    GradedElement expect = g(g(x[0], x[1]), x[2]);
    GradedElement t2 = g(g(x[0], x[2]), x[1]);
    GradedElement t3 = g(g(x[1], x[2]), x[0]);
    if (koszul_sign(x, {0, 2, 1}) < 0) t2 = -t2;
    if (koszul_sign(x, {1, 2, 0}) < 0) t3 = -t3;
    expect = (expect + t2 + t3) * Rational(1, 2);
    CHECK(f->component(x).same_terms(expect));
  }

  // exp(gamma) o exp(-gamma) = id
  const auto g = exponential(std::map<int, Cochain>{{2, scaled(kGamma2, -1)}}, 3);
  const ComposedMorphism both(f, g, 3);
  for (int t = 0; t < 3; ++t) {
    const Args x{random_polyvector(rng, 2), random_polyvector(rng, 2), random_polyvector(rng, 2)};
    CHECK(both.component({x[0]}).same_terms(x[0]));
    CHECK(both.component({x[0], x[1]}).is_zero());
    CHECK(both.component(x).is_zero());
  }
}

TEST_CASE("morphism checker") {
  auto sample = [](Random& rng) { return random_polyvector(rng, 2); };
  const auto id = GraphMorphism::identity(3);
  CHECK(check_morphism(*id, schouten_structure(), schouten_structure(), 3, sample).ok);

  // exp(Psi_K4) is an L-infinity automorphism; arity 5 is the first equation that sees Psi_K4.
  // Inputs are mostly bivectors with cubic coefficients so that the tetrahedron survives.
  const auto f = exponential(CECochain{symmetrize(Graph::complete(4)), 5});
  auto rich = [](Random& rng) {
    ElementShape shape;
    shape.useY = false;
    shape.useEta = false;
    shape.terms = 4;
    shape.maxCoefficient = 3;
    shape.maxXDegree = 3;
    shape.oddDegree = rng.uniform(0, 9) < 7 ? 2 : 1;
    return rng.element(2, TruncationPolicy{4, 20}, shape);
  };
  const auto r = check_morphism(*f, schouten_structure(), schouten_structure(), 5, rich, 3, 4, 5);
  CHECK(r.ok);
  CHECK(r.equationsChecked == 4);
  Random probe(3);
  int live = 0;
  for (int t = 0; t < 4; ++t) {
    Args x;
    for (int s = 0; s < 5; ++s) x.push_back(rich(probe));
    if (!morphism_equation(*f, schouten_structure(), schouten_structure(), x).first.is_zero()) ++live;
  }
  CHECK(live >= 2);

  // Corrupting F2 breaks the arity-3 equation.
  const CochainMorphism bad({{1, kIdentity}, {2, kGamma2}}, 3);
  const auto rb = check_morphism(bad, schouten_structure(), schouten_structure(), 3, sample);
  CHECK_FALSE(rb.ok);
  CHECK(rb.failingArity == 3);
}

TEST_CASE("push_mc and twisting") {
  Random rng(26);
  const int d = 2;
  const TruncationPolicy pol{3, 2};
  ConnectionJet cj = ConnectionJet::parse("Gamma 2 1 1 : x1 x2\nGamma 1 1 2 : x2\n", d, 2);
  const FedosovData fd = solve_A(cj, pol);
  const GradedElement& b = fd.bForm;
  REQUIRE_FALSE(fd.aForm.is_zero());

  const auto id = GraphMorphism::identity(3, Variables::Fiber);
  CHECK(push_mc(*id, b).same_terms(b));
  const auto tid = twist(id, b);
  ElementShape shape;
  shape.terms = 3;
  shape.maxCoefficient = 3;
  for (int t = 0; t < 5; ++t) {
    const auto x = rng.element(d, pol, shape);
    const auto y = rng.element(d, pol, shape);
    CHECK(tid->component({x}).same_terms(x));
    CHECK(tid->component({x, y}).is_zero());
  }
  CHECK(twist(id, GradedElement(d, pol)) == id);

  // Extra F2: pi' = pi + 1/2 F2(pi, pi) for an MC element without form-degree weight.
  const CochainMorphism extra({{1, kIdentity}, {2, kGamma2}}, 2);
  const GradedElement pi = el("x1 p1 p2");
  CHECK(push_mc(extra, pi).same_terms(pi + kGamma2({pi, pi}) * Rational(1, 2)));
  CHECK(termination_witness(extra, pi, 0).kind == TerminationWitness::Kind::Arity);
  CHECK(termination_witness(*id, b, 0).kind == TerminationWitness::Kind::Arity);

  struct Unbounded : LInftyMorphism {
    GradedElement component(const Args& a) const override { return a.size() == 1 ? a[0] : GradedElement(); }
    std::optional<int> max_arity() const override { return std::nullopt; }
    std::string describe() const override { return "unbounded"; }
  };
  CHECK_THROWS_AS(push_mc(Unbounded{}, pi), TerminationError);
  CHECK(termination_witness(Unbounded{}, b, 0).kind == TerminationWitness::Kind::FormDegree);

  // F^vert = exp(Psi_K4) on fibers: pi' = B, and twisting by B intertwines D on both sides.
  const auto fvert = exponential(CECochain{symmetrize(Graph::complete(4)), 6, Variables::Fiber});
  CHECK(equal_mod_truncation(push_mc(*fvert, b), b));
  const auto fb = twist(fvert, b);
  const LInftyStructure vert{[&fd](const GradedElement& x) { return differential_D(fd, x); },
                             [](const GradedElement& x, const GradedElement& y) { return vertical_bracket(x, y); }};
  // Psi_K4 only survives B's y-quadratic part, so feed bivectors with y-dependent coefficients.
  ElementShape hs;
  hs.terms = 3;
  hs.maxCoefficient = 3;
  hs.useEta = false;
  hs.maxYDegree = 3;
  hs.minYDegree = 1;
  auto sample = [&](Random& r) {
    hs.oddDegree = r.uniform(0, 9) < 7 ? 2 : 1;
    return r.element(d, pol, hs);
  };
  const auto check = check_morphism(*fb, vert, vert, 3, sample, 3, 3);
  INFO(check.detail);
  CHECK(check.ok);
  Random probe(3);
  int live = 0;
  for (int t = 0; t < 6; ++t) {
    const Args x{sample(probe), sample(probe)};
    if (!fb->component(x).is_zero()) ++live;
  }
  CHECK(live >= 1);

  // Twisting by B and then by -B gives back F^vert.
  const auto back = twist(fb, -b);
  for (int t = 0; t < 3; ++t) {
    const Args x{sample(probe), sample(probe)};
    CHECK(equal_mod_truncation(back->component({x[0]}), fvert->component({x[0]})));
    CHECK(equal_mod_truncation(back->component(x), fvert->component(x)));
  }
}

TEST_CASE("gauge change at lowest order") {
  auto sample = [](Random& rng) { return random_polyvector(rng, 2, std::nullopt, 3); };
  const CECochain k4{symmetrize(Graph::complete(4)), 4};
  const auto report = gauge_check(kSchouten, {{4, k4.component(4)}}, kContract, sample, 5, 6);
  CHECK(report.arityOneAgrees);
  CHECK(report.arityTwoDifference);
  CHECK(report.correctionClosed);
  CHECK(report.nontrivial);
  CHECK(report.ok());
  CHECK_THROWS_AS(gauge_check(kSchouten, {}, kIdentity, sample), std::invalid_argument);
}
