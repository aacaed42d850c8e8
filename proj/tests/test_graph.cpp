#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "tpoly/graph.hpp"
#include "tpoly/random.hpp"

using namespace tpoly;

namespace {

Graph G(int n, std::vector<std::pair<int, int>> e) {
  auto r = Graph::make(n, e);
  REQUIRE(r);
  return r->first;
}

Graph random_graph(Random& rng, int n, int maxEdges) {
  std::vector<std::pair<int, int>> all;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) all.push_back({a, b});
  std::shuffle(all.begin(), all.end(), rng.engine());
  all.resize(rng.uniform(0, std::min<int>(maxEdges, all.size())));
  return Graph::make(n, all)->first;
}

// ---- independent oracle: labeled graphs as sorted edge vectors, no isomorphism search ----

using Labeled = std::map<std::vector<std::pair<int, int>>, Rational>;
struct Full {
  int n;
  Labeled terms;
};

void add_labeled(Labeled& out, std::vector<std::pair<int, int>> e, const Rational& c) {
  for (auto& p : e)
    if (p.first > p.second) std::swap(p.first, p.second);
  int parity = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (e[j] < e[i]) ++parity;
  std::sort(e.begin(), e.end());
  if (std::adjacent_find(e.begin(), e.end()) != e.end()) return;
  auto& slot = out[e];
  slot += (parity % 2) ? Rational(-c) : c;
  if (sgn(slot) == 0) out.erase(e);
}

Full average(int n, const std::vector<std::pair<int, int>>& edges) {
  Full f{n, {}};
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  Rational fact = 1;
  for (int k = 2; k <= n; ++k) fact *= k;
  do {
    std::vector<std::pair<int, int>> e;
    for (auto [a, b] : edges) e.push_back({p[a], p[b]});
    add_labeled(f.terms, e, Rational(1) / fact);
  } while (std::next_permutation(p.begin(), p.end()));
  return f;
}

// Insert b at vertex v of a by brute force over every endpoint reassignment.
void insert_all(const Full& a, const Full& b, int sign, Labeled& out, int& nOut) {
  nOut = a.n + b.n - 1;
  for (const auto& [ea, ca] : a.terms)
    for (const auto& [eb, cb] : b.terms)
      for (int v = 0; v < a.n; ++v) {
        std::vector<int> incident;
        for (std::size_t k = 0; k < ea.size(); ++k) {
          if (ea[k].first == v) incident.push_back(2 * k);
          if (ea[k].second == v) incident.push_back(2 * k + 1);
        }
        int combos = 1;
        for (std::size_t s = 0; s < incident.size(); ++s) combos *= b.n;
        for (int code = 0; code < combos; ++code) {
          std::vector<std::pair<int, int>> e;
          for (auto [x, y] : ea) {
            auto mv = [&](int u) { return u < v ? u : u + b.n - 1; };
            e.push_back({x == v ? -1 : mv(x), y == v ? -1 : mv(y)});
          }
          int c = code;
          for (int slot : incident) {
            int target = v + c % b.n;
            c /= b.n;
            (slot % 2 ? e[slot / 2].second : e[slot / 2].first) = target;
          }
          for (auto [x, y] : eb) e.push_back({v + x, v + y});
          add_labeled(out, e, ca * cb * sign);
        }
      }
}

Labeled symmetrize_labeled(int n, const Labeled& in) {
  Labeled out;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    for (const auto& [e, c] : in) {
      std::vector<std::pair<int, int>> r;
      for (auto [a, b] : e) r.push_back({p[a], p[b]});
      add_labeled(out, r, c);
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

TEST_CASE("canonical edge order and degrees") {
  auto r = Graph::make(3, {{1, 2}, {0, 1}});
  REQUIRE(r);
  CHECK(r->second == -1);
  CHECK(r->first.to_string() == "n=3; edges=(1,2),(2,3)");
  CHECK_FALSE(Graph::make(2, {{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(Graph::make(2, {{1, 1}}), std::invalid_argument);
  CHECK(Graph::mc().degree() == 1);
  CHECK(Graph::complete(4).degree() == 0);
  auto p = parse_graph("n=4; edges=(2,1),(1,3) ,(1,4)");
  CHECK(p.sign == 1);
  p = parse_graph("n=3; edges=(2,3),(1,2)");
  CHECK(p.sign == -1);
  CHECK(parse_graph("n=2; edges=(1,2),(2,1)").sign == 0);
  CHECK(parse_graph("n=3; edges=").graph.edge_count() == 0);
  CHECK_THROWS_AS(parse_graph("n=2; edges=(1,3)"), ParseError);
  CHECK_THROWS_AS(parse_graph("n=2; edges=(1,1)"), ParseError);
  CHECK_THROWS_AS(parse_graph("n=2 edges=(1,2)"), ParseError);
}

TEST_CASE("composition examples and unit") {
  auto mm = compose(Graph::mc(), 1, Graph::mc());
  REQUIRE(mm.size() == 2);
  // Reconnections: the old edge lands on vertex 1 or 2 of the inserted edge.
  CHECK(mm.terms().at(G(3, {{0, 1}, {0, 2}})) == -1);
  CHECK(mm.terms().at(G(3, {{0, 1}, {1, 2}})) == -1);
  Random rng(1);
  for (int t = 0; t < 20; ++t) {
    auto g = random_graph(rng, rng.uniform(1, 4), 5);
    for (int i = 1; i <= g.vertices(); ++i) CHECK(compose(g, i, Graph::unit()) == GraphSum(g));
    CHECK(compose(Graph::unit(), 1, g) == GraphSum(g));
  }
  CHECK_THROWS_AS(compose(Graph::mc(), 3, Graph::mc()), std::invalid_argument);
}

TEST_CASE("operad associativity") {
  Random rng(7);
  for (int t = 0; t < 40; ++t) {
    auto g1 = random_graph(rng, rng.uniform(1, 3), 3);
    auto g2 = random_graph(rng, rng.uniform(1, 3), 3);
    auto g3 = random_graph(rng, rng.uniform(1, 2), 2);
    const int n1 = g1.vertices(), n2 = g2.vertices();
    for (int i = 1; i <= n1; ++i) {
      // Sequential.
      for (int j = 1; j <= n2; ++j) {
        auto lhs = compose(compose(GraphSum(g1), i, GraphSum(g2)), i + j - 1, GraphSum(g3));
        auto rhs = compose(GraphSum(g1), i, compose(GraphSum(g2), j, GraphSum(g3)));
        CHECK(lhs == rhs);
      }
      // Parallel, i < j: the edge blocks of g2 and g3 trade places.
      for (int j = i + 1; j <= n1; ++j) {
        auto lhs = compose(compose(GraphSum(g1), i, GraphSum(g2)), j + n2 - 1, GraphSum(g3));
        auto rhs = compose(compose(GraphSum(g1), j, GraphSum(g3)), i, GraphSum(g2));
        int s = (g2.edge_count() * g3.edge_count()) % 2 ? -1 : 1;
        CHECK(lhs == rhs * Rational(s));
      }
    }
  }
}

TEST_CASE("composition is independent of the input edge order") {
  Random rng(3);
  for (int t = 0; t < 30; ++t) {
    auto g1 = random_graph(rng, 3, 3), g2 = random_graph(rng, 3, 3);
    std::vector<std::pair<int, int>> e1(g1.edges().begin(), g1.edges().end());
    std::vector<std::pair<int, int>> e2(g2.edges().begin(), g2.edges().end());
    std::shuffle(e1.begin(), e1.end(), rng.engine());
    std::shuffle(e2.begin(), e2.end(), rng.engine());
    auto r1 = Graph::make(3, e1), r2 = Graph::make(3, e2);
    CHECK(r1->first == g1);
    CHECK(r2->first == g2);
    // Brute-force composition of the unsorted lists, summed over all insertion points.
    Labeled oracle;
    int nOut = 0;
    Full a{3, {}}, b{3, {}};
    a.terms[e1] = 1;
    b.terms[e2] = 1;
    insert_all(a, b, 1, oracle, nOut);
    Labeled lib;
    for (int i = 1; i <= 3; ++i) {
      auto composed = compose(g1, i, g2);
      for (const auto& [g, c] : composed.terms()) {
        std::vector<std::pair<int, int>> e(g.edges().begin(), g.edges().end());
        add_labeled(lib, e, c * r1->second * r2->second);
      }
    }
    CHECK(oracle == lib);
  }
}

TEST_CASE("symmetrize") {
  auto mc = symmetrize(Graph::mc());
  CHECK_FALSE(mc.is_zero());
  // The path on three vertices has the reflection, an odd edge permutation.
  CHECK(symmetrize(G(3, {{0, 1}, {1, 2}})).is_zero());
  CHECK_FALSE(symmetrize(Graph::complete(4)).is_zero());
  Random rng(5);
  for (int t = 0; t < 30; ++t) {
    auto g = random_graph(rng, rng.uniform(2, 5), 6);
    auto s = symmetrize(g);
    CHECK(symmetrize(s.representatives()) == s);
    CHECK(symmetrize(s.expand()) == s);
    // Relabeling does not change the class.
    std::vector<int> p(g.vertices());
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng.engine());
    auto [h, sign] = relabel(g, p);
    CHECK(symmetrize(GraphSum(h, sign)) == s);
    // Zero iff an odd automorphism exists: check by brute force.
    bool odd = false;
    std::sort(p.begin(), p.end());
    do {
      auto [k, sg] = relabel(g, p);
      if (k == g && sg == -1) odd = true;
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(s.is_zero() == odd);
  }
}

TEST_CASE("Lie bracket: Maurer-Cartan, antisymmetry, Jacobi") {
  CHECK(lie_bracket(mc_element(), mc_element()).is_zero());
  CHECK(differential(mc_element()).is_zero());
  Random rng(9);
  auto rnd = [&]() {
    InvariantGraphSum s;
    for (int k = 0; k < 2; ++k) s += symmetrize(random_graph(rng, rng.uniform(1, 3), 3)) * rng.nonzero_rational(3);
    return s;
  };
  for (int t = 0; t < 15; ++t) {
    auto a = symmetrize(random_graph(rng, rng.uniform(1, 3), 3));
    auto b = symmetrize(random_graph(rng, rng.uniform(1, 3), 3));
    if (a.is_zero() || b.is_zero()) continue;
    int da = *a.degree(), db = *b.degree();
    CHECK(lie_bracket(a, b) == lie_bracket(b, a) * Rational(((da * db) & 1) ? 1 : -1));
  }
  for (int t = 0; t < 8; ++t) {
    auto a = symmetrize(random_graph(rng, rng.uniform(1, 2), 1));
    auto b = symmetrize(random_graph(rng, rng.uniform(1, 2), 1));
    auto c = rnd();
    if (a.is_zero() || b.is_zero()) continue;
    int da = *a.degree(), db = *b.degree();
    auto lhs = lie_bracket(a, lie_bracket(b, c));
    auto rhs = lie_bracket(lie_bracket(a, b), c) + lie_bracket(b, lie_bracket(a, c)) * Rational(((da * db) & 1) ? -1 : 1);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("graph complex differential") {
  auto gens = trivalent_graphs(5);
  // K4; on five vertices K5, K5 minus an edge, K5 minus two disjoint edges. The latter
  // three have odd automorphisms and vanish.
  CHECK(gens.size() == 4);
  for (const auto& g : gens) {
    auto x = symmetrize(g);
    if (g.vertices() == 5) CHECK(x.is_zero());
    auto dx = differential(x);
    CHECK(differential(dx).is_zero());
    CHECK(dx.in_gc2());
  }
  CHECK(differential(symmetrize(Graph::complete(4))).is_zero());
  // Six vertices: nonzero differentials, closure and d^2 = 0.
  int nonzero = 0;
  for (const auto& g : trivalent_graphs(6)) {
    auto x = symmetrize(g);
    auto dx = differential(x);
    CHECK(dx.in_gc2());
    CHECK(differential(dx).is_zero());
    if (!dx.is_zero()) {
      ++nonzero;
      CHECK(*dx.degree() == g.degree() + 1);
    }
  }
  CHECK(nonzero >= 4);
  // Full complex: every graph on up to five vertices.
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::pair<int, int>> all;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) all.push_back({a, b});
    for (std::uint32_t mask = 0; mask < (1u << all.size()); mask += 3) {
      std::vector<std::pair<int, int>> e;
      for (std::size_t k = 0; k < all.size(); ++k)
        if (mask & (1u << k)) e.push_back(all[k]);
      CHECK(differential(differential(symmetrize(G(n, e)))).is_zero());
    }
  }
}

TEST_CASE("d(K4) = 0 against a brute-force reconnection enumerator") {
  auto k4 = Graph::complete(4);
  std::vector<std::pair<int, int>> ek4(k4.edges().begin(), k4.edges().end());
  Full A = average(2, {{0, 1}});
  Full B = average(4, ek4);
  Labeled sum;
  int n = 0;
  insert_all(A, B, 1, sum, n);   // MC o K4
  insert_all(B, A, -1, sum, n);  // -(-1)^{1*0} K4 o MC
  CHECK_FALSE(sum.empty());      // the pieces do not vanish individually
  CHECK(symmetrize_labeled(5, sum).empty());

  // The same enumerator reproduces nonzero library differentials.
  for (auto h : {G(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}),
                 G(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {2, 3}})}) {
    const int nv = h.vertices();
    std::vector<std::pair<int, int>> eh(h.edges().begin(), h.edges().end());
    Full H = average(nv, eh);
    Labeled s2;
    insert_all(A, H, 1, s2, n);
    insert_all(H, A, h.degree() % 2 ? 1 : -1, s2, n);
    auto lib = differential(symmetrize(h)).expand();
    CHECK_FALSE(lib.is_zero());
    Rational fact = 1;
    for (int k = 2; k <= nv + 1; ++k) fact *= k;
    Labeled libLab;
    for (const auto& [gg, c] : lib.terms()) {
      std::vector<std::pair<int, int>> e(gg.edges().begin(), gg.edges().end());
      add_labeled(libLab, e, c * fact);
    }
    CHECK(symmetrize_labeled(nv + 1, s2) == libLab);
  }
}
