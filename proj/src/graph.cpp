#include "tpoly/graph.hpp"

#include <algorithm>
#include <cctype>
#include <bit>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tpoly {

namespace {

int sort_edges(std::vector<Graph::Edge>& edges) {
  // Insertion sort counting transpositions; edge lists are short.
  int swaps = 0;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    for (std::size_t j = i; j > 0 && edges[j] < edges[j - 1]; --j) {
      std::swap(edges[j], edges[j - 1]);
      ++swaps;
    }
  }
  return (swaps & 1) ? -1 : 1;
}

bool has_repeat(const std::vector<Graph::Edge>& sorted) {
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

struct CanonicalSearch {
  Graph rep;
  int sign = 1;
  bool oddAutomorphism = false;
};

// Iso-invariant vertex colours by iterated refinement on neighbour colour multisets.
std::vector<int> refine_colours(const Graph& g) {
  const int n = g.vertices();
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : g.edges()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> colour(n);
  for (int v = 0; v < n; ++v) colour[v] = static_cast<int>(adj[v].size());
  for (int round = 0; round < n; ++round) {
    std::vector<std::pair<int, std::vector<int>>> sig(n);
    for (int v = 0; v < n; ++v) {
      sig[v].first = colour[v];
      for (int w : adj[v]) sig[v].second.push_back(colour[w]);
      std::sort(sig[v].second.begin(), sig[v].second.end());
    }
    auto sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> next(n);
    for (int v = 0; v < n; ++v) {
      next[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
    }
    const bool stable = std::set<int>(next.begin(), next.end()).size() == std::set<int>(colour.begin(), colour.end()).size();
    colour = next;
    if (stable) break;
  }
  return colour;
}

CanonicalSearch canonical_search(const Graph& g) {
  const int n = g.vertices();
  const auto colour = refine_colours(g);
  // Vertices of colour class c are sent to a contiguous block of positions, in colour order.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return colour[a] < colour[b]; });
  std::vector<std::pair<int, int>> blocks;  // [begin, end) ranges in `order`
  for (int s = 0; s < n;) {
    int e = s;
    while (e < n && colour[order[e]] == colour[order[s]]) ++e;
    blocks.push_back({s, e});
    s = e;
  }
  std::vector<int> arrangement = order;  // arrangement[pos] = vertex placed at pos
  CanonicalSearch best;
  bool found = false;
  std::vector<int> perm(n);

  auto visit = [&]() {
    for (int pos = 0; pos < n; ++pos) perm[arrangement[pos]] = pos;
    auto [h, s] = relabel(g, perm);
    if (!found || h < best.rep) {
      best.rep = h;
      best.sign = s;
      best.oddAutomorphism = false;
      found = true;
    } else if (h == best.rep && s != best.sign) {
      best.oddAutomorphism = true;
    }
  };

  // Enumerate the product of permutations of each block.
  std::function<void(std::size_t)> rec = [&](std::size_t b) {
    if (b == blocks.size()) {
      visit();
      return;
    }
    auto [s, e] = blocks[b];
    std::sort(arrangement.begin() + s, arrangement.begin() + e);
    do {
      rec(b + 1);
    } while (std::next_permutation(arrangement.begin() + s, arrangement.begin() + e));
  };
  rec(0);
  return best;
}

}  // namespace

// ---------------------------------------------------------------- Graph

Graph::Graph(int n) : n_(n) {
  if (n < 1 || n > kMaxGraphVertices) throw std::invalid_argument("graph vertex count out of range");
}

std::optional<std::pair<Graph, int>> Graph::make(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g(n);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("loops are not allowed");
    g.edges_.push_back({static_cast<std::uint8_t>(std::min(a, b)), static_cast<std::uint8_t>(std::max(a, b))});
  }
  const int s = sort_edges(g.edges_);
  if (has_repeat(g.edges_)) return std::nullopt;
  return std::make_pair(std::move(g), s);
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  auto r = make(n, edges);
  if (!r) throw std::invalid_argument("graph with a repeated edge is zero");
  if (r->second != 1) throw std::invalid_argument("edge list is not in canonical order");
  return r->first;
}

Graph Graph::mc() { return from_edges(2, {{0, 1}}); }

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) e.push_back({a, b});
  return from_edges(n, e);
}

int Graph::valence(int v) const {
  int k = 0;
  for (auto [a, b] : edges_) k += (a == v) + (b == v);
  return k;
}

bool Graph::at_least_trivalent() const {
  for (int v = 0; v < n_; ++v)
    if (valence(v) < 3) return false;
  return true;
}

std::string Graph::to_string() const {
  std::string s = "n=" + std::to_string(n_) + "; edges=";
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (k) s += ",";
    s += "(" + std::to_string(edges_[k].first + 1) + "," + std::to_string(edges_[k].second + 1) + ")";
  }
  return s;
}

SignedGraph parse_graph(std::string_view text, int line) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) -> void { throw ParseError(msg, line, static_cast<int>(pos) + 1); };
  auto skip = [&]() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](std::string_view word) {
    skip();
    if (text.substr(pos, word.size()) != word) fail("expected '" + std::string(word) + "'");
    pos += word.size();
  };
  auto number = [&]() {
    skip();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) fail("expected a number");
    return std::stoi(std::string(text.substr(start, pos - start)));
  };
  expect("n");
  expect("=");
  const int n = number();
  if (n < 1 || n > kMaxGraphVertices) fail("vertex count out of range");
  expect(";");
  expect("edges");
  expect("=");
  std::vector<std::pair<int, int>> edges;
  skip();
  while (pos < text.size() && text[pos] == '(') {
    ++pos;
    int a = number();
    expect(",");
    int b = number();
    expect(")");
    if (a < 1 || a > n || b < 1 || b > n) fail("edge endpoint out of range");
    if (a == b) fail("loops are not allowed");
    edges.push_back({a - 1, b - 1});
    skip();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      skip();
      if (pos >= text.size() || text[pos] != '(') fail("expected '('");
    }
  }
  skip();
  if (pos != text.size()) fail("unexpected trailing text");
  auto r = Graph::make(n, edges);
  if (!r) return {Graph(n), 0};
  return {r->first, r->second};
}

std::pair<Graph, int> relabel(const Graph& g, const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> e;
  e.reserve(g.edges().size());
  for (auto [a, b] : g.edges()) e.push_back({perm[a], perm[b]});
  auto r = Graph::make(g.vertices(), e);
  return *r;  // relabeling cannot create repeats
}

// ---------------------------------------------------------------- GraphSum

void GraphSum::add(const Graph& g, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(g, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::optional<int> GraphSum::degree() const {
  if (terms_.empty()) return std::nullopt;
  int d = terms_.begin()->first.degree();
  for (const auto& [g, c] : terms_)
    if (g.degree() != d) return std::nullopt;
  return d;
}

std::optional<int> GraphSum::arity() const {
  if (terms_.empty()) return std::nullopt;
  int n = terms_.begin()->first.vertices();
  for (const auto& [g, c] : terms_)
    if (g.vertices() != n) return std::nullopt;
  return n;
}

GraphSum& GraphSum::operator+=(const GraphSum& o) {
  for (const auto& [g, c] : o.terms_) add(g, c);
  return *this;
}

GraphSum& GraphSum::operator-=(const GraphSum& o) {
  for (const auto& [g, c] : o.terms_) add(g, -c);
  return *this;
}

GraphSum& GraphSum::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [g, v] : terms_) v *= c;
  return *this;
}

std::string GraphSum::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [g, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += format_rational(c) + " * [" + g.to_string() + "]";
  }
  return s;
}

// ---------------------------------------------------------------- composition

GraphSum compose(const Graph& g1, int i, const Graph& g2) {
  const int n1 = g1.vertices(), n2 = g2.vertices();
  if (i < 1 || i > n1) throw std::invalid_argument("insertion index out of range");
  if (n1 + n2 - 1 > kMaxGraphVertices) throw std::invalid_argument("composite graph too large");
  const int v = i - 1;
  auto shift = [&](int u) { return u < v ? u : u + n2 - 1; };
  std::vector<std::pair<int, int>> base;
  std::vector<int> slots;  // positions in `base` of endpoints equal to v, as 2*edge + side
  for (std::size_t k = 0; k < g1.edges().size(); ++k) {
    auto [a, b] = g1.edges()[k];
    base.push_back({a == v ? -1 : shift(a), b == v ? -1 : shift(b)});
    if (a == v) slots.push_back(static_cast<int>(2 * k));
    if (b == v) slots.push_back(static_cast<int>(2 * k + 1));
  }
  for (auto [a, b] : g2.edges()) base.push_back({v + a, v + b});

  GraphSum out;
  std::vector<int> choice(slots.size(), 0);
  for (;;) {
    auto e = base;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto& edge = e[slots[s] / 2];
      (slots[s] % 2 ? edge.second : edge.first) = v + choice[s];
    }
    if (auto r = Graph::make(n1 + n2 - 1, e)) out.add(r->first, r->second);
    std::size_t s = 0;
    while (s < choice.size() && ++choice[s] == n2) choice[s++] = 0;
    if (s == choice.size()) break;
  }
  return out;
}

GraphSum compose(const GraphSum& g1, int i, const GraphSum& g2) {
  GraphSum out;
  for (const auto& [a, ca] : g1.terms())
    for (const auto& [b, cb] : g2.terms()) out += compose(a, i, b) * (ca * cb);
  return out;
}

// ---------------------------------------------------------------- coinvariants

std::optional<std::pair<Graph, int>> canonical_form(const Graph& g) {
  auto s = canonical_search(g);
  if (s.oddAutomorphism) return std::nullopt;
  return std::make_pair(s.rep, s.sign);
}

bool InvariantGraphSum::in_gc2() const {
  for (const auto& [g, c] : reps_.terms())
    if (!g.at_least_trivalent()) return false;
  return true;
}

GraphSum InvariantGraphSum::expand() const {
  GraphSum out;
  for (const auto& [g, c] : reps_.terms()) {
    const int n = g.vertices();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rational fact = 1;
    for (int k = 2; k <= n; ++k) fact *= k;
    do {
      auto [h, s] = relabel(g, perm);
      out.add(h, c * s / fact);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

InvariantGraphSum& InvariantGraphSum::operator+=(const InvariantGraphSum& o) {
  reps_ += o.reps_;
  return *this;
}
InvariantGraphSum& InvariantGraphSum::operator-=(const InvariantGraphSum& o) {
  reps_ -= o.reps_;
  return *this;
}
InvariantGraphSum& InvariantGraphSum::operator*=(const Rational& c) {
  reps_ *= c;
  return *this;
}

InvariantGraphSum symmetrize(const GraphSum& g) {
  InvariantGraphSum out;
  for (const auto& [h, c] : g.terms()) {
    if (auto cf = canonical_form(h)) out.reps_.add(cf->first, c * cf->second);
  }
  return out;
}

GraphSum insertion_sum(const GraphSum& a, const GraphSum& b) {
  GraphSum out;
  for (const auto& [g, c] : a.terms()) {
    for (int i = 1; i <= g.vertices(); ++i) out += compose(GraphSum(g, c), i, b);
  }
  return out;
}

namespace {

std::map<int, GraphSum> by_degree(const GraphSum& s) {
  std::map<int, GraphSum> parts;
  for (const auto& [g, c] : s.terms()) parts[g.degree()].add(g, c);
  return parts;
}

}  // namespace

InvariantGraphSum lie_bracket(const InvariantGraphSum& a, const InvariantGraphSum& b) {
  GraphSum total;
  for (const auto& [da, pa] : by_degree(a.representatives())) {
    for (const auto& [db, pb] : by_degree(b.representatives())) {
      total += insertion_sum(pa, pb);
      total -= insertion_sum(pb, pa) * Rational(((da * db) & 1) ? -1 : 1);
    }
  }
  return symmetrize(total);
}

InvariantGraphSum mc_element() { return symmetrize(Graph::mc()); }

InvariantGraphSum differential(const InvariantGraphSum& a) { return lie_bracket(mc_element(), a); }

std::vector<Graph> trivalent_graphs(int maxVertices) {
  std::vector<Graph> out;
  for (int n = 4; n <= maxVertices; ++n) {
    std::vector<std::pair<int, int>> all;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) all.push_back({a, b});
    std::set<Graph> seen;
    const std::uint32_t subsets = 1u << all.size();
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      if (std::popcount(mask) * 2 < 3 * n) continue;
      std::vector<std::pair<int, int>> e;
      for (std::size_t k = 0; k < all.size(); ++k)
        if (mask & (1u << k)) e.push_back(all[k]);
      Graph g = Graph::make(n, e)->first;
      if (!g.at_least_trivalent()) continue;
      auto rep = canonical_search(g).rep;
      if (seen.insert(rep).second) out.push_back(rep);
    }
  }
  return out;
}

InvariantGraphSum parse_graph_file(std::string_view text) {
  InvariantGraphSum out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = raw.substr(0, raw.find('#'));
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    Rational c = 1;
    std::size_t body = b;
    if (const auto star = line.find('*'); star != std::string::npos) {
      try {
        std::string coef = line.substr(b, star - b);
        coef.erase(coef.find_last_not_of(" \t") + 1);
        c = parse_rational(coef);
      } catch (const std::exception&) {
        throw ParseError("bad coefficient", lineNo, static_cast<int>(b) + 1);
      }
      body = star + 1;
    }
    const SignedGraph g = parse_graph(line.substr(body), lineNo);
    if (g.sign != 0) out += symmetrize(g.graph) * (c * g.sign);
  }
  return out;
}

}  // namespace tpoly
