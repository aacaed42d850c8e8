#pragma once

// The operad Gra of undirected graphs with numbered vertices and (odd) numbered edges,
// and the graph complex fGC_2 of its coinvariants with bracket and differential [MC,-].

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpoly/graded.hpp"

namespace tpoly {

inline constexpr int kMaxGraphVertices = 9;

/// A graph in canonical edge order. Vertices are 0-based internally and 1-based in text.
class Graph {
 public:
  using Edge = std::pair<std::uint8_t, std::uint8_t>;  // first < second

  Graph() = default;
  /// Graph without edges on n vertices.
  explicit Graph(int n);

  /// Canonicalizes the given (ordered) edge list. Returns the graph and the sign of the
  /// sorting permutation, or nullopt if an edge repeats (the graph is zero).
  static std::optional<std::pair<Graph, int>> make(int n, const std::vector<std::pair<int, int>>& edges);
  /// As make() but throws if the result is zero.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  static Graph unit() { return Graph(1); }
  /// Two vertices joined by one edge.
  static Graph mc();
  static Graph complete(int n);

  int vertices() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  /// 2(n-1) - k
  int degree() const { return 2 * (n_ - 1) - edge_count(); }
  int valence(int v) const;
  bool at_least_trivalent() const;

  auto operator<=>(const Graph&) const = default;

  /// `n=4; edges=(1,2),(1,3)` with 1-based vertices in canonical order.
  std::string to_string() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

struct SignedGraph {
  Graph graph;
  int sign = 1;  // 0 if the input canonicalized to zero
};

/// Parses `n=<int>; edges=(i,j),(k,l),...` (1-based, listed order). The sign records the
/// canonicalization; sign 0 means the graph is zero (repeated edge).
SignedGraph parse_graph(std::string_view text, int line = 1);

/// Relabels vertex v as perm[v] and canonicalizes; returns (graph, sign).
std::pair<Graph, int> relabel(const Graph& g, const std::vector<int>& perm);

/// Linear combination of graphs.
class GraphSum {
 public:
  using Terms = std::map<Graph, Rational>;

  GraphSum() = default;
  explicit GraphSum(const Graph& g, const Rational& c = 1) { add(g, c); }

  void add(const Graph& g, const Rational& c);
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Common degree if all terms agree.
  std::optional<int> degree() const;
  /// Common vertex count if all terms agree.
  std::optional<int> arity() const;

  GraphSum& operator+=(const GraphSum& o);
  GraphSum& operator-=(const GraphSum& o);
  GraphSum& operator*=(const Rational& c);
  friend GraphSum operator+(GraphSum a, const GraphSum& b) { return a += b; }
  friend GraphSum operator-(GraphSum a, const GraphSum& b) { return a -= b; }
  friend GraphSum operator*(GraphSum a, const Rational& c) { return a *= c; }
  friend GraphSum operator*(const Rational& c, GraphSum a) { return a *= c; }
  bool operator==(const GraphSum&) const = default;

  std::string to_string() const;

 private:
  Terms terms_;
};

/// Partial composition g1 o_i g2 (i is 1-based): g2 replaces vertex i, its vertices take the
/// labels i..i+n2-1, later vertices of g1 shift up by n2-1. The edges that met vertex i are
/// reconnected to every vertex of g2 in all possible ways; edges of g1 keep their order and
/// the edges of g2 are appended.
GraphSum compose(const Graph& g1, int i, const Graph& g2);
GraphSum compose(const GraphSum& g1, int i, const GraphSum& g2);

/// Canonical representative of the isomorphism class: (rep, sign) with g = sign * sigma(rep)
/// for some relabeling sigma, or nullopt if g has an automorphism acting by an odd edge
/// permutation (then g is zero in coinvariants).
std::optional<std::pair<Graph, int>> canonical_form(const Graph& g);

/// Element of fGC_2: a combination of canonical representatives. The coefficient c of rep r
/// stands for c times the average of r over all vertex relabelings.
class InvariantGraphSum {
 public:
  InvariantGraphSum() = default;

  const GraphSum& representatives() const { return reps_; }
  bool is_zero() const { return reps_.is_zero(); }
  std::optional<int> degree() const { return reps_.degree(); }
  /// Every graph at least trivalent.
  bool in_gc2() const;

  /// Expands to the full symmetric average (size n! per term; for small graphs).
  GraphSum expand() const;

  InvariantGraphSum& operator+=(const InvariantGraphSum& o);
  InvariantGraphSum& operator-=(const InvariantGraphSum& o);
  InvariantGraphSum& operator*=(const Rational& c);
  friend InvariantGraphSum operator+(InvariantGraphSum a, const InvariantGraphSum& b) { return a += b; }
  friend InvariantGraphSum operator-(InvariantGraphSum a, const InvariantGraphSum& b) { return a -= b; }
  friend InvariantGraphSum operator*(InvariantGraphSum a, const Rational& c) { return a *= c; }
  bool operator==(const InvariantGraphSum&) const = default;

  std::string to_string() const { return reps_.to_string(); }

 private:
  friend InvariantGraphSum symmetrize(const GraphSum& g);
  GraphSum reps_;
};

InvariantGraphSum symmetrize(const GraphSum& g);
inline InvariantGraphSum symmetrize(const Graph& g) { return symmetrize(GraphSum(g)); }

/// sum_i a o_i b, on representatives (well defined on coinvariants).
GraphSum insertion_sum(const GraphSum& a, const GraphSum& b);

/// [a,b] = sum a o_i b - (-1)^{|a||b|} sum b o_i a, extended bilinearly over degrees.
InvariantGraphSum lie_bracket(const InvariantGraphSum& a, const InvariantGraphSum& b);

/// The class of the one-edge graph.
InvariantGraphSum mc_element();

/// [MC, a]
InvariantGraphSum differential(const InvariantGraphSum& a);

/// One term per line, `[<coef> *] n=<int>; edges=...`; '#' starts a comment. Terms are symmetrized.
InvariantGraphSum parse_graph_file(std::string_view text);

/// Representatives of all at-least-trivalent simple graphs with up to maxVertices vertices,
/// one per isomorphism class, including those that vanish in coinvariants.
std::vector<Graph> trivalent_graphs(int maxVertices);

}  // namespace tpoly
