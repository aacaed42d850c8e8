#pragma once

// Exact sparse arithmetic in the graded-commutative algebra
//   Q[x^1..x^d] (x) Q[[y^1..y^d]] (x) Lambda[psi_1..psi_d] (x) Lambda[eta^1..eta^d]
// with Koszul signs, truncation, and tracked precision.
//
// Every element carries a TruncationPolicy (terms beyond yOrder / xOrder are never
// stored) and a Precision: the up-set of (y-degree, x-degree) pairs whose
// coefficients may be wrong because something was dropped upstream. Derivatives
// move that set down, products move it up, so "equal mod truncation" is decided by
// comparing only the coefficients outside it.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace tpoly {

using Rational = mpq_class;

inline constexpr int kMaxDim = 6;
inline constexpr int kMaxOrder = 40;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class GenKind : std::uint8_t { X, Y, Psi, Eta };

struct GeneratorId {
  GenKind kind;
  int index;  // 1-based, 1..d

  bool is_odd() const { return kind == GenKind::Psi || kind == GenKind::Eta; }
  int degree() const { return is_odd() ? 1 : 0; }
};

inline GeneratorId X(int i) { return {GenKind::X, i}; }
inline GeneratorId Y(int i) { return {GenKind::Y, i}; }
inline GeneratorId Psi(int i) { return {GenKind::Psi, i}; }
inline GeneratorId Eta(int i) { return {GenKind::Eta, i}; }

/// Odd generators live in one bit mask ordered psi_1 < ... < psi_6 < eta_1 < ... < eta_6,
/// which is the canonical order used for signs.
constexpr int odd_bit(GeneratorId g) {
  return g.kind == GenKind::Psi ? g.index - 1 : 8 + g.index - 1;
}

struct Monomial {
  std::array<std::uint8_t, kMaxDim> x{};
  std::array<std::uint8_t, kMaxDim> y{};
  std::uint16_t odd = 0;

  bool operator==(const Monomial&) const = default;
  /// Canonical order: total degree first, then larger x / y exponents earlier, then odd mask.
  std::strong_ordering operator<=>(const Monomial& o) const;

  int x_degree() const;
  int y_degree() const;
  int psi_degree() const;
  int eta_degree() const;
  int odd_degree() const;
  bool is_unit() const { return *this == Monomial{}; }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    for (auto e : m.x) mix(e);
    for (auto e : m.y) mix(e + 64);
    mix(m.odd);
    return static_cast<std::size_t>(h);
  }
};

struct TruncationPolicy {
  int yOrder = 4;
  int xOrder = 3;

  auto operator<=>(const TruncationPolicy&) const = default;

  void validate() const;
  bool admits(const Monomial& m) const {
    return m.y_degree() <= yOrder && m.x_degree() <= xOrder;
  }
  static TruncationPolicy meet(const TruncationPolicy& a, const TruncationPolicy& b);
};

struct DegreePair {
  int y = 0;
  int x = 0;
  auto operator<=>(const DegreePair&) const = default;
  bool below_or_equal(const DegreePair& o) const { return y <= o.y && x <= o.x; }
};

/// Up-set in the (y-degree, x-degree) lattice, stored by its minimal corners.
/// Coefficients of monomials whose degree pair lies in the set are not trusted.
class Precision {
 public:
  static Precision exact() { return {}; }

  bool is_exact() const { return corners_.empty(); }
  const std::vector<DegreePair>& corners() const { return corners_; }

  bool is_known(int ydeg, int xdeg) const;
  void add_corner(DegreePair c);
  void merge(const Precision& other);
  Precision shifted(int dy, int dx) const;
  /// Restrict to the y = 0 column (used by projections onto y-free elements).
  Precision y_free_part() const;

  /// Error set of a product a*b: errors of a times support of b, and vice versa.
  static Precision product(const Precision& pa, const std::vector<DegreePair>& minSupportA,
                           const Precision& pb, const std::vector<DegreePair>& minSupportB);

  bool operator==(const Precision&) const = default;
  std::string to_string() const;

 private:
  std::vector<DegreePair> corners_;
};

class GradedElement {
 public:
  using Terms = std::map<Monomial, Rational>;

  GradedElement() = default;
  GradedElement(int dim, TruncationPolicy policy);

  static GradedElement constant(int dim, TruncationPolicy policy, const Rational& c);
  static GradedElement generator(int dim, TruncationPolicy policy, GeneratorId g);
  static GradedElement monomial(int dim, TruncationPolicy policy, const Monomial& m,
                                const Rational& c = 1);

  int dim() const { return dim_; }
  const TruncationPolicy& policy() const { return policy_; }
  const Precision& precision() const { return precision_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds c*m, dropping it (and recording the loss) when m is outside the policy.
  void add_term(const Monomial& m, const Rational& c);
  void add_precision(const Precision& p) { precision_.merge(p); }
  void set_precision(Precision p) { precision_ = std::move(p); }

  /// Odd degree (|psi| + |eta|) if all terms agree; the zero element has no degree.
  std::optional<int> degree() const;
  int min_degree() const;
  int max_degree() const;
  GradedElement homogeneous_part(int oddDegree) const;
  std::vector<GradedElement> homogeneous_parts() const;

  /// Pareto-minimal (y-degree, x-degree) pairs of the support.
  std::vector<DegreePair> minimal_support() const;
  /// Least y-degree over the support; large sentinel for zero.
  int y_valuation() const;

  GradedElement truncated(TruncationPolicy p) const;

  GradedElement& operator+=(const GradedElement& o);
  GradedElement& operator-=(const GradedElement& o);
  GradedElement& operator*=(const Rational& c);
  GradedElement operator-() const;

  friend GradedElement operator+(GradedElement a, const GradedElement& b) { return a += b; }
  friend GradedElement operator-(GradedElement a, const GradedElement& b) { return a -= b; }
  friend GradedElement operator*(GradedElement a, const Rational& c) { return a *= c; }
  friend GradedElement operator*(const Rational& c, GradedElement a) { return a *= c; }

  /// Structural equality of the stored terms (ignores precision).
  bool same_terms(const GradedElement& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

 private:
  void check_compatible(const GradedElement& o) const;

  int dim_ = 0;
  TruncationPolicy policy_{};
  Precision precision_{};
  Terms terms_;
};

/// a == b on every coefficient both sides know exactly.
bool equal_mod_truncation(const GradedElement& a, const GradedElement& b);
/// True if every coefficient outside the error set is zero.
bool is_zero_mod_truncation(const GradedElement& a);

/// Sign (+1/-1) of the product of two odd masks in canonical order, 0 if they overlap.
int odd_product_sign(std::uint16_t a, std::uint16_t b);

GradedElement multiply(const GradedElement& a, const GradedElement& b);

/// Left graded derivation d/d(gen). Odd generators pick up (-1)^(#odd factors before gen).
GradedElement derive(GeneratorId gen, const GradedElement& a);

/// Left multiplication by a single generator, kept in canonical order.
GradedElement multiply_generator(GeneratorId gen, const GradedElement& a);

using RationalMatrix = std::vector<std::vector<Rational>>;

RationalMatrix identity_matrix(int d);
RationalMatrix inverse(const RationalMatrix& m);  // throws std::invalid_argument if singular
RationalMatrix matmul(const RationalMatrix& a, const RationalMatrix& b);

/// x -> Mx, y -> My, eta -> M eta, psi -> M^{-T} psi (contragredient).
GradedElement substitute_linear(const GradedElement& a, const RationalMatrix& m);

/// Textual interchange format, e.g. "1/2 * x1^2 y1 p1 e2 - y2 + 3".
std::string serialize(const GradedElement& a);
GradedElement parse_element(std::string_view text, int dim, TruncationPolicy policy,
                            int line = 1);

std::string format_rational(const Rational& q);
Rational parse_rational(std::string_view text);

}  // namespace tpoly
