#include "tpoly/graded.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace tpoly {

namespace {

constexpr int kNoValuation = std::numeric_limits<int>::max() / 4;

using Accumulator = std::unordered_map<Monomial, Rational, MonomialHash>;

void keep_minimal(std::vector<DegreePair>& pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<DegreePair> out;
  for (const auto& p : pts) {
    bool dominated = false;
    for (const auto& q : out) {
      if (q.below_or_equal(p)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(p);
  }
  pts = std::move(out);
}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in 1.." + std::to_string(kMaxDim));
  }
}

}  // namespace

// ---------------------------------------------------------------- Monomial

std::strong_ordering Monomial::operator<=>(const Monomial& o) const {
  const int ta = x_degree() + y_degree() + odd_degree();
  const int tb = o.x_degree() + o.y_degree() + o.odd_degree();
  if (ta != tb) return ta <=> tb;
  if (x != o.x) return o.x <=> x;
  if (y != o.y) return o.y <=> y;
  return odd <=> o.odd;
}

int Monomial::x_degree() const {
  int s = 0;
  for (auto e : x) s += e;
  return s;
}
int Monomial::y_degree() const {
  int s = 0;
  for (auto e : y) s += e;
  return s;
}
int Monomial::psi_degree() const { return std::popcount(static_cast<unsigned>(odd & 0xFFu)); }
int Monomial::eta_degree() const { return std::popcount(static_cast<unsigned>(odd >> 8)); }
int Monomial::odd_degree() const { return std::popcount(static_cast<unsigned>(odd)); }

// ---------------------------------------------------------------- Policy

void TruncationPolicy::validate() const {
  if (yOrder < 0 || xOrder < 0 || yOrder > kMaxOrder || xOrder > kMaxOrder) {
    throw std::invalid_argument("truncation orders must lie in 0.." + std::to_string(kMaxOrder));
  }
}

TruncationPolicy TruncationPolicy::meet(const TruncationPolicy& a, const TruncationPolicy& b) {
  return {std::min(a.yOrder, b.yOrder), std::min(a.xOrder, b.xOrder)};
}

// ---------------------------------------------------------------- Precision

bool Precision::is_known(int ydeg, int xdeg) const {
  for (const auto& c : corners_) {
    if (c.y <= ydeg && c.x <= xdeg) return false;
  }
  return true;
}

void Precision::add_corner(DegreePair c) {
  c.y = std::max(c.y, 0);
  c.x = std::max(c.x, 0);
  corners_.push_back(c);
  keep_minimal(corners_);
}

void Precision::merge(const Precision& other) {
  if (other.corners_.empty()) return;
  corners_.insert(corners_.end(), other.corners_.begin(), other.corners_.end());
  keep_minimal(corners_);
}

Precision Precision::shifted(int dy, int dx) const {
  Precision p;
  for (const auto& c : corners_) p.corners_.push_back({std::max(c.y + dy, 0), std::max(c.x + dx, 0)});
  keep_minimal(p.corners_);
  return p;
}

Precision Precision::y_free_part() const {
  Precision p;
  for (const auto& c : corners_) {
    if (c.y == 0) p.corners_.push_back(c);
  }
  return p;
}

Precision Precision::product(const Precision& pa, const std::vector<DegreePair>& minSupportA,
                             const Precision& pb, const std::vector<DegreePair>& minSupportB) {
  Precision out;
  for (const auto& c : pa.corners_) {
    for (const auto& s : minSupportB) out.corners_.push_back({c.y + s.y, c.x + s.x});
    for (const auto& e : pb.corners_) out.corners_.push_back({c.y + e.y, c.x + e.x});
  }
  for (const auto& c : pb.corners_) {
    for (const auto& s : minSupportA) out.corners_.push_back({c.y + s.y, c.x + s.x});
  }
  keep_minimal(out.corners_);
  return out;
}

std::string Precision::to_string() const {
  if (corners_.empty()) return "exact";
  std::ostringstream os;
  os << "unknown at";
  for (const auto& c : corners_) os << " (y>=" << c.y << ",x>=" << c.x << ")";
  return os.str();
}

// ---------------------------------------------------------------- GradedElement

GradedElement::GradedElement(int dim, TruncationPolicy policy) : dim_(dim), policy_(policy) {
  check_dim(dim);
  policy.validate();
}

GradedElement GradedElement::constant(int dim, TruncationPolicy policy, const Rational& c) {
  GradedElement e(dim, policy);
  e.add_term(Monomial{}, c);
  return e;
}

GradedElement GradedElement::generator(int dim, TruncationPolicy policy, GeneratorId g) {
  if (g.index < 1 || g.index > dim) {
    throw std::invalid_argument("generator index " + std::to_string(g.index) +
                                " out of range for dimension " + std::to_string(dim));
  }
  Monomial m;
  switch (g.kind) {
    case GenKind::X: m.x[g.index - 1] = 1; break;
    case GenKind::Y: m.y[g.index - 1] = 1; break;
    default: m.odd = static_cast<std::uint16_t>(1u << odd_bit(g)); break;
  }
  return monomial(dim, policy, m);
}

GradedElement GradedElement::monomial(int dim, TruncationPolicy policy, const Monomial& m,
                                      const Rational& c) {
  GradedElement e(dim, policy);
  e.add_term(m, c);
  return e;
}

void GradedElement::add_term(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  if (!policy_.admits(m)) {
    precision_.add_corner({m.y_degree(), m.x_degree()});
    return;
  }
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::optional<int> GradedElement::degree() const {
  if (terms_.empty()) return std::nullopt;
  int d = terms_.begin()->first.odd_degree();
  for (const auto& [m, c] : terms_) {
    if (m.odd_degree() != d) return std::nullopt;
  }
  return d;
}

int GradedElement::min_degree() const {
  int d = 2 * kMaxDim + 1;
  for (const auto& [m, c] : terms_) d = std::min(d, m.odd_degree());
  return d;
}

int GradedElement::max_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.odd_degree());
  return d;
}

GradedElement GradedElement::homogeneous_part(int oddDegree) const {
  GradedElement out(dim_, policy_);
  out.precision_ = precision_;
  for (const auto& [m, c] : terms_) {
    if (m.odd_degree() == oddDegree) out.terms_.emplace(m, c);
  }
  return out;
}

std::vector<GradedElement> GradedElement::homogeneous_parts() const {
  std::vector<GradedElement> parts;
  if (terms_.empty()) return parts;
  for (int k = min_degree(); k <= max_degree(); ++k) {
    auto p = homogeneous_part(k);
    if (!p.is_zero()) parts.push_back(std::move(p));
  }
  return parts;
}

std::vector<DegreePair> GradedElement::minimal_support() const {
  std::vector<DegreePair> pts;
  pts.reserve(16);
  for (const auto& [m, c] : terms_) {
    DegreePair p{m.y_degree(), m.x_degree()};
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
  }
  keep_minimal(pts);
  return pts;
}

int GradedElement::y_valuation() const {
  int v = kNoValuation;
  for (const auto& [m, c] : terms_) v = std::min(v, m.y_degree());
  return v;
}

GradedElement GradedElement::truncated(TruncationPolicy p) const {
  GradedElement out(dim_, TruncationPolicy::meet(p, policy_));
  out.precision_ = precision_;
  for (const auto& [m, c] : terms_) out.add_term(m, c);
  return out;
}

void GradedElement::check_compatible(const GradedElement& o) const {
  if (dim_ != o.dim_) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(dim_) + " vs " +
                                std::to_string(o.dim_));
  }
}

GradedElement& GradedElement::operator+=(const GradedElement& o) {
  if (dim_ == 0) {
    *this = o;
    return *this;
  }
  if (o.dim_ == 0) return *this;
  check_compatible(o);
  if (o.policy_ != policy_) {
    auto p = TruncationPolicy::meet(policy_, o.policy_);
    if (p != policy_) *this = truncated(p);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
  } else {
    for (const auto& [m, c] : o.terms_) {
      auto [it, inserted] = terms_.try_emplace(m, c);
      if (!inserted) {
        it->second += c;
        if (sgn(it->second) == 0) terms_.erase(it);
      }
    }
  }
  precision_.merge(o.precision_);
  return *this;
}

GradedElement& GradedElement::operator-=(const GradedElement& o) { return *this += -o; }

GradedElement& GradedElement::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

GradedElement GradedElement::operator-() const {
  GradedElement out = *this;
  for (auto& [m, v] : out.terms_) v = -v;
  return out;
}

bool is_zero_mod_truncation(const GradedElement& a) {
  for (const auto& [m, c] : a.terms()) {
    if (a.precision().is_known(m.y_degree(), m.x_degree())) return false;
  }
  return true;
}

bool equal_mod_truncation(const GradedElement& a, const GradedElement& b) {
  return is_zero_mod_truncation(a - b);
}

// ---------------------------------------------------------------- products

int odd_product_sign(std::uint16_t a, std::uint16_t b) {
  if (a & b) return 0;
  int inversions = 0;
  for (std::uint32_t rest = b; rest != 0; rest &= rest - 1) {
    int q = std::countr_zero(rest);
    inversions += std::popcount(static_cast<unsigned>(a >> (q + 1)));
  }
  return (inversions & 1) ? -1 : 1;
}

GradedElement multiply(const GradedElement& a, const GradedElement& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
  }
  const auto policy = TruncationPolicy::meet(a.policy(), b.policy());
  GradedElement out(a.dim(), policy);
  out.set_precision(Precision::product(a.precision(), a.minimal_support(), b.precision(),
                                       b.minimal_support()));
  if (a.is_zero() || b.is_zero()) return out;

  // Bucket b by (y-degree, x-degree) so hopeless pairs are skipped wholesale.
  struct Entry {
    const Monomial* m;
    const Rational* c;
  };
  std::map<DegreePair, std::vector<Entry>> buckets;
  for (const auto& [m, c] : b.terms()) buckets[{m.y_degree(), m.x_degree()}].push_back({&m, &c});
  std::map<DegreePair, std::vector<Entry>> abuckets;
  for (const auto& [m, c] : a.terms()) abuckets[{m.y_degree(), m.x_degree()}].push_back({&m, &c});

  Precision dropped;
  Accumulator acc;
  acc.reserve(a.size() + b.size());
  Rational prod;
  for (const auto& [da, aEntries] : abuckets) {
    for (const auto& [db, bEntries] : buckets) {
      if (da.y + db.y > policy.yOrder || da.x + db.x > policy.xOrder) {
        dropped.add_corner({da.y + db.y, da.x + db.x});
        continue;
      }
      for (const auto& ea : aEntries) {
        for (const auto& eb : bEntries) {
          const int s = odd_product_sign(ea.m->odd, eb.m->odd);
          if (s == 0) continue;
          Monomial m;
          for (int i = 0; i < kMaxDim; ++i) {
            m.x[i] = static_cast<std::uint8_t>(ea.m->x[i] + eb.m->x[i]);
            m.y[i] = static_cast<std::uint8_t>(ea.m->y[i] + eb.m->y[i]);
          }
          m.odd = static_cast<std::uint16_t>(ea.m->odd | eb.m->odd);
          mpq_mul(prod.get_mpq_t(), ea.c->get_mpq_t(), eb.c->get_mpq_t());
          if (s < 0) mpq_neg(prod.get_mpq_t(), prod.get_mpq_t());
          auto [it, inserted] = acc.try_emplace(m, prod);
          if (!inserted) it->second += prod;
        }
      }
    }
  }
  for (auto& [m, c] : acc) {
    if (sgn(c) != 0) out.add_term(m, c);
  }
  out.add_precision(dropped);
  return out;
}

GradedElement derive(GeneratorId gen, const GradedElement& a) {
  if (gen.index < 1 || gen.index > a.dim()) {
    throw std::invalid_argument("generator index out of range");
  }
  GradedElement out(a.dim(), a.policy());
  const int i = gen.index - 1;
  switch (gen.kind) {
    case GenKind::X:
    case GenKind::Y: {
      const bool isX = gen.kind == GenKind::X;
      out.set_precision(isX ? a.precision().shifted(0, -1) : a.precision().shifted(-1, 0));
      for (const auto& [m, c] : a.terms()) {
        const int e = isX ? m.x[i] : m.y[i];
        if (e == 0) continue;
        Monomial n = m;
        (isX ? n.x[i] : n.y[i]) = static_cast<std::uint8_t>(e - 1);
        out.add_term(n, c * e);
      }
      break;
    }
    default: {
      out.set_precision(a.precision());
      const int bit = odd_bit(gen);
      const std::uint16_t mask = static_cast<std::uint16_t>(1u << bit);
      for (const auto& [m, c] : a.terms()) {
        if (!(m.odd & mask)) continue;
        Monomial n = m;
        n.odd = static_cast<std::uint16_t>(m.odd & ~mask);
        const int before = std::popcount(static_cast<unsigned>(m.odd & (mask - 1)));
        out.add_term(n, (before & 1) ? Rational(-c) : c);
      }
      break;
    }
  }
  return out;
}

GradedElement multiply_generator(GeneratorId gen, const GradedElement& a) {
  if (gen.index < 1 || gen.index > a.dim()) {
    throw std::invalid_argument("generator index out of range");
  }
  GradedElement out(a.dim(), a.policy());
  const int i = gen.index - 1;
  switch (gen.kind) {
    case GenKind::X:
      out.set_precision(a.precision().shifted(0, 1));
      break;
    case GenKind::Y:
      out.set_precision(a.precision().shifted(1, 0));
      break;
    default:
      out.set_precision(a.precision());
      break;
  }
  for (const auto& [m, c] : a.terms()) {
    Monomial n = m;
    if (gen.kind == GenKind::X) {
      n.x[i]++;
      out.add_term(n, c);
    } else if (gen.kind == GenKind::Y) {
      n.y[i]++;
      out.add_term(n, c);
    } else {
      const std::uint16_t mask = static_cast<std::uint16_t>(1u << odd_bit(gen));
      const int s = odd_product_sign(mask, m.odd);
      if (s == 0) continue;
      n.odd = static_cast<std::uint16_t>(m.odd | mask);
      out.add_term(n, s > 0 ? c : Rational(-c));
    }
  }
  return out;
}

// ---------------------------------------------------------------- linear substitution

RationalMatrix identity_matrix(int d) {
  RationalMatrix m(d, std::vector<Rational>(d, 0));
  for (int i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

RationalMatrix inverse(const RationalMatrix& m) {
  const int n = static_cast<int>(m.size());
  RationalMatrix a = m;
  RationalMatrix inv = identity_matrix(n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (sgn(a[r][col]) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::invalid_argument("singular matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational p = a[col][col];
    for (int c = 0; c < n; ++c) {
      a[col][c] /= p;
      inv[col][c] /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col];
      for (int c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

RationalMatrix matmul(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  RationalMatrix c(n, std::vector<Rational>(b.empty() ? 0 : b[0].size(), 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < c[i].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

GradedElement substitute_linear(const GradedElement& a, const RationalMatrix& m) {
  const int d = a.dim();
  if (static_cast<int>(m.size()) != d) throw std::invalid_argument("matrix size mismatch");
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != d) throw std::invalid_argument("matrix size mismatch");
  }
  const RationalMatrix minv = inverse(m);
  const auto pol = a.policy();

  // Images of the generators.
  std::vector<GradedElement> ximg, yimg, pimg, eimg;
  for (int i = 1; i <= d; ++i) {
    GradedElement xi(d, pol), yi(d, pol), pi(d, pol), ei(d, pol);
    for (int j = 1; j <= d; ++j) {
      const Rational& mij = m[i - 1][j - 1];
      if (sgn(mij) != 0) {
        xi += GradedElement::generator(d, pol, X(j)) * mij;
        yi += GradedElement::generator(d, pol, Y(j)) * mij;
        ei += GradedElement::generator(d, pol, Eta(j)) * mij;
      }
      const Rational& cji = minv[j - 1][i - 1];
      if (sgn(cji) != 0) pi += GradedElement::generator(d, pol, Psi(j)) * cji;
    }
    ximg.push_back(std::move(xi));
    yimg.push_back(std::move(yi));
    pimg.push_back(std::move(pi));
    eimg.push_back(std::move(ei));
  }

  GradedElement out(d, pol);
  out.set_precision(a.precision());
  for (const auto& [mono, c] : a.terms()) {
    GradedElement t = GradedElement::constant(d, pol, c);
    for (int i = 0; i < d; ++i) {
      for (int e = 0; e < mono.x[i]; ++e) t = multiply(t, ximg[i]);
      for (int e = 0; e < mono.y[i]; ++e) t = multiply(t, yimg[i]);
    }
    for (int i = 0; i < d; ++i) {
      if (mono.odd & (1u << i)) t = multiply(t, pimg[i]);
    }
    for (int i = 0; i < d; ++i) {
      if (mono.odd & (1u << (8 + i))) t = multiply(t, eimg[i]);
    }
    out += t;
  }
  return out;
}

// ---------------------------------------------------------------- text format

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  Rational q;
  if (q.set_str(std::string(text), 10) != 0) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
  q.canonicalize();
  return q;
}

namespace {

std::string format_monomial(const Monomial& m, int dim) {
  std::string s;
  auto add = [&s](const std::string& f) {
    if (!s.empty()) s += ' ';
    s += f;
  };
  for (int i = 0; i < dim; ++i) {
    if (m.x[i] == 1) add("x" + std::to_string(i + 1));
    if (m.x[i] > 1) add("x" + std::to_string(i + 1) + "^" + std::to_string(m.x[i]));
  }
  for (int i = 0; i < dim; ++i) {
    if (m.y[i] == 1) add("y" + std::to_string(i + 1));
    if (m.y[i] > 1) add("y" + std::to_string(i + 1) + "^" + std::to_string(m.y[i]));
  }
  for (int i = 0; i < dim; ++i) {
    if (m.odd & (1u << i)) add("p" + std::to_string(i + 1));
  }
  for (int i = 0; i < dim; ++i) {
    if (m.odd & (1u << (8 + i))) add("e" + std::to_string(i + 1));
  }
  return s;
}

class ElementParser {
 public:
  ElementParser(std::string_view text, int dim, TruncationPolicy policy, int line)
      : text_(text), dim_(dim), policy_(policy), line_(line) {}

  GradedElement parse() {
    GradedElement out(dim_, policy_);
    skip_ws();
    if (at_end()) fail("empty expression");
    bool first = true;
    while (!at_end()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-' between terms");
      }
      first = false;
      parse_term(out, sign);
      skip_ws();
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
  }

  std::string read_digits() {
    std::string s;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) s += text_[pos_++];
    return s;
  }

  void parse_term(GradedElement& out, int sign) {
    Rational coef = sign;
    bool sawCoefficient = false;
    bool sawFactor = false;
    if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      std::string num = read_digits();
      if (!at_end() && peek() == '/') {
        ++pos_;
        std::string den = read_digits();
        if (den.empty()) fail("expected denominator");
        if (den.find_first_not_of('0') == std::string::npos) fail("zero denominator");
        num += "/" + den;
      }
      coef *= parse_rational(num);
      sawCoefficient = true;
      skip_ws();
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip_ws();
        if (at_end() || !std::isalpha(static_cast<unsigned char>(peek())))
          fail("expected factor after '*'");
      }
    }
    Monomial m;
    int sgnOdd = 1;
    while (!at_end()) {
      skip_ws();
      if (at_end()) break;
      char c = peek();
      if (c == '*') {
        ++pos_;
        skip_ws();
        continue;
      }
      if (c == '+' || c == '-') break;
      if (c != 'x' && c != 'y' && c != 'p' && c != 'e') fail(std::string("unexpected character '") + c + "'");
      ++pos_;
      std::string idx = read_digits();
      if (idx.empty()) fail("expected generator index");
      int i = std::stoi(idx);
      if (i < 1 || i > dim_) fail("generator index " + idx + " out of range");
      int exponent = 1;
      if (!at_end() && peek() == '^') {
        ++pos_;
        std::string e = read_digits();
        if (e.empty()) fail("expected exponent");
        exponent = std::stoi(e);
        if (exponent > 255) fail("exponent too large");
      }
      if (c == 'x' || c == 'y') {
        auto& arr = (c == 'x') ? m.x : m.y;
        if (arr[i - 1] + exponent > 255) fail("exponent too large");
        arr[i - 1] = static_cast<std::uint8_t>(arr[i - 1] + exponent);
      } else {
        const std::uint16_t bit = static_cast<std::uint16_t>(1u << (c == 'p' ? i - 1 : 8 + i - 1));
        for (int k = 0; k < exponent; ++k) {
          const int s = odd_product_sign(m.odd, bit);
          if (s == 0) {
            sgnOdd = 0;
          } else {
            sgnOdd *= s;
            m.odd = static_cast<std::uint16_t>(m.odd | bit);
          }
        }
      }
      sawFactor = true;
    }
    if (!sawCoefficient && !sawFactor) fail("expected a term");
    if (sgnOdd != 0) out.add_term(m, coef * sgnOdd);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;
  TruncationPolicy policy_;
  int line_;
};

}  // namespace

std::string serialize(const GradedElement& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    const bool negative = sgn(c) < 0;
    const Rational mag = abs(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (m.is_unit()) {
      out += format_rational(mag);
    } else if (mag == 1) {
      out += format_monomial(m, a.dim());
    } else {
      out += format_rational(mag) + " * " + format_monomial(m, a.dim());
    }
  }
  return out;
}

GradedElement parse_element(std::string_view text, int dim, TruncationPolicy policy, int line) {
  return ElementParser(text, dim, policy, line).parse();
}

}  // namespace tpoly
