#include "tpoly/random.hpp"

#include <numeric>

namespace tpoly {

Rational Random::rational(int maxAbs) {
  Rational q(uniform(-maxAbs, maxAbs), uniform(1, 3));
  q.canonicalize();
  return q;
}

Rational Random::nonzero_rational(int maxAbs) {
  for (;;) {
    Rational q = rational(maxAbs);
    if (sgn(q) != 0) return q;
  }
}

Monomial Random::monomial(int dim, const ElementShape& shape) {
  Monomial m;
  if (shape.useX) {
    const int deg = uniform(0, shape.maxXDegree);
    for (int k = 0; k < deg; ++k) m.x[uniform(0, dim - 1)]++;
  }
  if (shape.useY) {
    const int deg = uniform(std::min(shape.minYDegree, shape.maxYDegree), shape.maxYDegree);
    for (int k = 0; k < deg; ++k) m.y[uniform(0, dim - 1)]++;
  }
  std::vector<int> slots;
  if (shape.usePsi)
    for (int i = 0; i < dim; ++i) slots.push_back(i);
  if (shape.useEta)
    for (int i = 0; i < dim; ++i) slots.push_back(8 + i);
  if (shape.oddDegree || shape.etaDegree) {
    std::vector<int> psiSlots, etaSlots;
    for (int s : slots) (s < 8 ? psiSlots : etaSlots).push_back(s);
    int etaDeg = shape.etaDegree ? *shape.etaDegree
                                 : uniform(0, std::min<int>(etaSlots.size(), shape.oddDegree.value_or(0)));
    int total = shape.oddDegree ? *shape.oddDegree : etaDeg + uniform(0, static_cast<int>(psiSlots.size()));
    int psiDeg = total - etaDeg;
    if (psiDeg < 0 || psiDeg > static_cast<int>(psiSlots.size()) ||
        etaDeg > static_cast<int>(etaSlots.size())) {
      etaDeg = std::min<int>(total, etaSlots.size());
      psiDeg = total - etaDeg;
    }
    std::shuffle(psiSlots.begin(), psiSlots.end(), eng_);
    std::shuffle(etaSlots.begin(), etaSlots.end(), eng_);
    for (int k = 0; k < psiDeg && k < static_cast<int>(psiSlots.size()); ++k) m.odd |= 1u << psiSlots[k];
    for (int k = 0; k < etaDeg; ++k) m.odd |= 1u << etaSlots[k];
  } else {
    for (int s : slots)
      if (uniform(0, 2) == 0) m.odd |= 1u << s;
  }
  return m;
}

GradedElement Random::element(int dim, TruncationPolicy policy, const ElementShape& shape) {
  GradedElement e(dim, policy);
  for (int t = 0; t < shape.terms; ++t) e.add_term(monomial(dim, shape), nonzero_rational(shape.maxCoefficient));
  return e;
}

RationalMatrix Random::invertible_matrix(int dim, int maxAbs) {
  for (;;) {
    RationalMatrix m(dim, std::vector<Rational>(dim));
    for (auto& row : m)
      for (auto& v : row) v = uniform(-maxAbs, maxAbs);
    try {
      inverse(m);
      return m;
    } catch (const std::invalid_argument&) {
    }
  }
}

}  // namespace tpoly
