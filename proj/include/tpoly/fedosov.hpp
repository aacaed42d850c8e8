#pragma once

// Fedosov resolution in one formal chart: the connection form Gamma, the curvature R,
// the Fedosov connection A solving R + nabla A + 1/2 [A,A] = delta A, the differential
// D = nabla - delta + [A,-], and the sections tau / sigma between D-cohomology and
// polyvector fields.

#include <map>
#include <string>
#include <tuple>

#include "tpoly/graded.hpp"

namespace tpoly {

/// Taylor jets of the Christoffel symbols Gamma^k_ij(x) of a torsion-free connection.
class ConnectionJet {
 public:
  ConnectionJet() = default;
  ConnectionJet(int dim, int xOrder);

  static ConnectionJet flat(int dim, int xOrder) { return ConnectionJet(dim, xOrder); }
  /// Lines `Gamma k i j : <polynomial in x>`; '#' starts a comment. The symmetric partner
  /// Gamma k j i is filled in; a conflicting explicit value is a ParseError.
  static ConnectionJet parse(std::string_view text, int dim, int xOrder);

  int dim() const { return dim_; }
  int x_order() const { return xOrder_; }
  /// Sets Gamma^k_ij = Gamma^k_ji = value (x-polynomial).
  void set(int k, int i, int j, const GradedElement& value);
  /// Gamma^k_ij as an x-polynomial (zero if unset).
  GradedElement christoffel(int k, int i, int j) const;
  bool is_flat() const { return entries_.empty(); }
  std::string to_string() const;

 private:
  int dim_ = 0;
  int xOrder_ = 0;
  std::map<std::tuple<int, int, int>, GradedElement> entries_;  // keys with i <= j
};

/// Gamma = -eta^i Gamma^k_ij(x) y^j psi_k
GradedElement gamma_form(const ConnectionJet& cj, TruncationPolicy policy);

/// R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik - Gamma^l_im Gamma^m_jk + Gamma^l_jm Gamma^m_ik,
/// the curvature of the connection as it acts on the fiber coordinates y. With this
/// orientation R = d Gamma + 1/2 [Gamma, Gamma]^vert.
GradedElement riemann_component(const ConnectionJet& cj, int l, int k, int i, int j, TruncationPolicy policy);

/// R = -1/2 eta^i eta^j R^l_kij(x) y^k psi_l
GradedElement curvature(const ConnectionJet& cj, TruncationPolicy policy);

/// nabla f = d f + [Gamma, f]
GradedElement nabla(const ConnectionJet& cj, const GradedElement& f);

struct FedosovData {
  ConnectionJet jet;
  TruncationPolicy policy;
  GradedElement gammaForm;
  GradedElement curvature;
  GradedElement aForm;
  /// B = Gamma + eta^i psi_i + A, so that D = d + [B,-].
  GradedElement bForm;
  int iterations = 0;
};

FedosovData solve_A(const ConnectionJet& cj, TruncationPolicy policy);

/// Residual R + nabla A + 1/2 [A,A] - delta A of the Fedosov equation.
GradedElement fedosov_residual(const FedosovData& fd);

/// D f = nabla f - delta f + [A, f]
GradedElement differential_D(const FedosovData& fd, const GradedElement& f);

/// The unique D-closed lift of a y- and eta-free element with sigma(tau f0) = f0.
GradedElement tau(const FedosovData& fd, const GradedElement& f0);

class NotACocycle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// g with sigma g = delta* g = 0 and D g = f, for a D-closed f of form degree >= 1.
GradedElement invert_exact(const FedosovData& fd, const GradedElement& f);

/// sigma [tau f0, tau g0]^vert == [f0, g0]^S mod truncation.
bool check_lemma4(const FedosovData& fd, const GradedElement& f0, const GradedElement& g0);

}  // namespace tpoly
