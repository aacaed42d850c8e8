#pragma once

// Schouten brackets, the Koszul-type differential delta with its contracting homotopy,
// the projection sigma and the de Rham differential on vertical forms.

#include "tpoly/graded.hpp"

namespace tpoly {

/// True if the element only involves x and psi.
bool is_polyvector(const GradedElement& f);

/// (-1)^{|f|} df/dx^i dg/dpsi_i + (-1)^{|f||g|+|g|} dg/dx^i df/dpsi_i, extended bilinearly
/// over homogeneous parts. Throws std::invalid_argument on y or eta input.
GradedElement schouten_bracket(const GradedElement& f, const GradedElement& g);

/// Same formula with y in place of x; x and eta are inert coefficients.
GradedElement vertical_bracket(const GradedElement& f, const GradedElement& g);

/// delta = eta^i d/dy^i
GradedElement delta(const GradedElement& f);
/// Contracting homotopy, 1/(p+q) y^a d/deta^a on each (p,q) = (y-degree, eta-degree) piece.
GradedElement delta_star(const GradedElement& f);
/// Keep the part with no y and no eta.
GradedElement sigma(const GradedElement& f);
/// d = eta^i d/dx^i
GradedElement de_rham(const GradedElement& f);

/// Rename x^i -> y^i (the flat chart: a polyvector field on the fat point as a vertical one).
GradedElement rename_x_to_y(const GradedElement& f);
/// Rename y^i -> x^i on an element without x.
GradedElement rename_y_to_x(const GradedElement& f);

}  // namespace tpoly
