#pragma once

#include "magfrac/functionals.hpp"
#include "magfrac/shapes.hpp"

namespace magfrac {

/// Classical fractional s-perimeter of E relative to omega:
/// integral_E integral_{omega \ E} |x-y|^{-N-s}.
EnergyResult classical_fractional_perimeter(const ShapeSet& E, const Domain& omega, double s,
                                            const QuadratureSpec& q = {});

/// Phase-modulated s-perimeter: half the p = 1 modulated double integral of
/// the indicator of E, i.e.
///   1/2 [ int_E int_E |1 - e^{i theta}|_1 + int_E int_{E^c} 1
///         + int_{E^c} int_E |e^{i theta}|_1 ] / |x-y|^{N+s}.
/// Reduces to the classical perimeter when A = 0.
EnergyResult magnetic_fractional_perimeter(const ShapeSet& E, const MagneticPotential& A,
                                           const Domain& omega, double s,
                                           const QuadratureSpec& q = {});

/// Total variation of the indicator: Per(E; omega) + integral_E |A|.
/// Uses the analytic perimeter for preset shapes and grid interface
/// measurement (jump counting / marching squares) for mask shapes.
double indicator_bv(const ShapeSet& E, const MagneticPotential& A, const Domain& omega);

}  // namespace magfrac
