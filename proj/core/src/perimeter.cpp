#include "magfrac/perimeter.hpp"

#include <stdexcept>

namespace magfrac {

namespace {

EnergyResult half_indicator_energy(const ShapeSet& E, const MagneticPotential& A,
                                   const Domain& omega, double s, const QuadratureSpec& q) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("fractional perimeter: s must be in (0, 1)");
  ComplexField u = ComplexField::indicator(omega, E);
  EnergyResult r = fractional_magnetic_energy(u, A, omega, s, 1.0, q);
  r.value *= 0.5;
  r.est_error *= 0.5;
  return r;
}

}  // namespace

EnergyResult classical_fractional_perimeter(const ShapeSet& E, const Domain& omega, double s,
                                            const QuadratureSpec& q) {
  return half_indicator_energy(E, MagneticPotential::zero(omega.dim()), omega, s, q);
}

EnergyResult magnetic_fractional_perimeter(const ShapeSet& E, const MagneticPotential& A,
                                           const Domain& omega, double s,
                                           const QuadratureSpec& q) {
  return half_indicator_energy(E, A, omega, s, q);
}

double indicator_bv(const ShapeSet& E, const MagneticPotential& A, const Domain& omega) {
  double per = E.perimeter_in(omega);
  if (A.is_zero()) return per;
  double amass =
      integrate_over_shape(E, omega, [&](const Vec& x) { return A.value(x).norm(); });
  return per + amass;
}

}  // namespace magfrac
