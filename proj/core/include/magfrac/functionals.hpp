#pragma once

#include <string>

#include "magfrac/fields.hpp"
#include "magfrac/kernels.hpp"

namespace magfrac {

/// Controls for the double-integral quadrature.
struct QuadratureSpec {
  int pair_rule_order = 4;       // tensor Gauss order per cell (near band and x-rule)
  int diagonal_refinement = 12;  // dyadic radial levels toward the diagonal
  double target_rel_tol = 1e-4;  // warn when est_error exceeds this times value
  int angular_nodes = 0;         // near-field sphere nodes; 0 picks a per-dim default
  int radial_order = 4;          // Gauss order per radial shell / octave
  int far_order_cutoff = 4;      // Chebyshev cell distance using the full order
  int far_mid_cutoff = 32;       // beyond: order 2 up to here, midpoint after
  bool transpose_loops = false;  // verification knob: enumerate pairs transposed
};

struct EnergyResult {
  double value = 0;
  double est_error = 0;
  long long node_pairs = 0;  // integrand evaluations (point pairs)
  double wall_time_s = 0;
  bool tolerance_met = true;
  std::string warning;

  std::string to_json() const;  // {value, est_error, node_pairs, wall_time_s}
};

/// integral over Omega of |grad u - i A u|_p^p.
EnergyResult local_magnetic_energy(const ComplexField& u, const MagneticPotential& A,
                                   const Domain& omega, double p,
                                   const QuadratureSpec& q = {});

/// Gagliardo-type double integral
///   integral_Omega integral_Omega |u(x) - e^{i theta} u(y)|_p^p / |x-y|^{N+ps}
/// (the p-th power of the seminorm). Far cell pairs use distance-graded
/// tensor Gauss; same/adjacent pairs switch to polar coordinates in h = y-x
/// with exact segment clipping at cell faces and preset interfaces, dyadic
/// geometric shells toward h = 0 (the radial power weight is integrated
/// exactly by substitution), and an innermost ball summed in closed form
/// from the limiting directional integrand |T(x).h|_p^p, whose Taylor
/// remainder feeds est_error.
EnergyResult fractional_magnetic_energy(const ComplexField& u, const MagneticPotential& A,
                                        const Domain& omega, double s, double p,
                                        const QuadratureSpec& q = {});

/// Same double integral with |x-y|^{-N-ps} replaced by rho(|x-y|)/|x-y|^p.
/// With rho = bbm(s, p, rOmega) and diam(Omega) <= rOmega this equals
/// p(1-s) times the fractional energy (shared quadrature nodes make the
/// identity hold to rounding).
EnergyResult weighted_difference_energy(const ComplexField& u, const MagneticPotential& A,
                                        const Domain& omega, const RadialKernel& rho,
                                        double p, const QuadratureSpec& q = {});

/// integral over R^N of |u(y+h) - e^{i h.A(y+h/2)} u(y)|_p^p dy for
/// compactly supported (zero-extended) u. |h| > 1 emits a range warning.
double translation_defect(const ComplexField& u, const MagneticPotential& A, const Vec& h,
                          double p);

}  // namespace magfrac
