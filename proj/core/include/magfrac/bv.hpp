#pragma once

#include <string>
#include <vector>

#include "magfrac/fields.hpp"

namespace magfrac {

/// Discrete test field for the dual total-variation problem: one real
/// N-vector per node, pointwise Euclidean norm <= 1, clamped to zero on the
/// two outermost mask layers (compact support).
struct DualField {
  const Domain* domain = nullptr;
  std::vector<Vec> phi;            // per masked cell (aligned with masked_cells())
  std::vector<std::uint8_t> free_node;  // 1 where the node may move

  double max_norm() const;
};

struct BvResult {
  double c1 = 0;  // real-channel supremum
  double c2 = 0;  // imaginary-channel supremum
  double total = 0;
  int iterations = 0;
  double gap = 0;  // distance to the exact discrete supremum

  std::string to_json() const;  // {c1, c2, total, iterations, gap}
};

/// Per-cell vector masses of the two channels of the gradient measure
/// (smooth-field representation: mu1 = -(grad Re u + A Im u) vol, etc).
struct DiscreteVectorMeasure {
  std::vector<Vec> mu1, mu2;  // aligned with domain.masked_cells()
};

/// Magnetic total variation by the primal formula, valid for smooth fields:
/// integral |grad u - i A u|_1.
double bv_primal_smooth(const ComplexField& u, const MagneticPotential& A, const Domain& omega);

/// Magnetic total variation by the dual formulation: projected gradient
/// ascent over two independent unit-ball-constrained test fields, with the
/// gap measured against the exact discrete supremum (forward differences
/// with the negative-adjoint divergence make it available in closed form).
/// Every iterate is a valid lower bound of the discrete supremum.
BvResult bv_dual(const ComplexField& u, const MagneticPotential& A, const Domain& omega,
                 int max_iter = 20000, double tol = 1e-6, DualField* phi_out = nullptr,
                 DualField* psi_out = nullptr);

/// L1 norm plus the dual total variation.
double bv_norm(const ComplexField& u, const MagneticPotential& A, const Domain& omega);

/// integral over omega of |u|_1 = |Re u| + |Im u|.
double l1_norm(const ComplexField& u, const Domain& omega);

/// Copies u's values on omega's mask into the (aligned, containing) grid of
/// W and fills the rest with zero.
ComplexField extend_by_zero(const ComplexField& u, const Domain& omega, const Domain& W);

DiscreteVectorMeasure bv_measures_smooth(const ComplexField& u, const MagneticPotential& A,
                                         const Domain& omega);

/// Node samples used by the discrete solvers: plain node values, except
/// analytic indicator fields which are sampled as per-cell volume fractions
/// (binary point sampling biases the discrete interface length upward by
/// several percent; the antialiased samples restore consistency).
std::vector<std::complex<double>> bv_node_values(const ComplexField& u, const Domain& omega);

}  // namespace magfrac
