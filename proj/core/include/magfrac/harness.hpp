#pragma once

#include <map>
#include <string>
#include <vector>

#include "magfrac/bv.hpp"
#include "magfrac/constants.hpp"
#include "magfrac/functionals.hpp"
#include "magfrac/perimeter.hpp"

namespace magfrac {

struct SweepRow {
  double s = 0;
  double raw = 0;         // fractional energy at s
  double normalized = 0;  // (1 - s) * raw
  double target = 0;      // Q_{p,N} * local energy (or Q_{1,N} * |Du|_A)
  double rel_error = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::map<std::string, std::string> metadata;

  std::string to_csv() const;  // columns s,raw,normalized,target,rel_error
  std::string to_svg() const;  // normalized vs s with the target line
};

struct LimitEstimate {
  double value = 0;     // extrapolated s -> 1 limit
  double slope = 0;     // coefficient of (1 - s)
  double residual = 0;  // max |fit - data|
  std::string model;    // "affine" or "quadratic"
};

struct ByproductReport {
  bool hypothesis_met = false;  // all normalized energies below tolerance
  double max_normalized = 0;
  bool system_verified = false;  // grad Re u = -Im u A and grad Im u = Re u A
  double max_residual = 0;
  std::string message;
};

enum class SweepTarget { Auto, Local, BvDual, IndicatorBv };

/// Runs the fractional energy over the s-grid, normalizes by (1 - s) and
/// compares with the s-independent limit target. Indicator fields take the
/// total-variation target (analytic shapes through the closed form, general
/// ones through the dual solver) with p = 1; everything else targets
/// Q_{p,N} times the local energy.
SweepTable bbm_sweep(const ComplexField& u, const MagneticPotential& A, const Domain& omega,
                     double p, const std::vector<double>& s_list, const QuadratureSpec& q = {},
                     SweepTarget target = SweepTarget::Auto);

/// Least-squares fit of normalized(s) ~ L + c (1-s) (optionally + d (1-s)^2)
/// weighted by (1-s)^{-2}; returns the extrapolated limit L and the max
/// unweighted residual.
LimitEstimate extrapolate_limit(const SweepTable& table, bool quadratic = false);

/// When every normalized energy on the sweep is below `energy_tol`, checks
/// the first-order system grad Re u = -Im u A, grad Im u = Re u A pointwise
/// on the node grid.
ByproductReport byproduct_check(const ComplexField& u, const MagneticPotential& A,
                                const Domain& omega, double p,
                                const std::vector<double>& s_list,
                                const QuadratureSpec& q = {}, double energy_tol = 1e-8,
                                double system_tol = 1e-8);

/// Default sweep grid {0.6, 0.7, 0.8, 0.9, 0.95, 0.99}.
std::vector<double> default_s_grid();

}  // namespace magfrac
