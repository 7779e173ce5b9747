#pragma once

#include <cstdint>
#include <vector>

#include "magfrac/rng.hpp"
#include "magfrac/types.hpp"

namespace magfrac {

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int dim);

/// Quadrature rule on the unit sphere S^{N-1}.
///
/// N = 1: the exact two-point rule {-1, +1} (counting measure).
/// N = 2: composite Gauss-Legendre in the angle; directional integrands
///        |w.h|^p are evaluated on panels split at the two zeros of w.h,
///        so each panel sees a single-signed analytic integrand.
/// N = 3: Gauss in z = cos(phi) (split at z = 0) x uniform angle; axis
///        integrands are evaluated in a frame aligned with the axis, which
///        reduces them to the exact one-dimensional z-rule.
/// N >= 4: Monte Carlo directions symmetrized over coordinate sign flips
///        and permutations; this makes all degree-<=3 moments exact, so
///        p = 2 integrals are exact up to rounding.
class SphereRule {
 public:
  enum class Kind { TwoPoint, CompositeGL, ProductRule, SymmetrizedMC };

  static SphereRule make(int dim);
  static SphereRule make_mc(int dim, int base_samples, std::uint64_t seed = kDefaultSeed);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Sum of weights (= |S^{N-1}| up to rounding).
  double weight_sum() const;

  /// integral of |omega . h|^p over the sphere, by this rule.
  double integrate_abs_dot_pow(const Vec& omega, double p) const;

  /// Accuracy the rule claims for |omega . h|^p integrands.
  double tolerance(double p) const;

 private:
  int dim_ = 0;
  Kind kind_ = Kind::TwoPoint;
  std::uint64_t seed_ = kDefaultSeed;
  std::vector<Vec> nodes_;
  std::vector<double> weights_;
  // N = 2 panel layout
  int panels_ = 64, gl_order_ = 8;
  // N = 3 z-subrule (per half [0,1]; mirrored)
  std::vector<double> z_nodes_, z_weights_;
  int theta_count_ = 256;
};

/// Sphere constant Q_{p,N} = (1/p) * integral |omega.h|^p dH^{N-1}(h),
/// independent of the unit vector omega. Every call verifies the
/// independence on 3 deterministic pseudo-random directions within the
/// rule's tolerance.
double q_constant(double p, int dim, const SphereRule& rule);
double q_constant(double p, int dim);  // default rule

/// integral of |v.h|_p^p over the sphere for complex v; equals
/// p * Q_{p,N} * |v|_p^p.
double directional_integral(const CVec& v, double p, const SphereRule& rule);

}  // namespace magfrac
