#pragma once

#include <functional>
#include <string>
#include <vector>

#include "magfrac/fields.hpp"

namespace magfrac {

/// Nonnegative radial weight rho(r). The bbm kind is
///   rho(r) = p (1-s) r^{p - p s - N} psi0(r)
/// with psi0 = 1 on [0, rOmega], 0 on [2 rOmega, inf), and a C^2 quintic
/// smoothstep in between. Its moment against r^{N-1} over [0, rOmega] is
/// rOmega^{p(1-s)} exactly.
class RadialKernel {
 public:
  static RadialKernel bbm(double s, double p, double r_omega, int dim);
  static RadialKernel custom(std::function<double(double)> rho, double support_radius);

  double rho(double r) const;
  double support_radius() const { return support_; }
  bool is_bbm() const { return bbm_; }
  double s() const { return s_; }
  double p() const { return p_; }
  double r_omega() const { return r_omega_; }
  int dim() const { return dim_; }

  /// integral of rho(r) r^{N-1+beta} over [a, b] (adaptive, graded at 0).
  double moment(double a, double b, double beta, int dim) const;

  double total_moment(int dim) const { return moment(0.0, support_, 0.0, dim); }
  double tail_moment(double delta, int dim) const {
    return delta >= support_ ? 0.0 : moment(delta, support_, 0.0, dim);
  }

 private:
  bool bbm_ = false;
  double s_ = 0, p_ = 1, r_omega_ = 1;
  int dim_ = 1;
  std::function<double(double)> fn_;
  double support_ = 0;
};

/// Smooth cutoff: 1 below r_omega, 0 above 2 r_omega, quintic in between.
double psi0(double r, double r_omega);

struct KernelCheckRow {
  double s = 0;  // 0 when the kernel is not a bbm kind
  double total_moment = 0;
  double tail_01 = 0, tail_05 = 0, tail_10 = 0;  // beyond delta = 0.1 / 0.5 / 1.0
  double beta_moment_05 = 0;                     // beta = 0.5, delta = 1
  double beta_moment_10 = 0;                     // beta = 1,   delta = 1
};

struct KernelCheckReport {
  std::vector<KernelCheckRow> rows;
  bool tails_decreasing = true;  // flagged convergent when each tail decreases
  bool beta_decreasing = true;
  std::string to_csv() const;  // columns s,total_moment,tail_0.1,tail_0.5,tail_1.0,beta_moment
};

/// Moment report for a kernel sequence (conditions: unit first moments,
/// vanishing tails, vanishing higher moments).
KernelCheckReport validate_kernel_sequence(const std::vector<RadialKernel>& kernels, int dim);

/// Radial unit-mass bump supported in B(0,1), scaled to radius eps:
/// eta(x) = cN exp(-1/(1-|x|^2)).
class Mollifier {
 public:
  explicit Mollifier(int dim, double eps);

  int dim() const { return dim_; }
  double eps() const { return eps_; }

  double eta(const Vec& x) const;        // unscaled, support B(0,1)
  double eta_scaled(const Vec& x) const; // eps^{-N} eta(x/eps)

  /// u_eps(x) with u extended by zero outside its mask.
  std::complex<double> convolve_at(const ComplexField& u, const Vec& x) const;

  static double normalization(int dim);  // cN, cached

 private:
  int dim_;
  double eps_;
  double cn_;
};

/// Mollified field sampled on the same grid as u.
/// Throws when eps is smaller than half a cell width (under-resolved).
ComplexField mollify(const ComplexField& u, const Mollifier& m);

}  // namespace magfrac
