#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "magfrac/domain.hpp"
#include "magfrac/shapes.hpp"
#include "magfrac/types.hpp"

namespace magfrac {

/// Real vector potential A. Presets evaluate exactly everywhere and carry
/// analytic Lipschitz/sup metadata; sampled potentials interpolate
/// multilinearly with finite-difference metadata.
class MagneticPotential {
 public:
  enum class Kind { Zero, Constant, Landau, Radial, Sampled };

  static MagneticPotential zero(int dim);
  static MagneticPotential constant(const Vec& a);
  static MagneticPotential landau(int dim, double b);   // B/2 * (-x2, x1, 0, ...)
  static MagneticPotential radial(int dim, double c);   // c * x
  static MagneticPotential sampled(Domain grid, std::vector<Vec> values);

  Kind kind() const { return kind_; }
  const char* kind_name() const;
  int dim() const { return dim_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

  Vec value(const Vec& x) const;

  /// Lipschitz constant (analytic for presets, max |dA|/|dx| over adjacent
  /// node pairs for sampled potentials).
  double lipschitz_bound() const;

  /// sup |A| over the stated box.
  double sup_bound(const Vec& lo, const Vec& hi) const;
  double sup_bound(const Domain& d) const;

 private:
  Kind kind_ = Kind::Zero;
  int dim_ = 0;
  Vec a_{};
  double coef_ = 0;
  std::shared_ptr<Domain> grid_;
  std::shared_ptr<std::vector<Vec>> values_;
  double lip_ = 0;
};

/// Complex scalar field u on a domain. Preset kinds evaluate (and
/// differentiate) analytically so closed-form cases carry no sampling error;
/// grid-sampled fields interpolate multilinearly and differentiate by
/// second-order finite differences at nodes.
class ComplexField {
 public:
  enum class Kind { Constant, Linear, PlaneWave, Gaussian, Bump, Indicator, Sampled };

  static ComplexField constant(Domain d, std::complex<double> c);
  /// c0 + sum_k g_k x_k
  static ComplexField linear(Domain d, const CVec& g, std::complex<double> c0 = 0.0);
  /// amp * exp(i a.x)
  static ComplexField plane_wave(Domain d, const Vec& a, std::complex<double> amp = 1.0);
  /// amp * exp(-|x-x0|^2 / sigma^2)
  static ComplexField gaussian(Domain d, const Vec& x0, double sigma,
                               std::complex<double> amp = 1.0);
  /// amp * exp(-1/(1-|x-x0|^2/R^2)) inside B(x0,R), 0 outside (C-infinity).
  static ComplexField bump(Domain d, const Vec& x0, double radius,
                           std::complex<double> amp = 1.0);
  /// amp * e^{i a.x} times the bump profile (compactly supported, oscillating).
  static ComplexField wave_packet(Domain d, const Vec& x0, double radius, const Vec& a,
                                  std::complex<double> amp = 1.0);
  static ComplexField indicator(Domain d, ShapeSet shape);
  static ComplexField sampled(Domain d, std::vector<std::complex<double>> node_values);

  Kind kind() const { return kind_; }
  const char* kind_name() const;
  const Domain& domain() const { return *dom_; }
  bool is_sampled() const { return kind_ == Kind::Sampled; }
  bool is_indicator() const { return kind_ == Kind::Indicator; }
  const ShapeSet* shape() const { return shape_ ? shape_.get() : nullptr; }

  /// Value at x; sampled fields interpolate, indicator fields are exactly
  /// 0/1. Outside the domain box this is the plain preset value (use
  /// value_extended for the zero extension).
  std::complex<double> value(const Vec& x) const;

  /// Zero extension: value(x) on masked cells, 0 elsewhere.
  std::complex<double> value_extended(const Vec& x) const;

  /// Analytic gradient for presets (zero for indicators away from the
  /// interface); interpolated finite-difference gradient for sampled fields.
  CVec gradient(const Vec& x) const;

  std::complex<double> node_value(std::int64_t cell) const;
  const std::vector<std::complex<double>>& samples() const { return *vals_; }

  /// Finite-difference gradient at a masked node: central second order in
  /// the interior, one-sided second order against the mask boundary.
  CVec fd_gradient_at_node(const std::array<int, kMaxDim>& idx) const;

  /// true when every stored/needed value is finite.
  void validate() const;

 private:
  Kind kind_ = Kind::Constant;
  std::shared_ptr<Domain> dom_;
  std::complex<double> amp_ = 0.0, c0_ = 0.0;
  CVec g_{};
  Vec a_{}, x0_{};
  double sigma_ = 1, radius_ = 1;
  std::shared_ptr<ShapeSet> shape_;
  std::shared_ptr<std::vector<std::complex<double>>> vals_;
};

/// theta = (x - y) . A((x + y)/2), the midpoint phase of the modulated
/// difference u(x) - e^{i theta} u(y).
double modulation_phase(const Vec& x, const Vec& y, const MagneticPotential& A);

/// (grad u - i A u)(x). For sampled fields x must be a masked node.
CVec magnetic_gradient(const ComplexField& u, const MagneticPotential& A, const Vec& x);
CVec magnetic_gradient_at_node(const ComplexField& u, const MagneticPotential& A,
                               const std::array<int, kMaxDim>& idx);

/// CSV I/O. Fields: header x1,...,xN,re,im; potentials: x1,...,xN,a1,...,aN.
/// Rows must form a complete uniform tensor grid (cells are centered on the
/// sample coordinates); anything else is a load error.
ComplexField load_field_csv(const std::string& path);
MagneticPotential load_potential_csv(const std::string& path);

}  // namespace magfrac
