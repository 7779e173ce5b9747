#pragma once

#include <memory>
#include <vector>

#include "magfrac/domain.hpp"
#include "magfrac/types.hpp"

namespace magfrac {

/// Measurable subset E of a domain, used for indicator fields and perimeters.
/// Preset kinds carry exact geometry (membership, ray crossings, relative
/// perimeter, per-cell volume fractions); the mask kind falls back to grid
/// resolution (jump counting in 1D, marching squares in 2D).
class ShapeSet {
 public:
  enum class Kind { Interval, Disk, Square, Mask };

  static ShapeSet interval(double a, double b);
  static ShapeSet disk(const Vec& center, double radius);
  static ShapeSet square(const Vec& center, double half_side);
  static ShapeSet mask(Domain cells);  // E = masked cells of `cells`

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool contains(const Vec& x) const;

  /// Relative perimeter Per(E; Omega): the part of the interface strictly
  /// inside the box of `omega`. Analytic for presets.
  double perimeter_in(const Domain& omega) const;

  /// Parameters t in (0, tmax) where x + t*dir crosses the interface.
  /// Preset shapes only; appended to `out` unsorted.
  void ray_crossings(const Vec& x, const Vec& dir, double tmax,
                     std::vector<double>& out) const;

  /// Volume fraction of E inside a grid cell of `d` (exact for interval and
  /// square, subsampled for disk boundary cells, 0/1 for mask kind).
  double cell_fraction(const Domain& d, std::int64_t cell) const;

  bool analytic() const { return kind_ != Kind::Mask; }

  // Preset accessors (valid for the matching kind).
  double a() const { return a_; }
  double b() const { return b_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Domain& mask_domain() const { return *mask_; }

 private:
  Kind kind_ = Kind::Interval;
  int dim_ = 1;
  double a_ = 0, b_ = 0;  // interval
  Vec center_{};
  double radius_ = 0;  // disk radius or square half side
  std::shared_ptr<Domain> mask_;
};

/// Integral of f over E within omega's box, shape-aware (polar rule for
/// disks, tensor Gauss for boxes, masked cell sums otherwise).
double integrate_over_shape(const ShapeSet& E, const Domain& omega,
                            const std::function<double(const Vec&)>& f,
                            int order = 16);

}  // namespace magfrac
