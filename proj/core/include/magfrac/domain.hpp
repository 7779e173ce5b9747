#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "magfrac/types.hpp"

namespace magfrac {

/// Rectilinear computational box with a per-cell membership mask.
/// Nodes are cell centers; all quadratures are assembled per masked cell.
class Domain {
 public:
  Domain() = default;

  static Domain box(int dim, const std::array<double, kMaxDim>& lo,
                    const std::array<double, kMaxDim>& hi,
                    const std::array<int, kMaxDim>& res);

  /// Box with cells kept where keep(center) is true.
  static Domain box_masked(int dim, const std::array<double, kMaxDim>& lo,
                           const std::array<double, kMaxDim>& hi,
                           const std::array<int, kMaxDim>& res,
                           const std::function<bool(const Vec&)>& keep);

  static Domain interval(double a, double b, int n);
  static Domain rect(double ax, double bx, double ay, double by, int nx, int ny);

  int dim() const { return dim_; }
  double lo(int k) const { return lo_[k]; }
  double hi(int k) const { return hi_[k]; }
  int res(int k) const { return res_[k]; }
  double width(int k) const { return w_[k]; }

  std::int64_t total_cells() const { return total_; }
  std::int64_t masked_count() const { return static_cast<std::int64_t>(cells_.size()); }
  const std::vector<std::int64_t>& masked_cells() const { return cells_; }
  bool full_mask() const { return masked_count() == total_; }

  double cell_volume() const {
    double v = 1;
    for (int k = 0; k < dim_; ++k) v *= w_[k];
    return v;
  }
  double min_width() const;
  double max_width() const;
  double cell_diag() const;
  double bbox_diag() const;

  /// Cached diameter of the masked region (bbox diagonal for full masks,
  /// max center distance plus one cell diagonal otherwise).
  double diameter() const { return diameter_; }

  // Index arithmetic. Multi-indices are arrays of kMaxDim ints.
  std::int64_t linear(const std::array<int, kMaxDim>& idx) const;
  std::array<int, kMaxDim> unlinear(std::int64_t cell) const;
  Vec center(const std::array<int, kMaxDim>& idx) const;
  Vec center(std::int64_t cell) const { return center(unlinear(cell)); }

  bool in_grid(const std::array<int, kMaxDim>& idx) const;
  bool masked(const std::array<int, kMaxDim>& idx) const;
  bool masked_linear(std::int64_t cell) const { return mask_[static_cast<std::size_t>(cell)] != 0; }

  /// Cell containing x, or -1 when x is outside the box.
  std::int64_t cell_of(const Vec& x) const;
  /// True when x lies in a masked cell.
  bool in_mask(const Vec& x) const;

  /// Mask shrunk by r: keeps cells whose center is at distance > r from
  /// every unmasked/outside cell center (conservative erosion).
  Domain shrink(double r) const;

  /// Masked cells whose full 2N-neighborhood depth is at least `layers`.
  std::vector<std::uint8_t> interior_mask(int layers) const;

 private:
  void finalize();

  int dim_ = 0;
  std::array<double, kMaxDim> lo_{}, hi_{}, w_{};
  std::array<int, kMaxDim> res_{};
  std::int64_t total_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::int64_t> cells_;
  double diameter_ = 0;
};

/// Nodes and weights of a one-dimensional Gauss-Legendre rule on [-1, 1].
const std::vector<double>& gauss_nodes(int order);
const std::vector<double>& gauss_weights(int order);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
double integrate_gl(double a, double b, int panels, int order,
                    const std::function<double(double)>& f);

}  // namespace magfrac
