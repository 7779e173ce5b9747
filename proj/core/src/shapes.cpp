#include "magfrac/shapes.hpp"

#include <cmath>
#include <stdexcept>

namespace magfrac {

ShapeSet ShapeSet::interval(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("ShapeSet::interval: need a < b");
  ShapeSet s;
  s.kind_ = Kind::Interval;
  s.dim_ = 1;
  s.a_ = a;
  s.b_ = b;
  return s;
}

ShapeSet ShapeSet::disk(const Vec& center, double radius) {
  if (center.n != 2) throw std::invalid_argument("ShapeSet::disk: 2D only");
  if (!(radius > 0)) throw std::invalid_argument("ShapeSet::disk: radius must be positive");
  ShapeSet s;
  s.kind_ = Kind::Disk;
  s.dim_ = 2;
  s.center_ = center;
  s.radius_ = radius;
  return s;
}

ShapeSet ShapeSet::square(const Vec& center, double half_side) {
  if (center.n != 2) throw std::invalid_argument("ShapeSet::square: 2D only");
  if (!(half_side > 0)) throw std::invalid_argument("ShapeSet::square: half side must be positive");
  ShapeSet s;
  s.kind_ = Kind::Square;
  s.dim_ = 2;
  s.center_ = center;
  s.radius_ = half_side;
  return s;
}

ShapeSet ShapeSet::mask(Domain cells) {
  ShapeSet s;
  s.kind_ = Kind::Mask;
  s.dim_ = cells.dim();
  s.mask_ = std::make_shared<Domain>(std::move(cells));
  return s;
}

bool ShapeSet::contains(const Vec& x) const {
  switch (kind_) {
    case Kind::Interval:
      return x[0] > a_ && x[0] < b_;
    case Kind::Disk:
      return (x - center_).norm2() < radius_ * radius_;
    case Kind::Square:
      return std::fabs(x[0] - center_[0]) < radius_ && std::fabs(x[1] - center_[1]) < radius_;
    case Kind::Mask:
      return mask_->in_mask(x);
  }
  return false;
}

namespace {

double clip_len(double a, double b, double lo, double hi) {
  double l = std::max(a, lo), h = std::min(b, hi);
  return h > l ? h - l : 0.0;
}

// 2D marching squares on cell-center samples of a binary mask: interface
// length of the 0.5 level set, restricted to the interior of `omega`.
double marching_squares_perimeter(const Domain& e, const Domain& omega) {
  if (e.dim() != 2) throw std::invalid_argument("marching squares: 2D only");
  double len = 0;
  double wx = e.width(0), wy = e.width(1);
  for (int j = 0; j + 1 < e.res(1); ++j) {
    for (int i = 0; i + 1 < e.res(0); ++i) {
      std::array<int, kMaxDim> i00{{i, j, 0, 0}}, i10{{i + 1, j, 0, 0}},
          i01{{i, j + 1, 0, 0}}, i11{{i + 1, j + 1, 0, 0}};
      int code = (e.masked(i00) ? 1 : 0) | (e.masked(i10) ? 2 : 0) |
                 (e.masked(i11) ? 4 : 0) | (e.masked(i01) ? 8 : 0);
      if (code == 0 || code == 15) continue;
      Vec c = e.center(i00);
      double x0 = c[0], y0 = c[1];
      auto mid_b = Vec{x0 + 0.5 * wx, y0};
      auto mid_t = Vec{x0 + 0.5 * wx, y0 + wy};
      auto mid_l = Vec{x0, y0 + 0.5 * wy};
      auto mid_r = Vec{x0 + wx, y0 + 0.5 * wy};
      auto seg = [&](const Vec& p, const Vec& q) {
        Vec m = 0.5 * (p + q);
        bool interior = true;
        for (int k = 0; k < 2; ++k)
          if (m[k] <= omega.lo(k) + 1e-12 || m[k] >= omega.hi(k) - 1e-12) interior = false;
        if (interior) len += (q - p).norm();
      };
      switch (code) {
        case 1: case 14: seg(mid_l, mid_b); break;
        case 2: case 13: seg(mid_b, mid_r); break;
        case 3: case 12: seg(mid_l, mid_r); break;
        case 4: case 11: seg(mid_r, mid_t); break;
        case 6: case 9:  seg(mid_b, mid_t); break;
        case 7: case 8:  seg(mid_l, mid_t); break;
        case 5: case 10: seg(mid_l, mid_b); seg(mid_r, mid_t); break;
      }
    }
  }
  return len;
}

}  // namespace

double ShapeSet::perimeter_in(const Domain& omega) const {
  switch (kind_) {
    case Kind::Interval: {
      double per = 0;
      if (a_ > omega.lo(0) + 1e-14 && a_ < omega.hi(0) - 1e-14) per += 1;
      if (b_ > omega.lo(0) + 1e-14 && b_ < omega.hi(0) - 1e-14) per += 1;
      return per;
    }
    case Kind::Disk: {
      for (int k = 0; k < 2; ++k)
        if (center_[k] - radius_ < omega.lo(k) || center_[k] + radius_ > omega.hi(k))
          throw std::invalid_argument(
              "ShapeSet::perimeter_in: disk crossing the box is not supported");
      return 2.0 * M_PI * radius_;
    }
    case Kind::Square: {
      double per = 0;
      double xl = center_[0] - radius_, xr = center_[0] + radius_;
      double yb = center_[1] - radius_, yt = center_[1] + radius_;
      // vertical edges
      for (double x : {xl, xr})
        if (x > omega.lo(0) + 1e-14 && x < omega.hi(0) - 1e-14)
          per += clip_len(yb, yt, omega.lo(1), omega.hi(1));
      for (double y : {yb, yt})
        if (y > omega.lo(1) + 1e-14 && y < omega.hi(1) - 1e-14)
          per += clip_len(xl, xr, omega.lo(0), omega.hi(0));
      return per;
    }
    case Kind::Mask: {
      if (dim_ == 1) {
        double per = 0;
        const Domain& e = *mask_;
        for (int i = 0; i + 1 < e.res(0); ++i) {
          std::array<int, kMaxDim> l{{i, 0, 0, 0}}, r{{i + 1, 0, 0, 0}};
          if (e.masked(l) != e.masked(r)) {
            double x = e.lo(0) + (i + 1) * e.width(0);
            if (x > omega.lo(0) + 1e-12 && x < omega.hi(0) - 1e-12) per += 1;
          }
        }
        return per;
      }
      return marching_squares_perimeter(*mask_, omega);
    }
  }
  return 0;
}

void ShapeSet::ray_crossings(const Vec& x, const Vec& dir, double tmax,
                             std::vector<double>& out) const {
  auto push = [&](double t) {
    if (t > 1e-300 && t < tmax) out.push_back(t);
  };
  switch (kind_) {
    case Kind::Interval: {
      if (dir[0] != 0) {
        push((a_ - x[0]) / dir[0]);
        push((b_ - x[0]) / dir[0]);
      }
      return;
    }
    case Kind::Disk: {
      Vec d = x - center_;
      double b = dot(d, dir), c = d.norm2() - radius_ * radius_;
      double disc = b * b - c;  // |dir| = 1
      if (disc <= 0) return;
      double sq = std::sqrt(disc);
      push(-b - sq);
      push(-b + sq);
      return;
    }
    case Kind::Square: {
      for (int k = 0; k < 2; ++k) {
        if (dir[k] == 0) continue;
        for (double plane : {center_[k] - radius_, center_[k] + radius_}) {
          double t = (plane - x[k]) / dir[k];
          if (t <= 1e-300 || t >= tmax) continue;
          int o = 1 - k;
          double other = x[o] + t * dir[o];
          if (std::fabs(other - center_[o]) <= radius_) out.push_back(t);
        }
      }
      return;
    }
    case Kind::Mask:
      return;  // grid-resolved shapes split at cell faces already
  }
}

double ShapeSet::cell_fraction(const Domain& d, std::int64_t cell) const {
  auto idx = d.unlinear(cell);
  Vec c = d.center(idx);
  switch (kind_) {
    case Kind::Interval: {
      double l = c[0] - 0.5 * d.width(0), r = c[0] + 0.5 * d.width(0);
      return clip_len(l, r, a_, b_) / (r - l);
    }
    case Kind::Square: {
      double f = 1;
      for (int k = 0; k < 2; ++k) {
        double l = c[k] - 0.5 * d.width(k), r = c[k] + 0.5 * d.width(k);
        f *= clip_len(l, r, center_[k] - radius_, center_[k] + radius_) / (r - l);
      }
      return f;
    }
    case Kind::Disk: {
      double hx = 0.5 * d.width(0), hy = 0.5 * d.width(1);
      double cd = std::sqrt(hx * hx + hy * hy);
      double dist = (c - center_).norm();
      if (dist + cd <= radius_) return 1.0;
      if (dist - cd >= radius_) return 0.0;
      const int m = 64;  // subsample boundary cells
      int cnt = 0;
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          Vec p{c[0] - hx + (i + 0.5) * 2 * hx / m, c[1] - hy + (j + 0.5) * 2 * hy / m};
          if (contains(p)) ++cnt;
        }
      return static_cast<double>(cnt) / (m * m);
    }
    case Kind::Mask:
      return mask_->in_mask(c) ? 1.0 : 0.0;
  }
  return 0;
}

double integrate_over_shape(const ShapeSet& E, const Domain& omega,
                            const std::function<double(const Vec&)>& f, int order) {
  const auto& xs = gauss_nodes(order);
  const auto& ws = gauss_weights(order);
  switch (E.kind()) {
    case ShapeSet::Kind::Interval: {
      double a = std::max(E.a(), omega.lo(0)), b = std::min(E.b(), omega.hi(0));
      if (b <= a) return 0;
      return integrate_gl(a, b, 8, order, [&](double x) { return f(Vec{x}); });
    }
    case ShapeSet::Kind::Square: {
      double total = 0;
      double ax = std::max(E.center()[0] - E.radius(), omega.lo(0));
      double bx = std::min(E.center()[0] + E.radius(), omega.hi(0));
      double ay = std::max(E.center()[1] - E.radius(), omega.lo(1));
      double by = std::min(E.center()[1] + E.radius(), omega.hi(1));
      if (bx <= ax || by <= ay) return 0;
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) {
          Vec p{0.5 * (ax + bx) + 0.5 * (bx - ax) * xs[i],
                0.5 * (ay + by) + 0.5 * (by - ay) * xs[j]};
          total += ws[i] * ws[j] * f(p);
        }
      return total * 0.25 * (bx - ax) * (by - ay);
    }
    case ShapeSet::Kind::Disk: {
      // polar rule, exact geometry for disks fully inside the box
      double total = 0;
      int nth = 4 * order;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = 0.5 * E.radius() * (1.0 + xs[i]);
        double wr = 0.5 * E.radius() * ws[i] * r;
        for (int j = 0; j < nth; ++j) {
          double th = 2.0 * M_PI * (j + 0.5) / nth;
          Vec p{E.center()[0] + r * std::cos(th), E.center()[1] + r * std::sin(th)};
          total += wr * (2.0 * M_PI / nth) * f(p);
        }
      }
      return total;
    }
    case ShapeSet::Kind::Mask: {
      const Domain& m = E.mask_domain();
      double total = 0;
      for (auto c : m.masked_cells()) total += f(m.center(c)) * m.cell_volume();
      return total;
    }
  }
  return 0;
}

}  // namespace magfrac
