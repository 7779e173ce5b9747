#include "magfrac/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace magfrac {

// ---------------------------------------------------------------------------
// MagneticPotential

MagneticPotential MagneticPotential::zero(int dim) {
  MagneticPotential p;
  p.kind_ = Kind::Zero;
  p.dim_ = dim;
  return p;
}

MagneticPotential MagneticPotential::constant(const Vec& a) {
  MagneticPotential p;
  p.kind_ = Kind::Constant;
  p.dim_ = a.n;
  p.a_ = a;
  return p;
}

MagneticPotential MagneticPotential::landau(int dim, double b) {
  if (dim < 2) throw std::invalid_argument("landau potential needs dim >= 2");
  MagneticPotential p;
  p.kind_ = Kind::Landau;
  p.dim_ = dim;
  p.coef_ = b;
  return p;
}

MagneticPotential MagneticPotential::radial(int dim, double c) {
  MagneticPotential p;
  p.kind_ = Kind::Radial;
  p.dim_ = dim;
  p.coef_ = c;
  return p;
}

MagneticPotential MagneticPotential::sampled(Domain grid, std::vector<Vec> values) {
  if (static_cast<std::int64_t>(values.size()) != grid.total_cells())
    throw std::invalid_argument("sampled potential: one value per grid cell required");
  MagneticPotential p;
  p.kind_ = Kind::Sampled;
  p.dim_ = grid.dim();
  p.grid_ = std::make_shared<Domain>(std::move(grid));
  p.values_ = std::make_shared<std::vector<Vec>>(std::move(values));
  for (const Vec& v : *p.values_)
    if (!v.finite()) throw std::invalid_argument("sampled potential: non-finite value");
  // max |dA| / |dx| over adjacent node pairs
  const Domain& g = *p.grid_;
  double lip = 0;
  for (std::int64_t c = 0; c < g.total_cells(); ++c) {
    auto idx = g.unlinear(c);
    for (int k = 0; k < g.dim(); ++k) {
      auto j = idx;
      j[k] += 1;
      if (!g.in_grid(j)) continue;
      double d = ((*p.values_)[static_cast<std::size_t>(g.linear(j))] -
                  (*p.values_)[static_cast<std::size_t>(c)])
                     .norm() /
                 g.width(k);
      lip = std::max(lip, d);
    }
  }
  p.lip_ = lip;
  return p;
}

namespace {

// Multilinear interpolation helpers on cell-centered grids, clamped at the
// box boundary.
struct InterpStencil {
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
};

InterpStencil interp_stencil(const Domain& g, const Vec& x) {
  InterpStencil s;
  for (int k = 0; k < g.dim(); ++k) {
    double t = (x[k] - g.lo(k)) / g.width(k) - 0.5;
    double tf = std::floor(t);
    int i = static_cast<int>(tf);
    double f = t - tf;
    if (i < 0) {
      i = 0;
      f = 0;
    }
    if (i >= g.res(k) - 1) {
      i = std::max(0, g.res(k) - 2);
      f = g.res(k) == 1 ? 0.0 : 1.0;
    }
    s.base[k] = i;
    s.frac[k] = f;
  }
  return s;
}

template <class T>
T interp_eval(const Domain& g, const std::vector<T>& vals, const Vec& x) {
  InterpStencil s = interp_stencil(g, x);
  int corners = 1 << g.dim();
  T acc{};
  if constexpr (std::is_same_v<T, Vec>) acc = Vec(g.dim());
  for (int m = 0; m < corners; ++m) {
    double w = 1;
    std::array<int, kMaxDim> idx{};
    for (int k = 0; k < g.dim(); ++k) {
      int bit = (m >> k) & 1;
      idx[k] = s.base[k] + bit;
      w *= bit ? s.frac[k] : (1.0 - s.frac[k]);
    }
    if (w == 0) continue;
    T v = vals[static_cast<std::size_t>(g.linear(idx))];
    if constexpr (std::is_same_v<T, Vec>) {
      acc += w * v;
    } else {
      acc += w * v;
    }
  }
  return acc;
}

}  // namespace

Vec MagneticPotential::value(const Vec& x) const {
  if (x.n != dim_) throw std::invalid_argument("potential: dimension mismatch");
  switch (kind_) {
    case Kind::Zero:
      return Vec(dim_);
    case Kind::Constant:
      return a_;
    case Kind::Landau: {
      Vec v(dim_);
      v[0] = -0.5 * coef_ * x[1];
      v[1] = 0.5 * coef_ * x[0];
      return v;
    }
    case Kind::Radial:
      return coef_ * x;
    case Kind::Sampled: {
      Vec v = interp_eval(*grid_, *values_, x);
      if (!v.finite()) throw std::invalid_argument("potential: non-finite evaluation");
      return v;
    }
  }
  return Vec(dim_);
}

const char* MagneticPotential::kind_name() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::Constant: return "constant";
    case Kind::Landau: return "landau";
    case Kind::Radial: return "radial";
    case Kind::Sampled: return "sampled";
  }
  return "?";
}

double MagneticPotential::lipschitz_bound() const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant:
      return 0.0;
    case Kind::Landau:
      return 0.5 * std::fabs(coef_);
    case Kind::Radial:
      return std::fabs(coef_);
    case Kind::Sampled:
      return lip_;
  }
  return 0.0;
}

double MagneticPotential::sup_bound(const Vec& lo, const Vec& hi) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return a_.norm();
    case Kind::Landau: {
      // |A(x)| = B/2 |(x1, x2)|, maximized at a corner.
      double m = 0;
      for (int cx = 0; cx < 2; ++cx)
        for (int cy = 0; cy < 2; ++cy) {
          double x1 = cx ? hi[0] : lo[0], x2 = cy ? hi[1] : lo[1];
          m = std::max(m, std::sqrt(x1 * x1 + x2 * x2));
        }
      return 0.5 * std::fabs(coef_) * m;
    }
    case Kind::Radial: {
      double m2 = 0;
      for (int k = 0; k < dim_; ++k)
        m2 += std::max(lo[k] * lo[k], hi[k] * hi[k]);
      return std::fabs(coef_) * std::sqrt(m2);
    }
    case Kind::Sampled: {
      double m = 0;
      for (const Vec& v : *values_) m = std::max(m, v.norm());
      return m;
    }
  }
  return 0.0;
}

double MagneticPotential::sup_bound(const Domain& d) const {
  Vec lo(d.dim()), hi(d.dim());
  for (int k = 0; k < d.dim(); ++k) {
    lo[k] = d.lo(k);
    hi[k] = d.hi(k);
  }
  return sup_bound(lo, hi);
}

// ---------------------------------------------------------------------------
// ComplexField

ComplexField ComplexField::constant(Domain d, std::complex<double> c) {
  ComplexField f;
  f.kind_ = Kind::Constant;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.amp_ = c;
  return f;
}

ComplexField ComplexField::linear(Domain d, const CVec& g, std::complex<double> c0) {
  ComplexField f;
  f.kind_ = Kind::Linear;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.g_ = g;
  f.c0_ = c0;
  return f;
}

ComplexField ComplexField::plane_wave(Domain d, const Vec& a, std::complex<double> amp) {
  ComplexField f;
  f.kind_ = Kind::PlaneWave;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.a_ = a;
  f.amp_ = amp;
  return f;
}

ComplexField ComplexField::gaussian(Domain d, const Vec& x0, double sigma,
                                    std::complex<double> amp) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian field: sigma must be positive");
  ComplexField f;
  f.kind_ = Kind::Gaussian;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.x0_ = x0;
  f.sigma_ = sigma;
  f.amp_ = amp;
  return f;
}

ComplexField ComplexField::bump(Domain d, const Vec& x0, double radius,
                                std::complex<double> amp) {
  if (!(radius > 0)) throw std::invalid_argument("bump field: radius must be positive");
  ComplexField f;
  f.kind_ = Kind::Bump;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.x0_ = x0;
  f.radius_ = radius;
  f.amp_ = amp;
  return f;
}

ComplexField ComplexField::wave_packet(Domain d, const Vec& x0, double radius, const Vec& a,
                                        std::complex<double> amp) {
  ComplexField f = bump(std::move(d), x0, radius, amp);
  f.a_ = a;
  return f;
}

ComplexField ComplexField::indicator(Domain d, ShapeSet shape) {
  if (shape.dim() != d.dim()) throw std::invalid_argument("indicator field: dimension mismatch");
  ComplexField f;
  f.kind_ = Kind::Indicator;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.shape_ = std::make_shared<ShapeSet>(std::move(shape));
  return f;
}

ComplexField ComplexField::sampled(Domain d, std::vector<std::complex<double>> node_values) {
  if (static_cast<std::int64_t>(node_values.size()) != d.total_cells())
    throw std::invalid_argument("sampled field: one value per grid cell required");
  ComplexField f;
  f.kind_ = Kind::Sampled;
  f.dom_ = std::make_shared<Domain>(std::move(d));
  f.vals_ = std::make_shared<std::vector<std::complex<double>>>(std::move(node_values));
  f.validate();
  return f;
}

const char* ComplexField::kind_name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::Linear: return "linear";
    case Kind::PlaneWave: return "plane-wave";
    case Kind::Gaussian: return "gaussian";
    case Kind::Bump: return a_.norm2() > 0 ? "wave-packet" : "bump";
    case Kind::Indicator: return "indicator";
    case Kind::Sampled: return "sampled";
  }
  return "?";
}

void ComplexField::validate() const {
  if (kind_ != Kind::Sampled) return;
  const Domain& d = *dom_;
  for (std::int64_t c : d.masked_cells()) {
    auto v = (*vals_)[static_cast<std::size_t>(c)];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("sampled field: non-finite value on a masked node");
  }
}

std::complex<double> ComplexField::value(const Vec& x) const {
  switch (kind_) {
    case Kind::Constant:
      return amp_;
    case Kind::Linear:
      return c0_ + dot(g_, x);
    case Kind::PlaneWave:
      return amp_ * std::exp(std::complex<double>(0.0, dot(a_, x)));
    case Kind::Gaussian: {
      double r2 = (x - x0_).norm2();
      return amp_ * std::exp(-r2 / (sigma_ * sigma_));
    }
    case Kind::Bump: {
      double t = (x - x0_).norm2() / (radius_ * radius_);
      if (t >= 1.0) return 0.0;
      std::complex<double> mod{1.0, 0.0};
      if (a_.n == x.n && a_.norm2() > 0) mod = std::exp(std::complex<double>(0.0, dot(a_, x)));
      return amp_ * mod * std::exp(-1.0 / (1.0 - t));
    }
    case Kind::Indicator:
      return shape_->contains(x) ? 1.0 : 0.0;
    case Kind::Sampled:
      return interp_eval(*dom_, *vals_, x);
  }
  return 0.0;
}

std::complex<double> ComplexField::value_extended(const Vec& x) const {
  if (!dom_->in_mask(x)) return 0.0;
  return value(x);
}

CVec ComplexField::gradient(const Vec& x) const {
  const int n = dom_->dim();
  CVec g(n);
  switch (kind_) {
    case Kind::Constant:
      return g;
    case Kind::Linear:
      return g_;
    case Kind::PlaneWave: {
      std::complex<double> u = value(x);
      for (int k = 0; k < n; ++k) g[k] = std::complex<double>(0.0, a_[k]) * u;
      return g;
    }
    case Kind::Gaussian: {
      std::complex<double> u = value(x);
      for (int k = 0; k < n; ++k) g[k] = -2.0 * (x[k] - x0_[k]) / (sigma_ * sigma_) * u;
      return g;
    }
    case Kind::Bump: {
      double t = (x - x0_).norm2() / (radius_ * radius_);
      if (t >= 1.0) return g;
      std::complex<double> u = value(x);
      double d = 1.0 - t;
      const bool modulated = a_.n == n && a_.norm2() > 0;
      for (int k = 0; k < n; ++k) {
        g[k] = u * (-2.0 * (x[k] - x0_[k]) / (radius_ * radius_ * d * d));
        if (modulated) g[k] += std::complex<double>(0.0, a_[k]) * u;
      }
      return g;
    }
    case Kind::Indicator:
      return g;  // zero a.e.; the interface is handled geometrically
    case Kind::Sampled: {
      // gradient of the interpolant via FD node gradients interpolated back
      std::int64_t c = dom_->cell_of(x);
      if (c < 0 || !dom_->masked_linear(c))
        throw std::invalid_argument("sampled field gradient: point outside mask");
      return fd_gradient_at_node(dom_->unlinear(c));
    }
  }
  return g;
}

std::complex<double> ComplexField::node_value(std::int64_t cell) const {
  if (kind_ == Kind::Sampled) return (*vals_)[static_cast<std::size_t>(cell)];
  return value(dom_->center(cell));
}

CVec ComplexField::fd_gradient_at_node(const std::array<int, kMaxDim>& idx) const {
  const Domain& d = *dom_;
  if (!d.masked(idx))
    throw std::invalid_argument("fd gradient: node outside mask");
  const int n = d.dim();
  CVec g(n);
  auto val = [&](const std::array<int, kMaxDim>& j) { return node_value(d.linear(j)); };
  for (int k = 0; k < n; ++k) {
    auto jm = idx, jp = idx;
    jm[k] -= 1;
    jp[k] += 1;
    const double h = d.width(k);
    bool has_m = d.masked(jm), has_p = d.masked(jp);
    if (has_m && has_p) {
      g[k] = (val(jp) - val(jm)) / (2.0 * h);
    } else if (has_p) {
      auto jpp = jp;
      jpp[k] += 1;
      if (!d.masked(jpp))
        throw std::runtime_error("fd gradient: insufficient neighbors for a boundary stencil");
      g[k] = (-3.0 * val(idx) + 4.0 * val(jp) - val(jpp)) / (2.0 * h);
    } else if (has_m) {
      auto jmm = jm;
      jmm[k] -= 1;
      if (!d.masked(jmm))
        throw std::runtime_error("fd gradient: insufficient neighbors for a boundary stencil");
      g[k] = (3.0 * val(idx) - 4.0 * val(jm) + val(jmm)) / (2.0 * h);
    } else {
      throw std::runtime_error("fd gradient: insufficient neighbors for a boundary stencil");
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

double modulation_phase(const Vec& x, const Vec& y, const MagneticPotential& A) {
  if (x.n != y.n || x.n != A.dim())
    throw std::invalid_argument("modulation_phase: dimension mismatch");
  if (A.is_zero()) return 0.0;
  Vec mid = 0.5 * (x + y);
  return dot(x - y, A.value(mid));
}

CVec magnetic_gradient(const ComplexField& u, const MagneticPotential& A, const Vec& x) {
  CVec g = u.gradient(x);
  if (!A.is_zero()) {
    Vec a = A.value(x);
    std::complex<double> iu = std::complex<double>(0.0, 1.0) * u.value(x);
    for (int k = 0; k < g.n; ++k) g[k] -= a[k] * iu;
  }
  return g;
}

CVec magnetic_gradient_at_node(const ComplexField& u, const MagneticPotential& A,
                               const std::array<int, kMaxDim>& idx) {
  const Domain& d = u.domain();
  if (!d.masked(idx)) throw std::invalid_argument("magnetic_gradient: node outside mask");
  CVec g = u.is_sampled() ? u.fd_gradient_at_node(idx) : u.gradient(d.center(idx));
  if (!A.is_zero()) {
    Vec xc = d.center(idx);
    Vec a = A.value(xc);
    std::complex<double> iu =
        std::complex<double>(0.0, 1.0) *
        (u.is_sampled() ? u.node_value(d.linear(idx)) : u.value(xc));
    for (int k = 0; k < g.n; ++k) g[k] -= a[k] * iu;
  }
  return g;
}

// ---------------------------------------------------------------------------
// CSV I/O

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

struct TensorGrid {
  Domain domain;
  std::vector<std::vector<double>> data;  // per data column, cell-ordered
};

TensorGrid load_tensor_csv(const std::string& path, int coord_cols, int data_cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv load: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv load: empty file " + path);

  std::vector<std::array<double, kMaxDim>> coords;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split_csv_line(line);
    if (static_cast<int>(parts.size()) != coord_cols + data_cols)
      throw std::runtime_error("csv load: wrong column count in " + path);
    std::array<double, kMaxDim> xy{};
    std::vector<double> dv(static_cast<std::size_t>(data_cols));
    for (int k = 0; k < coord_cols; ++k) xy[static_cast<std::size_t>(k)] = std::stod(parts[k]);
    for (int k = 0; k < data_cols; ++k) dv[static_cast<std::size_t>(k)] = std::stod(parts[coord_cols + k]);
    coords.push_back(xy);
    rows.push_back(std::move(dv));
  }
  if (coords.empty()) throw std::runtime_error("csv load: no data rows in " + path);

  // Reconstruct per-axis coordinate sets.
  const int dim = coord_cols;
  std::array<std::vector<double>, kMaxDim> axes;
  for (int k = 0; k < dim; ++k) {
    std::vector<double> v;
    for (auto& c : coords) v.push_back(c[static_cast<std::size_t>(k)]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
            v.end());
    axes[static_cast<std::size_t>(k)] = std::move(v);
  }
  std::int64_t expected = 1;
  for (int k = 0; k < dim; ++k) expected *= static_cast<std::int64_t>(axes[k].size());
  if (expected != static_cast<std::int64_t>(coords.size()))
    throw std::runtime_error("csv load: nodes do not form a complete tensor grid (" + path + ")");
  // uniform spacing
  std::array<double, kMaxDim> w{};
  for (int k = 0; k < dim; ++k) {
    const auto& ax = axes[static_cast<std::size_t>(k)];
    if (ax.size() == 1) {
      w[static_cast<std::size_t>(k)] = 1.0;
      continue;
    }
    double h = ax[1] - ax[0];
    for (std::size_t i = 1; i < ax.size(); ++i)
      if (std::fabs(ax[i] - ax[i - 1] - h) > 1e-9 * std::max(1.0, std::fabs(h)))
        throw std::runtime_error("csv load: non-uniform grid spacing (" + path + ")");
    w[static_cast<std::size_t>(k)] = h;
  }

  std::array<double, kMaxDim> lo{}, hi{};
  std::array<int, kMaxDim> res{};
  res.fill(1);
  for (int k = 0; k < dim; ++k) {
    const auto& ax = axes[static_cast<std::size_t>(k)];
    lo[static_cast<std::size_t>(k)] = ax.front() - 0.5 * w[static_cast<std::size_t>(k)];
    hi[static_cast<std::size_t>(k)] = ax.back() + 0.5 * w[static_cast<std::size_t>(k)];
    res[static_cast<std::size_t>(k)] = static_cast<int>(ax.size());
  }
  TensorGrid g{Domain::box(dim, lo, hi, res), {}};
  g.data.assign(static_cast<std::size_t>(data_cols),
                std::vector<double>(coords.size(), 0.0));

  std::vector<std::uint8_t> seen(coords.size(), 0);
  for (std::size_t r = 0; r < coords.size(); ++r) {
    std::array<int, kMaxDim> idx{};
    for (int k = 0; k < dim; ++k) {
      const auto& ax = axes[static_cast<std::size_t>(k)];
      auto it = std::lower_bound(ax.begin(), ax.end(), coords[r][static_cast<std::size_t>(k)] - 1e-12);
      idx[static_cast<std::size_t>(k)] = static_cast<int>(it - ax.begin());
    }
    std::int64_t cell = g.domain.linear(idx);
    if (seen[static_cast<std::size_t>(cell)])
      throw std::runtime_error("csv load: duplicate grid node (" + path + ")");
    seen[static_cast<std::size_t>(cell)] = 1;
    for (int k = 0; k < data_cols; ++k)
      g.data[static_cast<std::size_t>(k)][static_cast<std::size_t>(cell)] = rows[r][static_cast<std::size_t>(k)];
  }
  return g;
}

int count_coord_cols(const std::string& path, const std::string& trailing_kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv load: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("csv load: empty file " + path);
  auto cols = split_csv_line(header);
  int nx = 0;
  for (const auto& c : cols)
    if (!c.empty() && c[0] == 'x') ++nx;
  if (nx < 1 || nx > kMaxDim)
    throw std::runtime_error("csv load: expected x1..xN coordinate columns in " + path);
  if (trailing_kind == "field") {
    if (static_cast<int>(cols.size()) != nx + 2)
      throw std::runtime_error("csv load: field csv needs columns x1..xN,re,im");
  } else {
    if (static_cast<int>(cols.size()) != 2 * nx)
      throw std::runtime_error("csv load: potential csv needs columns x1..xN,a1..aN");
  }
  return nx;
}

}  // namespace

ComplexField load_field_csv(const std::string& path) {
  int dim = count_coord_cols(path, "field");
  TensorGrid g = load_tensor_csv(path, dim, 2);
  std::vector<std::complex<double>> vals(g.data[0].size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = std::complex<double>(g.data[0][i], g.data[1][i]);
  return ComplexField::sampled(std::move(g.domain), std::move(vals));
}

MagneticPotential load_potential_csv(const std::string& path) {
  int dim = count_coord_cols(path, "potential");
  TensorGrid g = load_tensor_csv(path, dim, dim);
  std::vector<Vec> vals(g.data[0].size(), Vec(dim));
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (int k = 0; k < dim; ++k) vals[i][k] = g.data[static_cast<std::size_t>(k)][i];
  return MagneticPotential::sampled(std::move(g.domain), std::move(vals));
}

}  // namespace magfrac
