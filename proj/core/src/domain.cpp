#include "magfrac/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace magfrac {

namespace {

// Gauss-Legendre nodes by Newton iteration on P_n; cached per order.
struct GlRule {
  std::vector<double> x, w;
};

GlRule compute_gl(int n) {
  GlRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GlRule& gl_rule(int order) {
  static std::map<int, GlRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
  return it->second;
}

}  // namespace

const std::vector<double>& gauss_nodes(int order) { return gl_rule(order).x; }
const std::vector<double>& gauss_weights(int order) { return gl_rule(order).w; }

double integrate_gl(double a, double b, int panels, int order,
                    const std::function<double(double)>& f) {
  const auto& xs = gauss_nodes(order);
  const auto& ws = gauss_weights(order);
  double total = 0;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h, s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * f(c + 0.5 * h * xs[i]);
    total += 0.5 * h * s;
  }
  return total;
}

Domain Domain::box(int dim, const std::array<double, kMaxDim>& lo,
                   const std::array<double, kMaxDim>& hi,
                   const std::array<int, kMaxDim>& res) {
  return box_masked(dim, lo, hi, res, nullptr);
}

Domain Domain::box_masked(int dim, const std::array<double, kMaxDim>& lo,
                          const std::array<double, kMaxDim>& hi,
                          const std::array<int, kMaxDim>& res,
                          const std::function<bool(const Vec&)>& keep) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Domain: dim must be in [1, 4]");
  Domain d;
  d.dim_ = dim;
  d.lo_ = lo;
  d.hi_ = hi;
  d.res_ = res;
  d.total_ = 1;
  for (int k = 0; k < dim; ++k) {
    if (res[k] < 1) throw std::invalid_argument("Domain: resolution must be positive");
    if (!(hi[k] > lo[k])) throw std::invalid_argument("Domain: cell widths must be positive");
    d.w_[k] = (hi[k] - lo[k]) / res[k];
    d.total_ *= res[k];
  }
  d.mask_.assign(static_cast<std::size_t>(d.total_), 1);
  if (keep) {
    for (std::int64_t c = 0; c < d.total_; ++c)
      if (!keep(d.center(c))) d.mask_[static_cast<std::size_t>(c)] = 0;
  }
  d.finalize();
  return d;
}

Domain Domain::interval(double a, double b, int n) {
  return box(1, {a, 0, 0, 0}, {b, 0, 0, 0}, {n, 1, 1, 1});
}

Domain Domain::rect(double ax, double bx, double ay, double by, int nx, int ny) {
  return box(2, {ax, ay, 0, 0}, {bx, by, 0, 0}, {nx, ny, 1, 1});
}

void Domain::finalize() {
  cells_.clear();
  for (std::int64_t c = 0; c < total_; ++c)
    if (mask_[static_cast<std::size_t>(c)]) cells_.push_back(c);
  if (cells_.empty()) throw std::invalid_argument("Domain: empty mask");

  if (full_mask()) {
    diameter_ = bbox_diag();
    return;
  }
  // Max pairwise center distance over boundary-ish cells, plus a cell
  // diagonal to cover within-cell extent. Exact enough for kernel cutoffs.
  double best = 0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    Vec a = center(cells_[i]);
    for (std::size_t j = i + 1; j < cells_.size(); ++j) {
      double d2 = (a - center(cells_[j])).norm2();
      if (d2 > best) best = d2;
    }
  }
  diameter_ = std::sqrt(best) + cell_diag();
}

double Domain::min_width() const {
  double m = w_[0];
  for (int k = 1; k < dim_; ++k) m = std::min(m, w_[k]);
  return m;
}

double Domain::max_width() const {
  double m = w_[0];
  for (int k = 1; k < dim_; ++k) m = std::max(m, w_[k]);
  return m;
}

double Domain::cell_diag() const {
  double s = 0;
  for (int k = 0; k < dim_; ++k) s += w_[k] * w_[k];
  return std::sqrt(s);
}

double Domain::bbox_diag() const {
  double s = 0;
  for (int k = 0; k < dim_; ++k) s += (hi_[k] - lo_[k]) * (hi_[k] - lo_[k]);
  return std::sqrt(s);
}

std::int64_t Domain::linear(const std::array<int, kMaxDim>& idx) const {
  std::int64_t l = 0;
  for (int k = dim_ - 1; k >= 0; --k) l = l * res_[k] + idx[k];
  return l;
}

std::array<int, kMaxDim> Domain::unlinear(std::int64_t cell) const {
  std::array<int, kMaxDim> idx{};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<int>(cell % res_[k]);
    cell /= res_[k];
  }
  return idx;
}

Vec Domain::center(const std::array<int, kMaxDim>& idx) const {
  Vec x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = lo_[k] + (idx[k] + 0.5) * w_[k];
  return x;
}

bool Domain::in_grid(const std::array<int, kMaxDim>& idx) const {
  for (int k = 0; k < dim_; ++k)
    if (idx[k] < 0 || idx[k] >= res_[k]) return false;
  return true;
}

bool Domain::masked(const std::array<int, kMaxDim>& idx) const {
  return in_grid(idx) && mask_[static_cast<std::size_t>(linear(idx))] != 0;
}

std::int64_t Domain::cell_of(const Vec& x) const {
  std::array<int, kMaxDim> idx{};
  for (int k = 0; k < dim_; ++k) {
    double t = (x[k] - lo_[k]) / w_[k];
    if (t < 0 || t > res_[k]) return -1;
    int i = static_cast<int>(t);
    if (i == res_[k]) i = res_[k] - 1;
    idx[k] = i;
  }
  return linear(idx);
}

bool Domain::in_mask(const Vec& x) const {
  std::int64_t c = cell_of(x);
  return c >= 0 && mask_[static_cast<std::size_t>(c)] != 0;
}

Domain Domain::shrink(double r) const {
  Domain out = *this;
  std::array<int, kMaxDim> reach{};
  for (int k = 0; k < dim_; ++k) reach[k] = static_cast<int>(std::ceil(r / w_[k])) + 1;
  std::vector<std::uint8_t> nm(mask_.size(), 0);
  for (std::int64_t c : cells_) {
    auto idx = unlinear(c);
    Vec xc = center(idx);
    bool keep = true;
    std::array<int, kMaxDim> off{};
    std::function<void(int)> rec = [&](int k) {
      if (!keep) return;
      if (k == dim_) {
        std::array<int, kMaxDim> j{};
        for (int m = 0; m < dim_; ++m) j[m] = idx[m] + off[m];
        Vec yc(dim_);
        for (int m = 0; m < dim_; ++m) yc[m] = lo_[m] + (j[m] + 0.5) * w_[m];
        if ((yc - xc).norm() <= r && !masked(j)) keep = false;
        return;
      }
      for (off[k] = -reach[k]; off[k] <= reach[k]; ++off[k]) rec(k + 1);
    };
    rec(0);
    if (keep) nm[static_cast<std::size_t>(c)] = 1;
  }
  out.mask_ = std::move(nm);
  out.finalize();
  return out;
}

std::vector<std::uint8_t> Domain::interior_mask(int layers) const {
  std::vector<std::uint8_t> depth(mask_.size(), 0);
  // depth 1 = masked, grows by erosion.
  for (std::size_t i = 0; i < mask_.size(); ++i) depth[i] = mask_[i];
  std::vector<std::uint8_t> cur = depth;
  for (int pass = 0; pass < layers; ++pass) {
    std::vector<std::uint8_t> nxt(mask_.size(), 0);
    for (std::int64_t c : cells_) {
      if (!cur[static_cast<std::size_t>(c)]) continue;
      auto idx = unlinear(c);
      bool inner = true;
      for (int k = 0; k < dim_ && inner; ++k) {
        for (int s = -1; s <= 1 && inner; s += 2) {
          auto j = idx;
          j[k] += s;
          if (!in_grid(j) || !cur[static_cast<std::size_t>(linear(j))]) inner = false;
        }
      }
      if (inner) nxt[static_cast<std::size_t>(c)] = 1;
    }
    cur = std::move(nxt);
  }
  return cur;
}

}  // namespace magfrac
