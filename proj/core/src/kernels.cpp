#include "magfrac/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "magfrac/constants.hpp"
#include "magfrac/domain.hpp"
#include "magfrac/parallel.hpp"

namespace magfrac {

double psi0(double r, double r_omega) {
  if (r <= r_omega) return 1.0;
  if (r >= 2.0 * r_omega) return 0.0;
  double t = (r - r_omega) / r_omega;
  double s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));  // quintic smoothstep
  return 1.0 - s;
}

RadialKernel RadialKernel::bbm(double s, double p, double r_omega, int dim) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("bbm kernel: s must be in (0, 1)");
  if (p < 1.0) throw std::invalid_argument("bbm kernel: p must be >= 1");
  if (!(r_omega > 0)) throw std::invalid_argument("bbm kernel: r_omega must be positive");
  RadialKernel k;
  k.bbm_ = true;
  k.s_ = s;
  k.p_ = p;
  k.r_omega_ = r_omega;
  k.dim_ = dim;
  k.support_ = 2.0 * r_omega;
  return k;
}

RadialKernel RadialKernel::custom(std::function<double(double)> rho, double support_radius) {
  if (!(support_radius > 0))
    throw std::invalid_argument("custom kernel: support radius must be positive");
  RadialKernel k;
  k.fn_ = std::move(rho);
  k.support_ = support_radius;
  return k;
}

double RadialKernel::rho(double r) const {
  if (r < 0) throw std::invalid_argument("kernel: negative radius");
  if (bbm_) {
    if (r == 0) return 0.0;  // not evaluated at 0; density handled in moments
    return p_ * (1.0 - s_) * std::pow(r, p_ - p_ * s_ - dim_) * psi0(r, r_omega_);
  }
  double v = fn_(r);
  if (v < 0) throw std::invalid_argument("kernel: negative value");
  return v;
}

double RadialKernel::moment(double a, double b, double beta, int dim) const {
  if (b <= a) return 0.0;
  if (bbm_) {
    // rho r^{N-1+beta} = p(1-s) r^{p(1-s)+beta-1} psi0(r); integrate the
    // pure power part with the exact substitution t = r^{p(1-s)+beta} and
    // the cutoff part with composite Gauss.
    double expo = p_ * (1.0 - s_) + beta;
    double total = 0;
    double b1 = std::min(b, r_omega_);
    if (b1 > a) {
      // integral of p(1-s) r^{expo-1} over [a, b1]
      total += p_ * (1.0 - s_) / expo * (std::pow(b1, expo) - std::pow(a, expo));
    }
    double a2 = std::max(a, r_omega_), b2 = std::min(b, 2.0 * r_omega_);
    if (b2 > a2) {
      total += integrate_gl(a2, b2, 32, 10, [&](double r) {
        return p_ * (1.0 - s_) * std::pow(r, expo - 1.0) * psi0(r, r_omega_);
      });
    }
    return total;
  }
  // custom kernels: graded composite Gauss toward 0
  double total = 0;
  double lo = a, hi = std::min(b, support_);
  if (hi <= lo) return 0.0;
  auto f = [&](double r) { return rho(r) * std::pow(r, dim - 1 + beta); };
  if (lo == 0) {
    double edge = hi * 1e-6;
    // innermost: rho bounded near 0 is assumed for custom kernels
    total += integrate_gl(0, edge, 4, 10, f);
    lo = edge;
  }
  int octaves = static_cast<int>(std::ceil(std::log2(hi / lo)));
  octaves = std::max(1, std::min(octaves, 80));
  double r0 = lo;
  for (int k = 0; k < octaves; ++k) {
    double r1 = (k == octaves - 1) ? hi : std::min(hi, r0 * 2.0);
    if (r1 > r0) total += integrate_gl(r0, r1, 4, 10, f);
    r0 = r1;
    if (r0 >= hi) break;
  }
  return total;
}

KernelCheckReport validate_kernel_sequence(const std::vector<RadialKernel>& kernels, int dim) {
  if (kernels.empty())
    throw std::invalid_argument("validate_kernel_sequence: empty kernel list");
  KernelCheckReport rep;
  for (const auto& k : kernels) {
    KernelCheckRow row;
    row.s = k.is_bbm() ? k.s() : 0.0;
    row.total_moment = k.total_moment(dim);
    row.tail_01 = k.tail_moment(0.1, dim);
    row.tail_05 = k.tail_moment(0.5, dim);
    row.tail_10 = k.tail_moment(1.0, dim);
    row.beta_moment_05 = k.moment(0.0, std::min(1.0, k.support_radius()), 0.5, dim);
    row.beta_moment_10 = k.moment(0.0, std::min(1.0, k.support_radius()), 1.0, dim);
    rep.rows.push_back(row);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].tail_05 > rep.rows[i - 1].tail_05 + 1e-14) rep.tails_decreasing = false;
    if (rep.rows[i].beta_moment_10 > rep.rows[i - 1].beta_moment_10 + 1e-14)
      rep.beta_decreasing = false;
  }
  return rep;
}

std::string KernelCheckReport::to_csv() const {
  std::ostringstream os;
  os << "s,total_moment,tail_0.1,tail_0.5,tail_1.0,beta_moment\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.s,
                  r.total_moment, r.tail_01, r.tail_05, r.tail_10, r.beta_moment_10);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Mollifier

double Mollifier::normalization(int dim) {
  static std::map<int, double> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;
  // integral over B(0,1) of exp(-1/(1-r^2)) = |S^{N-1}| int_0^1 e^{-1/(1-r^2)} r^{N-1} dr
  double radial = integrate_gl(0.0, 1.0, 64, 12, [&](double r) {
    double d = 1.0 - r * r;
    if (d <= 1e-14) return 0.0;
    return std::exp(-1.0 / d) * std::pow(r, dim - 1);
  });
  double cn = 1.0 / (sphere_area(dim) * radial);
  cache[dim] = cn;
  return cn;
}

Mollifier::Mollifier(int dim, double eps) : dim_(dim), eps_(eps) {
  if (!(eps > 0)) throw std::invalid_argument("Mollifier: eps must be positive");
  cn_ = normalization(dim);
}

double Mollifier::eta(const Vec& x) const {
  double r2 = x.norm2();
  if (r2 >= 1.0) return 0.0;
  return cn_ * std::exp(-1.0 / (1.0 - r2));
}

double Mollifier::eta_scaled(const Vec& x) const {
  Vec y = (1.0 / eps_) * x;
  return eta(y) / std::pow(eps_, dim_);
}

std::complex<double> Mollifier::convolve_at(const ComplexField& u, const Vec& x) const {
  const Domain& d = u.domain();
  const int n = d.dim();
  // cells overlapping B(x, eps)
  std::array<int, kMaxDim> lo{}, hi{};
  for (int k = 0; k < n; ++k) {
    lo[k] = static_cast<int>(std::floor((x[k] - eps_ - d.lo(k)) / d.width(k)));
    hi[k] = static_cast<int>(std::floor((x[k] + eps_ - d.lo(k)) / d.width(k)));
    lo[k] = std::max(lo[k], 0);
    hi[k] = std::min(hi[k], d.res(k) - 1);
  }
  const int order = 8;
  const auto& xs = gauss_nodes(order);
  const auto& ws = gauss_weights(order);

  std::complex<double> acc{0.0, 0.0};
  std::array<int, kMaxDim> idx{};
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      if (!d.masked(idx)) return;  // zero extension outside the mask
      Vec c = d.center(idx);
      // split the cell at shape interfaces for indicator fields (1D only;
      // higher dimensions subdivide boundary cells dyadically)
      std::function<std::complex<double>(const std::array<double, kMaxDim>&,
                                         const std::array<double, kMaxDim>&, int)>
          cell_int = [&](const std::array<double, kMaxDim>& cl,
                         const std::array<double, kMaxDim>& ch, int depth) {
            bool needs_split = false;
            if (u.is_indicator() && u.shape()->analytic() && depth < 4) {
              Vec corner_lo(n), corner_hi(n);
              for (int m = 0; m < n; ++m) {
                corner_lo[m] = cl[m];
                corner_hi[m] = ch[m];
              }
              bool c0 = u.shape()->contains(corner_lo);
              bool c1 = u.shape()->contains(corner_hi);
              Vec mid(n);
              for (int m = 0; m < n; ++m) mid[m] = 0.5 * (cl[m] + ch[m]);
              bool cm = u.shape()->contains(mid);
              if (c0 != c1 || c0 != cm) needs_split = true;
            }
            if (needs_split) {
              // bisect along the widest axis
              int ax = 0;
              for (int m = 1; m < n; ++m)
                if (ch[m] - cl[m] > ch[ax] - cl[ax]) ax = m;
              auto cm1 = ch, cl2 = cl;
              cm1[ax] = cl2[ax] = 0.5 * (cl[ax] + ch[ax]);
              return cell_int(cl, cm1, depth + 1) + cell_int(cl2, ch, depth + 1);
            }
            std::complex<double> s{0.0, 0.0};
            std::function<void(int, double, Vec&)> gl = [&](int m, double w, Vec& y) {
              if (m == n) {
                Vec diff = x - y;
                double e = eta_scaled(diff);
                if (e != 0) s += w * e * u.value(y);
                return;
              }
              double half = 0.5 * (ch[m] - cl[m]);
              double mid = 0.5 * (ch[m] + cl[m]);
              for (std::size_t q = 0; q < xs.size(); ++q) {
                y[m] = mid + half * xs[q];
                gl(m + 1, w * half * ws[q], y);
              }
            };
            Vec y(n);
            gl(0, 1.0, y);
            return s;
          };
      std::array<double, kMaxDim> cl{}, ch{};
      for (int m = 0; m < n; ++m) {
        cl[m] = c[m] - 0.5 * d.width(m);
        ch[m] = c[m] + 0.5 * d.width(m);
      }
      acc += cell_int(cl, ch, 0);
      return;
    }
    for (idx[k] = lo[k]; idx[k] <= hi[k]; ++idx[k]) rec(k + 1);
  };
  rec(0);
  return acc;
}

ComplexField mollify(const ComplexField& u, const Mollifier& m) {
  const Domain& d = u.domain();
  if (m.dim() != d.dim()) throw std::invalid_argument("mollify: dimension mismatch");
  if (m.eps() < 0.5 * d.min_width())
    throw std::invalid_argument("mollify: under-resolved mollifier (eps below half a cell)");
  std::vector<std::complex<double>> out(static_cast<std::size_t>(d.total_cells()), 0.0);
  const auto& cells = d.masked_cells();
  parallel_for_chunked(cells.size(), default_chunk_count(cells.size()),
                       [&](std::size_t b, std::size_t e, std::size_t) {
                         for (std::size_t i = b; i < e; ++i)
                           out[static_cast<std::size_t>(cells[i])] =
                               m.convolve_at(u, d.center(cells[i]));
                       });
  return ComplexField::sampled(d, std::move(out));
}

}  // namespace magfrac
