#include "magfrac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace magfrac {

std::vector<double> default_s_grid() { return {0.6, 0.7, 0.8, 0.9, 0.95, 0.99}; }

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  os << "s,raw,normalized,target,rel_error\n";
  for (const auto& r : rows)
    os << fmt(r.s) << ',' << fmt(r.raw) << ',' << fmt(r.normalized) << ',' << fmt(r.target)
       << ',' << fmt(r.rel_error) << '\n';
  return os.str();
}

std::string SweepTable::to_svg() const {
  const int W = 640, H = 420, ml = 60, mr = 20, mt = 20, mb = 45;
  double smin = 1, smax = 0, vmin = 0, vmax = 0;
  for (const auto& r : rows) {
    smin = std::min(smin, r.s);
    smax = std::max(smax, r.s);
    vmax = std::max({vmax, r.normalized, r.target});
  }
  if (rows.empty()) {
    smin = 0;
    smax = 1;
  }
  if (smax <= smin) smax = smin + 1e-3;
  if (vmax <= vmin) vmax = vmin + 1;
  vmax *= 1.08;
  auto px = [&](double s) { return ml + (s - smin) / (smax - smin) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (v - vmin) / (vmax - vmin) * (H - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
     << H - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  if (!rows.empty()) {
    double t = rows.front().target;
    os << "<line x1=\"" << ml << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << W - mr
       << "\" y2=\"" << fmt(py(t))
       << "\" stroke=\"#c03030\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << W - mr - 4 << "\" y=\"" << fmt(py(t) - 6)
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#c03030\">target</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#2050c0\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows) os << fmt(px(r.s)) << ',' << fmt(py(r.normalized)) << ' ';
    os << "\"/>\n";
    for (const auto& r : rows)
      os << "<circle cx=\"" << fmt(px(r.s)) << "\" cy=\"" << fmt(py(r.normalized))
         << "\" r=\"3\" fill=\"#2050c0\"/>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-size=\"13\">s</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
     << "\" font-size=\"13\" transform=\"rotate(-90 16 " << (mt + H - mb) / 2
     << ")\" text-anchor=\"middle\">(1-s) energy</text>\n";
  os << "</svg>\n";
  return os.str();
}

SweepTable bbm_sweep(const ComplexField& u, const MagneticPotential& A, const Domain& omega,
                     double p, const std::vector<double>& s_list, const QuadratureSpec& q,
                     SweepTarget target) {
  if (s_list.empty()) throw std::invalid_argument("bbm_sweep: empty s list");
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (!(s_list[i] > 0.0 && s_list[i] < 1.0))
      throw std::invalid_argument("bbm_sweep: every s must be in (0, 1)");
    if (i > 0 && !(s_list[i] > s_list[i - 1]))
      throw std::invalid_argument("bbm_sweep: s list must be strictly increasing");
  }

  SweepTarget kind = target;
  if (kind == SweepTarget::Auto) {
    if (u.is_indicator())
      kind = u.shape()->analytic() ? SweepTarget::IndicatorBv : SweepTarget::BvDual;
    else
      kind = SweepTarget::Local;
  }
  if (kind != SweepTarget::Local && p != 1.0)
    throw std::invalid_argument("bbm_sweep: the total-variation target requires p = 1");

  SphereRule rule = SphereRule::make(omega.dim());
  double qpn = q_constant(p, omega.dim(), rule);
  double tgt = 0;
  switch (kind) {
    case SweepTarget::Local:
      tgt = qpn * local_magnetic_energy(u, A, omega, p, q).value;
      break;
    case SweepTarget::BvDual:
      tgt = qpn * bv_dual(u, A, omega).total;
      break;
    case SweepTarget::IndicatorBv:
      tgt = qpn * indicator_bv(*u.shape(), A, omega);
      break;
    case SweepTarget::Auto:
      break;
  }

  SweepTable t;
  t.metadata["p"] = fmt(p);
  t.metadata["dim"] = std::to_string(omega.dim());
  t.metadata["field"] = u.kind_name();
  t.metadata["potential"] = A.kind_name();
  {
    std::string res;
    for (int k = 0; k < omega.dim(); ++k)
      res += (k ? "x" : "") + std::to_string(omega.res(k));
    t.metadata["resolution"] = res;
    t.metadata["quadrature"] = "order " + std::to_string(q.pair_rule_order) + ", refinement " +
                               std::to_string(q.diagonal_refinement) + ", rel tol " +
                               fmt(q.target_rel_tol);
  }
  t.metadata["target_kind"] = kind == SweepTarget::Local
                                  ? "local"
                                  : (kind == SweepTarget::BvDual ? "bv_dual" : "indicator_bv");
  for (double s : s_list) {
    EnergyResult er = fractional_magnetic_energy(u, A, omega, s, p, q);
    SweepRow row;
    row.s = s;
    row.raw = er.value;
    row.normalized = (1.0 - s) * er.value;
    row.target = tgt;
    row.rel_error = std::fabs(tgt) > 1e-14 ? std::fabs(row.normalized - tgt) / std::fabs(tgt)
                                           : std::fabs(row.normalized - tgt);
    t.rows.push_back(row);
  }
  return t;
}

LimitEstimate extrapolate_limit(const SweepTable& table, bool quadratic) {
  const auto& rows = table.rows;
  if (rows.size() < 3) throw std::invalid_argument("extrapolate_limit: need at least 3 rows");
  double s0 = rows.front().s;
  bool degenerate = true;
  for (const auto& r : rows)
    if (std::fabs(r.s - s0) > 1e-15) degenerate = false;
  if (degenerate) throw std::invalid_argument("extrapolate_limit: degenerate fit (all s equal)");

  // Weighted normal equations for f ~ L + c t (+ d t^2), t = 1-s, w = t^{-2}.
  // The weighting reflects the O(t) model error of the affine expansion.
  int terms = quadratic ? 3 : 2;
  double M[3][3] = {{0}}, b[3] = {0};
  for (const auto& r : rows) {
    double t = 1.0 - r.s;
    double w = 1.0 / (t * t);
    double basis[3] = {1.0, t, t * t};
    for (int i = 0; i < terms; ++i) {
      for (int j = 0; j < terms; ++j) M[i][j] += w * basis[i] * basis[j];
      b[i] += w * basis[i] * r.normalized;
    }
  }
  // Gaussian elimination (tiny system)
  double x[3] = {0};
  for (int col = 0; col < terms; ++col) {
    int piv = col;
    for (int r2 = col + 1; r2 < terms; ++r2)
      if (std::fabs(M[r2][col]) > std::fabs(M[piv][col])) piv = r2;
    std::swap(M[piv], M[col]);
    std::swap(b[piv], b[col]);
    if (std::fabs(M[col][col]) < 1e-300)
      throw std::invalid_argument("extrapolate_limit: singular fit");
    for (int r2 = col + 1; r2 < terms; ++r2) {
      double f = M[r2][col] / M[col][col];
      for (int c2 = col; c2 < terms; ++c2) M[r2][c2] -= f * M[col][c2];
      b[r2] -= f * b[col];
    }
  }
  for (int r2 = terms - 1; r2 >= 0; --r2) {
    double s = b[r2];
    for (int c2 = r2 + 1; c2 < terms; ++c2) s -= M[r2][c2] * x[c2];
    x[r2] = s / M[r2][r2];
  }

  LimitEstimate le;
  le.value = x[0];
  le.slope = x[1];
  le.model = quadratic ? "quadratic" : "affine";
  for (const auto& r : rows) {
    double t = 1.0 - r.s;
    double fit = x[0] + x[1] * t + (quadratic ? x[2] * t * t : 0.0);
    le.residual = std::max(le.residual, std::fabs(fit - r.normalized));
  }
  return le;
}

ByproductReport byproduct_check(const ComplexField& u, const MagneticPotential& A,
                                const Domain& omega, double p,
                                const std::vector<double>& s_list, const QuadratureSpec& q,
                                double energy_tol, double system_tol) {
  ByproductReport rep;
  SweepTable t = bbm_sweep(u, A, omega, p, s_list, q, SweepTarget::Local);
  for (const auto& r : t.rows) rep.max_normalized = std::max(rep.max_normalized, r.normalized);
  if (rep.max_normalized >= energy_tol) {
    rep.hypothesis_met = false;
    rep.message = "hypothesis not met: normalized energies are not small, no system check claimed";
    return rep;
  }
  rep.hypothesis_met = true;
  double worst = 0;
  for (auto c : omega.masked_cells()) {
    auto idx = omega.unlinear(c);
    Vec xc = omega.center(idx);
    CVec g = u.is_sampled() ? u.fd_gradient_at_node(idx) : u.gradient(xc);
    std::complex<double> uv = u.is_sampled() ? u.node_value(c) : u.value(xc);
    Vec a = A.is_zero() ? Vec(omega.dim()) : A.value(xc);
    double r1 = 0, r2 = 0;
    for (int k = 0; k < omega.dim(); ++k) {
      double d1 = g[k].real() + uv.imag() * a[k];  // grad Re u + Im u A
      double d2 = g[k].imag() - uv.real() * a[k];  // grad Im u - Re u A
      r1 += d1 * d1;
      r2 += d2 * d2;
    }
    worst = std::max(worst, std::sqrt(std::max(r1, r2)));
  }
  rep.max_residual = worst;
  rep.system_verified = worst < system_tol;
  rep.message = rep.system_verified
                    ? "vanishing energies and the first-order system verified"
                    : "energies vanish but the first-order system residual exceeds tolerance";
  return rep;
}

}  // namespace magfrac
