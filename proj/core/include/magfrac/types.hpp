#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace magfrac {

inline constexpr int kMaxDim = 4;

/// Small fixed-capacity real vector for points and directions (dim <= 4).
struct Vec {
  int n = 0;
  std::array<double, kMaxDim> c{};

  Vec() = default;
  explicit Vec(int dim) : n(dim) { c.fill(0.0); }
  Vec(std::initializer_list<double> xs) {
    n = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (int i = 0; i < n; ++i) c[i] *= a;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += c[i] * c[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  bool finite() const {
    for (int i = 0; i < n; ++i)
      if (!std::isfinite(c[i])) return false;
    return true;
  }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
  return s;
}

/// Complex vector of the same capacity; holds gradient-type quantities.
struct CVec {
  int n = 0;
  std::array<std::complex<double>, kMaxDim> c{};

  CVec() = default;
  explicit CVec(int dim) : n(dim) {}

  std::complex<double>& operator[](int i) { return c[i]; }
  const std::complex<double>& operator[](int i) const { return c[i]; }

  bool finite() const {
    for (int i = 0; i < n; ++i)
      if (!std::isfinite(c[i].real()) || !std::isfinite(c[i].imag())) return false;
    return true;
  }
};

/// v . h for complex v and real h (no conjugation).
inline std::complex<double> dot(const CVec& v, const Vec& h) {
  std::complex<double> s{0.0, 0.0};
  for (int i = 0; i < v.n; ++i) s += v.c[i] * h.c[i];
  return s;
}

namespace detail {

// |t|^p with fast paths for the exponents that dominate the workload.
inline double abs_pow(double t, double p) {
  double a = std::fabs(t);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

// (|Re z|^p + |Im z|^p) for scalar z, no finiteness check.
inline double pnorm_pow_scalar(std::complex<double> z, double p) {
  return abs_pow(z.real(), p) + abs_pow(z.imag(), p);
}

inline double pnorm_pow_vec(const CVec& z, double p) {
  double re2 = 0, im2 = 0;
  for (int i = 0; i < z.n; ++i) {
    re2 += z.c[i].real() * z.c[i].real();
    im2 += z.c[i].imag() * z.c[i].imag();
  }
  return abs_pow(std::sqrt(re2), p) + abs_pow(std::sqrt(im2), p);
}

}  // namespace detail

/// p-norm on C^N splitting real and imaginary real vectors:
/// |z|_p = (|Re z|^p + |Im z|^p)^(1/p) with Euclidean norms of the parts.
/// Coincides with the Euclidean norm for real z.
inline double pnorm(const CVec& z, double p) {
  if (p < 1.0) throw std::invalid_argument("pnorm: p must be >= 1");
  if (!z.finite()) throw std::invalid_argument("pnorm: non-finite input (invalid field)");
  return std::pow(detail::pnorm_pow_vec(z, p), 1.0 / p);
}

inline double pnorm(std::complex<double> z, double p) {
  if (p < 1.0) throw std::invalid_argument("pnorm: p must be >= 1");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("pnorm: non-finite input (invalid field)");
  return std::pow(detail::pnorm_pow_scalar(z, p), 1.0 / p);
}

/// |z|_p^p (the power actually used by every energy integrand).
inline double pnorm_pow(const CVec& z, double p) {
  if (p < 1.0) throw std::invalid_argument("pnorm_pow: p must be >= 1");
  if (!z.finite()) throw std::invalid_argument("pnorm_pow: non-finite input (invalid field)");
  return detail::pnorm_pow_vec(z, p);
}

inline double pnorm_pow(std::complex<double> z, double p) {
  if (p < 1.0) throw std::invalid_argument("pnorm_pow: p must be >= 1");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("pnorm_pow: non-finite input (invalid field)");
  return detail::pnorm_pow_scalar(z, p);
}

}  // namespace magfrac
