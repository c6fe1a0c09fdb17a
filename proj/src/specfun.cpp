#include "fsnoma/specfun.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "fsnoma/errors.hpp"
#include "fsnoma/quadrature.hpp"
#include "series.hpp"

namespace fsnoma {

using cplx = std::complex<double>;

void validate(const SeriesControl& ctl) {
  if (ctl.max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  if (!(ctl.rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
  if (!(ctl.abs_tol > 0.0)) throw DomainError("SeriesControl: abs_tol must be > 0");
}

void validate(const ContourControl& ctl) {
  if (ctl.node_count < 16) throw DomainError("ContourControl: node_count must be >= 16");
  if (ctl.node_count % 2 == 0) throw DomainError("ContourControl: node_count must be odd");
  if (!(ctl.half_height > 0.0)) throw DomainError("ContourControl: half_height must be > 0");
  if (!(ctl.rel_tol > 0.0)) throw DomainError("ContourControl: rel_tol must be > 0");
  if (!std::isfinite(ctl.shift)) throw DomainError("ContourControl: shift must be finite");
}

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma: argument must be > 0");
  return boost::math::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be > 0");
  return boost::math::digamma(x);
}

double beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: arguments must be > 0");
  return boost::math::beta(a, b);
}

double ln_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ln_beta: arguments must be > 0");
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

double pochhammer(double x, int n) {
  if (n < 0) throw DomainError("pochhammer: n must be >= 0");
  double p = 1.0;
  for (int k = 0; k < n; ++k) {
    p *= x + k;
    if (p == 0.0) break;
  }
  return p;
}

double incomplete_beta(double c, double a, double b, const SeriesControl& ctl) {
  if (!(a > 0.0)) throw DomainError("incomplete_beta: a must be > 0");
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("incomplete_beta: c must lie in [0, 1]");
  if (c == 0.0) return 0.0;
  if (b > 0.0) return boost::math::beta(a, b, c);
  if (!(c < 1.0)) throw DomainError("incomplete_beta: b <= 0 requires c < 1");
  // c^a sum_k (1-b)_k c^k / (k! (a+k))
  detail::SeriesSum sum(ctl);
  double p = 1.0;
  for (int k = 0;; ++k) {
    const double term = p / (a + k);
    const double ratio = std::abs((1.0 - b + k) / (k + 1.0) * c * (a + k) / (a + k + 1.0));
    if (sum.add(term, ratio)) break;
    p *= (1.0 - b + k) / (k + 1.0) * c;
    if (p == 0.0) break;
  }
  return std::pow(c, a) * sum.value();
}

namespace {

cplx log_sin_pi(cplx z) {
  const double pi = std::numbers::pi;
  const cplx i(0.0, 1.0);
  const double y = z.imag();
  if (std::abs(y) < 10.0) return std::log(std::sin(pi * z));
  if (y > 0.0) return -i * pi * z + std::log(1.0 - std::exp(2.0 * i * pi * z)) + std::log(cplx(0.0, 0.5));
  return i * pi * z + std::log(1.0 - std::exp(-2.0 * i * pi * z)) + std::log(cplx(0.0, -0.5));
}

}  // namespace

cplx ln_gamma(cplx z) {
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) return std::log(pi) - log_sin_pi(z) - ln_gamma(1.0 - z);
  // Re z >= 1/2 keeps each factor's argument in (-pi/2, pi/2), so a pair's
  // product stays on the principal branch.
  cplx acc(0.0, 0.0);
  while (std::abs(z) < 12.0) {
    acc += std::log(z * (z + 1.0));
    z += 2.0;
  }
  static const double coef[] = {1.0 / 12.0,          -1.0 / 360.0,    1.0 / 1260.0,
                                -1.0 / 1680.0,       1.0 / 1188.0,    -691.0 / 360360.0,
                                1.0 / 156.0,         -3617.0 / 122400.0};
  const cplx iz = 1.0 / z;
  const cplx iz2 = iz * iz;
  cplx corr(0.0, 0.0);
  cplx pw = iz;
  for (double c : coef) {
    corr += c * pw;
    pw *= iz2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + corr - acc;
}

double gauss_2f1_series(double a, double b, double c, double x, const SeriesControl& ctl) {
  validate(ctl);
  if (c <= 0.0 && c == std::floor(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
  if (!(std::abs(x) < 1.0)) throw DomainError("gauss_2f1_series: requires |x| < 1");
  detail::SeriesSum sum(ctl);
  double t = 1.0;
  for (int n = 0;; ++n) {
    const double r = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    if (sum.add(t, std::abs(r))) break;
    t *= r;
    if (t == 0.0) break;
  }
  return sum.value();
}

double gauss_2f1(double a, double b, double c, double x, const SeriesControl& ctl) {
  if (!(x < 1.0)) throw DomainError("gauss_2f1: requires x < 1");
  if (x < -0.5) return std::pow(1.0 - x, -b) * gauss_2f1_series(c - a, b, c, x / (x - 1.0), ctl);
  return gauss_2f1_series(a, b, c, x, ctl);
}

namespace {

double hyp_3f2_series(double a1, double a2, double a3, double b1, double b2, double x,
                      const SeriesControl& ctl) {
  detail::SeriesSum sum(ctl);
  double t = 1.0;
  for (int n = 0;; ++n) {
    const double r = (a1 + n) * (a2 + n) * (a3 + n) / ((b1 + n) * (b2 + n) * (n + 1.0)) * x;
    if (sum.add(t, std::abs(r))) break;
    t *= r;
    if (t == 0.0) break;
  }
  return sum.value();
}

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

bool close(double u, double v) { return std::abs(u - v) <= 1e-12 * std::max(1.0, std::abs(u)); }

}  // namespace

double hyp_3f2(double a1, double a2, double a3, double b1, double b2, double x,
               const SeriesControl& ctl) {
  validate(ctl);
  if (is_nonpositive_integer(b1) || is_nonpositive_integer(b2))
    throw DomainError("hyp_3f2: lower parameter is a nonpositive integer");
  if (x >= 1.0) throw DomainError("hyp_3f2: x >= 1 is outside the supported region");
  if (x > -0.5) return hyp_3f2_series(a1, a2, a3, b1, b2, x, ctl);

  // With a + 1 = b_j: 3F2(a, p, q; a+1, d; x) = a int_0^1 t^(a-1) 2F1(p, q; d; x t) dt.
  // Applying (1-y)^(-q) 2F1(d-p, q; d; y/(y-1)) and u = |x| t / (1 + |x| t) gives
  // a |x|^(-a) sum_n (d-p)_n (q)_n / ((d)_n n!) B_u*(a+n, q-a), u* = |x|/(1+|x|).
  const double as[3] = {a1, a2, a3};
  const double bs[2] = {b1, b2};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!close(as[i] + 1.0, bs[j])) continue;
      const double a = as[i];
      if (!(a > 0.0)) continue;
      const double d = bs[1 - j];
      double p = as[(i + 1) % 3];
      double q = as[(i + 2) % 3];
      // Prefer positive coefficients (no cancellation), then a terminating series.
      auto positive = [&](double pp, double qq) { return d - pp > 0.0 && qq > 0.0; };
      if (positive(q, p) && !positive(p, q)) std::swap(p, q);
      else if (!positive(p, q) && is_nonpositive_integer(d - q)) std::swap(p, q);
      SeriesControl inner = ctl;
      inner.rel_tol = std::min(ctl.rel_tol, 1e-15);
      const double ax = std::abs(x);
      const double ustar = ax / (1.0 + ax);
      detail::SeriesSum sum(ctl);
      double coef = 1.0;
      for (int n = 0;; ++n) {
        const double term = coef * incomplete_beta(ustar, a + n, q - a, inner);
        // B_u(a+n+1, .) / B_u(a+n, .) tends to u*.
        const double r = std::abs((d - p + n) * (q + n) / ((d + n) * (n + 1.0))) * ustar;
        if (sum.add(term, r)) break;
        coef *= (d - p + n) * (q + n) / ((d + n) * (n + 1.0));
        if (coef == 0.0) break;
      }
      return a * std::pow(ax, -a) * sum.value();
    }
  }
  if (x > -1.0) return hyp_3f2_series(a1, a2, a3, b1, b2, x, ctl);
  throw DomainError("hyp_3f2: x <= -1 needs a parameter pair a_i + 1 = b_j");
}

double appell_f1_series(double a, double b1, double b2, double c, double x1, double x2,
                        const SeriesControl& ctl) {
  validate(ctl);
  if (is_nonpositive_integer(c)) throw DomainError("appell_f1: c is a nonpositive integer");
  if (!(std::max(std::abs(x1), std::abs(x2)) < 1.0))
    throw DomainError("appell_f1_series: requires max(|x1|, |x2|) < 1");
  detail::SeriesSum outer(ctl);
  double row_head = 1.0;  // (a)_j (b1)_j / ((c)_j j!) x1^j
  for (int j = 0;; ++j) {
    detail::SeriesSum inner(ctl);
    double t = row_head;
    for (int k = 0;; ++k) {
      const double r = (a + j + k) * (b2 + k) / ((c + j + k) * (k + 1.0)) * x2;
      if (inner.add(t, std::abs(r))) break;
      t *= r;
      if (t == 0.0) break;
    }
    const double rj = std::abs((a + j) * (b1 + j) / ((c + j) * (j + 1.0)) * x1);
    // Row sums shrink no slower than the leading terms once past the peak.
    if (outer.add(inner.value(), std::max(rj, std::abs(x1)))) break;
    row_head *= (a + j) * (b1 + j) / ((c + j) * (j + 1.0)) * x1;
    if (row_head == 0.0) break;
  }
  return outer.value();
}

double appell_f1_integral(double a, double b1, double b2, double c, double x1, double x2,
                          double rel_tol) {
  if (!(c > a && a > 0.0)) throw DomainError("appell_f1_integral: requires c > a > 0");
  if (!(x1 < 1.0 && x2 < 1.0)) throw DomainError("appell_f1_integral: requires x1, x2 < 1");
  const double lb = ln_beta(a, c - a);
  auto f = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double lv = (a - 1.0) * std::log(t) + (c - a - 1.0) * std::log1p(-t) -
                      b1 * std::log1p(-x1 * t) - b2 * std::log1p(-x2 * t) - lb;
    return std::exp(lv);
  };
  return integrate_singular(f, 0.0, 1.0, rel_tol).value;
}

double appell_f1(double a, double b1, double b2, double c, double x1, double x2,
                 const SeriesControl& ctl) {
  validate(ctl);
  if (x1 == 0.0 && x2 == 0.0) return 1.0;
  const double direct = std::max(std::abs(x1), std::abs(x2));
  double transformed = 2.0;
  double y1 = 0.0, y2 = 0.0;
  if (x1 < 1.0 && x2 < 1.0) {
    y1 = x1 / (x1 - 1.0);
    y2 = x2 / (x2 - 1.0);
    transformed = std::max(std::abs(y1), std::abs(y2));
  }
  const double best = std::min(direct, transformed);
  // Near the unit circle the double series converges algebraically; the
  // Euler integral is then cheaper and more reliable.
  if (best > 0.9 && c > a && a > 0.0 && x1 < 1.0 && x2 < 1.0)
    return appell_f1_integral(a, b1, b2, c, x1, x2, std::min(ctl.rel_tol, 1e-10));
  if (best >= 1.0) throw DomainError("appell_f1: no convergent representation for these arguments");
  if (direct <= transformed) return appell_f1_series(a, b1, b2, c, x1, x2, ctl);
  const double pre = std::pow(1.0 - x1, -b1) * std::pow(1.0 - x2, -b2);
  return pre * appell_f1_series(c - a, b1, b2, c, y1, y2, ctl);
}

}  // namespace fsnoma
