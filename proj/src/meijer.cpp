#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fsnoma/errors.hpp"
#include "fsnoma/specfun.hpp"
#include "series.hpp"

namespace fsnoma {

using cplx = std::complex<double>;

namespace {

constexpr double kPoleGap = 1e-8;
constexpr double kShiftStep = 0.25;
constexpr int kShiftRetries = 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shape(int m, int n, const std::vector<double>& a, const std::vector<double>& b) {
  const int p = static_cast<int>(a.size());
  const int q = static_cast<int>(b.size());
  if (m < 0 || n < 0 || m > q || n > p) throw DomainError("meijer_g: require 0 <= m <= q, 0 <= n <= p");
  if (p > 5 || q > 5) throw DomainError("meijer_g: p, q <= 5 supported");
  if (m + n == 0) throw DomainError("meijer_g: m + n must be positive");
}

// log of Gamma-ratio kernel at s.
cplx log_kernel(int m, int n, const std::vector<double>& a, const std::vector<double>& b, cplx s) {
  cplx v(0.0, 0.0);
  for (int j = 0; j < static_cast<int>(b.size()); ++j)
    v += (j < m) ? ln_gamma(b[j] - s) : -ln_gamma(1.0 - b[j] + s);
  for (int j = 0; j < static_cast<int>(a.size()); ++j)
    v += (j < n) ? ln_gamma(1.0 - a[j] + s) : -ln_gamma(a[j] - s);
  return v;
}

// Pole families: left poles a_j - 1 - k (j < n), right poles b_j + k (j < m).
double sup_left(int n, const std::vector<double>& a) {
  double v = -kInf;
  for (int j = 0; j < n; ++j) v = std::max(v, a[j] - 1.0);
  return v;
}

double inf_right(int m, const std::vector<double>& b) {
  double v = kInf;
  for (int j = 0; j < m; ++j) v = std::min(v, b[j]);
  return v;
}

double distance_to_poles(double c, int m, int n, const std::vector<double>& a,
                         const std::vector<double>& b) {
  double d = kInf;
  for (int j = 0; j < m; ++j) {
    const double p = b[j];
    d = std::min(d, c <= p ? p - c : std::abs(c - p - std::round(c - p)));
  }
  for (int j = 0; j < n; ++j) {
    const double p = a[j] - 1.0;
    d = std::min(d, c >= p ? c - p : std::abs(p - c - std::round(p - c)));
  }
  return d;
}

double pick_between(double lo, double hi) {
  if (std::isinf(lo) && std::isinf(hi)) return 0.0;
  if (std::isinf(lo)) return hi - 0.5;
  if (std::isinf(hi)) return lo + 0.5;
  return lo + std::min(0.5 * (hi - lo), 0.5);
}

double contour_integral(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                        double x, double c, const ContourControl& ctl) {
  const int N = ctl.node_count;
  const double H = ctl.half_height;
  const double h = 2.0 * H / (N - 1);
  const double lx = std::log(x);
  double full = 0.0, half = 0.0, l1 = 0.0, edge = 0.0;
  for (int k = 0; k < N; ++k) {
    const cplx s(c, -H + k * h);
    const cplx f = std::exp(log_kernel(m, n, a, b, s) + s * lx);
    const double v = f.real();
    full += v;
    if (k % 2 == 0) half += v;
    l1 += std::abs(f);
    if (k == 0 || k == N - 1) edge += std::abs(f);
  }
  const double scale = 1.0 / (2.0 * std::numbers::pi);
  full *= h * scale;
  half *= 2.0 * h * scale;
  l1 *= h * scale;
  edge *= scale;
  const double tol = ctl.rel_tol * std::abs(full) + 1e-13 * l1;
  if (!std::isfinite(full)) throw NonConvergence("meijer_g: contour integral is not finite");
  if (std::abs(full - half) > tol || edge > tol)
    throw NonConvergence("meijer_g: contour quadrature did not reach rel_tol");
  return full;
}

double contour_with_shift_rule(int m, int n, const std::vector<double>& a,
                               const std::vector<double>& b, double x, double c,
                               double right_bound, const ContourControl& ctl) {
  for (int attempt = 0; attempt <= kShiftRetries; ++attempt) {
    if (distance_to_poles(c, m, n, a, b) >= kPoleGap) return contour_integral(m, n, a, b, x, c, ctl);
    c += kShiftStep;
    if (c >= right_bound) break;
  }
  throw PoleCollision("meijer_g: contour stays within 1e-8 of a pole after shifting");
}

}  // namespace

double meijer_g(int m, int n, const std::vector<double>& a, const std::vector<double>& b, double x,
                const ContourControl& ctl) {
  check_shape(m, n, a, b);
  validate(ctl);
  if (!(x > 0.0)) throw DomainError("meijer_g: x must be > 0");
  const double lo = sup_left(n, a);
  const double hi = inf_right(m, b);
  if (!(lo < hi)) throw PoleCollision("meijer_g: left and right pole families overlap");
  const double mid = (std::isinf(lo) || std::isinf(hi)) ? pick_between(lo, hi) : 0.5 * (lo + hi);
  const double c = mid + ctl.shift;
  if (!(c > lo && c < hi)) throw PoleCollision("meijer_g: shifted contour does not separate the poles");
  return contour_with_shift_rule(m, n, a, b, x, c, hi, ctl);
}

double meijer_g_at(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                   double x, double abscissa, const ContourControl& ctl) {
  check_shape(m, n, a, b);
  validate(ctl);
  if (!(x > 0.0)) throw DomainError("meijer_g: x must be > 0");
  return contour_with_shift_rule(m, n, a, b, x, abscissa + ctl.shift, kInf, ctl);
}

double meijer_g_residues(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                         double x, const SeriesControl& ctl) {
  check_shape(m, n, a, b);
  validate(ctl);
  const int p = static_cast<int>(a.size());
  const int q = static_cast<int>(b.size());
  if (!(x > 0.0)) throw DomainError("meijer_g_residues: x must be > 0");
  if (p > q || (p == q && !(x < 1.0)))
    throw DomainError("meijer_g_residues: right residue sum diverges for these arguments");
  if (m == 0) return 0.0;
  for (int h = 0; h < m; ++h)
    for (int j = 0; j < m; ++j)
      if (j != h && std::abs((b[j] - b[h]) - std::round(b[j] - b[h])) < kPoleGap)
        throw PoleCollision("meijer_g_residues: right poles are not simple");

  auto is_pole = [](double v) { return v <= 0.0 && std::abs(v - std::round(v)) < 1e-14; };
  const double lx = std::log(x);
  double total = 0.0;
  for (int h = 0; h < m; ++h) {
    detail::SeriesSum sum(ctl);
    double prev = 0.0;
    for (int k = 0;; ++k) {
      const double s = b[h] + k;
      double lv = s * lx - boost::math::lgamma(static_cast<double>(k + 1));
      int sign = (k % 2 == 0) ? 1 : -1;
      bool zero = false;
      auto mul = [&](double arg, bool numer) {
        if (is_pole(arg)) {
          if (numer) throw PoleCollision("meijer_g_residues: higher-order pole");
          zero = true;
          return;
        }
        int sg = 1;
        const double lg = boost::math::lgamma(arg, &sg);
        lv += numer ? lg : -lg;
        sign *= sg;
      };
      for (int j = 0; j < m && !zero; ++j)
        if (j != h) mul(b[j] - s, true);
      for (int j = 0; j < n && !zero; ++j) mul(1.0 - a[j] + s, true);
      for (int j = m; j < q && !zero; ++j) mul(1.0 - b[j] + s, false);
      for (int j = n; j < p && !zero; ++j) mul(a[j] - s, false);
      const double term = zero ? 0.0 : sign * std::exp(lv);
      const double ratio = (prev != 0.0 && term != 0.0) ? std::abs(term / prev) : 0.5;
      if (k > 2 && sum.add(term, ratio)) break;
      if (k <= 2) sum.add(term, 2.0);
      prev = term;
    }
    total += sum.value();
  }
  return total;
}

namespace {

struct Interval {
  double lo;
  double hi;
};

// Gamma factors that appear in both numerator and denominator cancel. Removing
// them keeps the kernel finite on removable poles and widens the strip.
GBlock reduce(const GBlock& g) {
  const int p = static_cast<int>(g.a.size());
  const int q = static_cast<int>(g.b.size());
  std::vector<bool> a_gone(p, false), b_gone(q, false);
  for (int j = 0; j < g.n; ++j)
    for (int i = g.m; i < q; ++i)
      if (!b_gone[i] && g.a[j] == g.b[i]) {
        a_gone[j] = b_gone[i] = true;
        break;
      }
  for (int j = 0; j < g.m; ++j)
    for (int i = g.n; i < p; ++i)
      if (!a_gone[i] && g.b[j] == g.a[i]) {
        b_gone[j] = a_gone[i] = true;
        break;
      }
  GBlock r{0, 0, {}, {}};
  for (int j = 0; j < p; ++j)
    if (!a_gone[j]) {
      r.a.push_back(g.a[j]);
      if (j < g.n) ++r.n;
    }
  for (int j = 0; j < q; ++j)
    if (!b_gone[j]) {
      r.b.push_back(g.b[j]);
      if (j < g.m) ++r.m;
    }
  return r;
}

Interval separation(const GBlock& g) {
  return {sup_left(g.n, g.a), inf_right(g.m, g.b)};
}

void check_block(const GBlock& g) {
  if (g.m < 0 || g.n < 0 || g.m > static_cast<int>(g.b.size()) || g.n > static_cast<int>(g.a.size()))
    throw DomainError("meijer_g_bivariate: malformed parameter block");
}

}  // namespace

double meijer_g_bivariate_at(const BivariateKernel& raw, double x1, double x2, double c1, double c2,
                             const ContourControl& ctl) {
  check_block(raw.b0);
  check_block(raw.b1);
  check_block(raw.b2);
  const BivariateKernel k{reduce(raw.b0), reduce(raw.b1), reduce(raw.b2)};
  validate(ctl);
  if (!(x1 > 0.0) || !(x2 > 0.0)) throw DomainError("meijer_g_bivariate: x1, x2 must be > 0");
  const Interval i0 = separation(k.b0), i1 = separation(k.b1), i2 = separation(k.b2);
  if (!(c1 > i1.lo && c1 < i1.hi) || !(c2 > i2.lo && c2 < i2.hi) ||
      !(c1 + c2 > i0.lo && c1 + c2 < i0.hi))
    throw PoleCollision("meijer_g_bivariate: contours do not separate the pole families");

  const int N = ctl.node_count;
  const double H = ctl.half_height;
  const double h = 2.0 * H / (N - 1);
  const double l1x = std::log(x1), l2x = std::log(x2);
  std::vector<cplx> A(N), B(N), D(2 * N - 1);
  for (int j = 0; j < N; ++j) {
    const cplx s(c1, -H + j * h);
    const cplx t(c2, -H + j * h);
    A[j] = std::exp(log_kernel(k.b1.m, k.b1.n, k.b1.a, k.b1.b, s) + s * l1x);
    B[j] = std::exp(log_kernel(k.b2.m, k.b2.n, k.b2.a, k.b2.b, t) + t * l2x);
  }
  for (int j = 0; j < 2 * N - 1; ++j) {
    const cplx z(c1 + c2, -2.0 * H + j * h);
    D[j] = std::exp(log_kernel(k.b0.m, k.b0.n, k.b0.a, k.b0.b, z));
  }
  // Split storage keeps the O(N^2) loop free of library complex multiplication.
  std::vector<double> br(N), bi(N), bm(N), dr(2 * N - 1), di(2 * N - 1), dm(2 * N - 1);
  for (int q = 0; q < N; ++q) {
    br[q] = B[q].real();
    bi[q] = B[q].imag();
    bm[q] = std::abs(B[q]);
  }
  for (int j = 0; j < 2 * N - 1; ++j) {
    dr[j] = D[j].real();
    di[j] = D[j].imag();
    dm[j] = std::abs(D[j]);
  }
  cplx full(0.0, 0.0), half(0.0, 0.0);
  double l1 = 0.0;
  for (int j = 0; j < N; ++j) {
    const double* xr = dr.data() + j;
    const double* xi = di.data() + j;
    const double* xm = dm.data() + j;
    double er = 0.0, ei = 0.0, orr = 0.0, oi = 0.0, row_abs = 0.0;
    for (int q = 0; q + 1 < N; q += 2) {
      er += br[q] * xr[q] - bi[q] * xi[q];
      ei += br[q] * xi[q] + bi[q] * xr[q];
      orr += br[q + 1] * xr[q + 1] - bi[q + 1] * xi[q + 1];
      oi += br[q + 1] * xi[q + 1] + bi[q + 1] * xr[q + 1];
      row_abs += bm[q] * xm[q] + bm[q + 1] * xm[q + 1];
    }
    if (N % 2 == 1) {
      const int q = N - 1;
      er += br[q] * xr[q] - bi[q] * xi[q];
      ei += br[q] * xi[q] + bi[q] * xr[q];
      row_abs += bm[q] * xm[q];
    }
    const cplx row(er + orr, ei + oi), row_half(er, ei);
    full += A[j] * row;
    l1 += std::abs(A[j]) * row_abs;
    if (j % 2 == 0) half += A[j] * row_half;
  }
  const double scale = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  const double vf = (full * (h * h * scale)).real();
  const double vh = (half * (4.0 * h * h * scale)).real();
  l1 *= h * h * scale;
  if (!std::isfinite(vf)) throw NonConvergence("meijer_g_bivariate: integral is not finite");
  if (std::abs(vf - vh) > ctl.rel_tol * std::abs(vf) + 1e-13 * l1)
    throw NonConvergence("meijer_g_bivariate: double contour did not reach rel_tol");
  return vf;
}

double meijer_g_bivariate(const BivariateKernel& raw, double x1, double x2, const ContourControl& ctl) {
  check_block(raw.b0);
  check_block(raw.b1);
  check_block(raw.b2);
  const BivariateKernel k{reduce(raw.b0), reduce(raw.b1), reduce(raw.b2)};
  const Interval i0 = separation(k.b0), i1 = separation(k.b1), i2 = separation(k.b2);
  if (!(i1.lo < i1.hi) || !(i2.lo < i2.hi) || !(i0.lo < i0.hi))
    throw PoleCollision("meijer_g_bivariate: a parameter block has overlapping pole families");
  const double c1 = pick_between(i1.lo, i1.hi) + ctl.shift;
  const double lo = std::max(i2.lo, i0.lo - c1);
  const double hi = std::min(i2.hi, i0.hi - c1);
  if (!(lo < hi)) throw PoleCollision("meijer_g_bivariate: no admissible pair of contours");
  const double c2 = (std::isinf(lo) || std::isinf(hi)) ? pick_between(lo, hi) : 0.5 * (lo + hi);
  return meijer_g_bivariate_at(raw, x1, x2, c1, c2, ctl);
}

}  // namespace fsnoma
