#include <cmath>
#include <numbers>
#include <string>

#include "fsnoma/capacity_noma.hpp"
#include "fsnoma/errors.hpp"
#include "fsnoma/quadrature.hpp"
#include "series.hpp"

namespace fsnoma {

namespace {

constexpr double kBitsPerNat2 = 1.0 / (2.0 * std::numbers::ln2);
constexpr double kLog1pAbscissa = 0.5;

double log_theta(const FadingLink& x) { return -ln_gamma(x.m()) - ln_gamma(x.ms()); }

BivariateKernel cross_kernel(const FadingLink& i, const FadingLink& l) {
  BivariateKernel k;
  k.b0 = {2, 1, {-1.0, 0.0}, {-1.0, -1.0}};
  k.b1 = {1, 2, {1.0 - i.ms(), 1.0}, {i.m(), 0.0}};
  k.b2 = {1, 3, {-1.0, -l.ms(), 0.0}, {l.m() - 1.0, 0.0, -1.0}};
  return k;
}

bool equal_rates(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

double log1p_moment(const FadingLink& x, const ContourControl& ctl) {
  const std::vector<double> a{1.0 - x.m(), 1.0, 1.0, 0.0, 1.0};
  const std::vector<double> b{1.0, x.ms(), 0.0, 1.0, 0.0};
  const double g = meijer_g_at(4, 3, a, b, 1.0 / x.lambda(), kLog1pAbscissa, ctl);
  return std::exp(log_theta(x)) * g;
}

double log1p_cross(const FadingLink& i, const FadingLink& l, const ContourControl& ctl) {
  const double g = meijer_g_bivariate(cross_kernel(i, l), i.lambda(), l.lambda(), ctl);
  const double v = std::exp(log_theta(i) + log_theta(l)) * l.lambda() * g;
  if (!std::isfinite(v)) throw NonConvergence("log1p_cross: value is not finite");
  return v;
}

double log1p_min_closed(const FadingLink& x, const FadingLink& y, const NumericsPolicy& pol) {
  double sum = log1p_moment(x, pol.contour) + log1p_moment(y, pol.contour);
  sum -= log1p_cross(x, y, pol.bivariate);
  sum -= log1p_cross(y, x, pol.bivariate);
  return sum;
}

double log1p_min_quadrature(const FadingLink& x, const FadingLink& y, double rel_tol) {
  const double scale = 1.0 / std::max(x.lambda(), y.lambda());
  return log1p_expectation([&](double z) { return min_ccdf(x, y, z); }, scale, rel_tol).value;
}

CapacityEstimate min_link_capacity(const FadingLink& x, const FadingLink& y, const NumericsPolicy& pol) {
  CapacityEstimate out;
  try {
    const double mx = log1p_moment(x, pol.contour), my = log1p_moment(y, pol.contour);
    const double cxy = log1p_cross(x, y, pol.bivariate), cyx = log1p_cross(y, x, pol.bivariate);
    out.value = kBitsPerNat2 * (mx + my - cxy - cyx);
    out.method = Method::exact;
    out.error = kBitsPerNat2 * ((std::abs(mx) + std::abs(my)) * pol.contour.rel_tol +
                                (std::abs(cxy) + std::abs(cyx)) * pol.bivariate.rel_tol);
    out.terms = pol.contour.node_count;
    return out;
  } catch (const Error& e) {
    out.diagnostic = std::string("closed form failed: ") + e.what();
  }
  const double scale = 1.0 / std::max(x.lambda(), y.lambda());
  const QuadResult q = log1p_expectation([&](double z) { return min_ccdf(x, y, z); }, scale, pol.quad_tol);
  out.value = kBitsPerNat2 * q.value;
  out.method = Method::quadrature;
  out.error = kBitsPerNat2 * q.error;
  return out;
}

CapacityEstimate c11_exact(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  return min_link_capacity(cfg.links.sr, cfg.links.sd, pol);
}

CapacityEstimate c12_exact(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  return min_link_capacity(cfg.links.sr.scaled(cfg.a2), cfg.links.sd.scaled(cfg.a2), pol);
}

CapacityEstimate c2_exact(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  return min_link_capacity(cfg.links.sr.scaled(cfg.a2), cfg.links.rd, pol);
}

namespace {

CapacityEstimate combine(const CapacityEstimate& c11, const CapacityEstimate& c12, const CapacityEstimate& c2,
                         Method ok, const char* n11, const char* n12, const char* n2) {
  CapacityEstimate out;
  out.value = c11.value - c12.value + c2.value;
  out.error = c11.error + c12.error + c2.error;
  out.method = ok;
  out.terms = c11.terms + c12.terms + c2.terms;
  out.detail = {{n11, c11.value}, {n12, c12.value}, {n2, c2.value}};
  for (const auto* t : {&c11, &c12, &c2}) {
    if (t->method == Method::quadrature && ok == Method::exact) out.method = Method::quadrature;
    if (!t->diagnostic.empty()) out.diagnostic += (out.diagnostic.empty() ? "" : "; ") + t->diagnostic;
  }
  return out;
}

}  // namespace

CapacityEstimate c_noma_exact(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(pol);
  return c_noma_exact(c11_exact(cfg, pol), cfg, pol);
}

CapacityEstimate c_noma_exact(const CapacityEstimate& c11, const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(pol);
  return combine(c11, c12_exact(cfg, pol), c2_exact(cfg, pol), Method::exact, "C11", "C12", "C2");
}

double log_moment(const FadingLink& x) { return digamma(x.m()) - digamma(x.ms()) - std::log(x.lambda()); }

namespace {

// Equal rates L: with w = L z / (1 + L z),
//   K = sum_n B(m_i+m_l+n, ms_i+ms_l) / ((m_i+n) B(m_i+n, ms_i) B(m_l, ms_l))
//       * (psi(m_i+m_l+n) - psi(ms_i+ms_l) - ln L).
double equal_rate_series(const FadingLink& i, const FadingLink& l, const SeriesControl& ctl, int fixed_terms,
                         long long* terms) {
  const double mi = i.m(), msi = i.ms(), ml = l.m(), msl = l.ms();
  const double b = msi + msl, lnL = std::log(i.lambda()), psib = digamma(b);
  double coef = std::exp(ln_beta(mi + ml, b) - std::log(mi) - ln_beta(mi, msi) - ln_beta(ml, msl));
  double A = mi + ml;
  double psiA = digamma(A);
  detail::SeriesSum sum(ctl);
  double plain = 0.0;
  for (int n = 0;; ++n) {
    const double term = coef * (psiA - psib - lnL);
    const double size = coef * (std::abs(psiA) + std::abs(psib) + std::abs(lnL));
    const double ratio = A / (A + b) * (mi + n + msi) / (mi + n + 1.0);
    if (fixed_terms > 0) {
      plain += term;
      if (n + 1 == fixed_terms) return plain;
    } else if (sum.add(term, size, ratio)) {
      if (terms) *terms += sum.terms();
      return sum.value();
    }
    coef *= ratio;
    psiA += 1.0 / A;
    A += 1.0;
  }
}

// Inner k-sum of coefficient sequence g_{k+1} = g_k (p+k)/(k+1) delta A_k/(A_k+b),
// weighted by psi(A_k) - psi(b) - lnL. Returns {value, size bound}.
struct InnerSum {
  double value;
  double size;
};

InnerSum inner_series(double log_g0, double p, double delta, double A0, double b, double lnL,
                      const SeriesControl& ctl, long long& budget) {
  detail::SeriesSum sum(ctl);
  double size_total = 0.0;
  double g = std::exp(log_g0);
  double A = A0, psiA = digamma(A0);
  const double psib = digamma(b);
  for (int k = 0;; ++k) {
    const double term = g * (psiA - psib - lnL);
    const double size = g * (std::abs(psiA) + std::abs(psib) + std::abs(lnL));
    size_total += size;
    const double r = (p + k) / (k + 1.0) * delta * A / (A + b);
    if (--budget < 0) throw TruncationError("log_cross_series: term budget exhausted");
    if (g == 0.0 || sum.add(term, size, std::max(r, delta))) return {sum.value(), size_total};
    g *= r;
    psiA += 1.0 / A;
    A += 1.0;
  }
}

// Outer n-sum of inner series; ratio estimated from successive size bounds.
template <class Inner>
double outer_series(const SeriesControl& ctl, long long& budget, Inner inner) {
  detail::SeriesSum sum(ctl);
  double prev = 0.0;
  for (int n = 0;; ++n) {
    const InnerSum s = inner(n, budget);
    const double ratio = (n == 0 || prev == 0.0) ? 0.5 : s.size / prev;
    if (n > 2 && sum.add(s.value, s.size, ratio)) return sum.value();
    if (n <= 2) sum.add(s.value, s.size, 2.0);
    prev = s.size;
  }
}

}  // namespace

double log_cross_series(const FadingLink& i, const FadingLink& l, const SeriesControl& ctl, long long* terms) {
  validate(ctl);
  const double Li = i.lambda(), Ll = l.lambda();
  if (equal_rates(Li, Ll)) return equal_rate_series(i, l, ctl, 0, terms);
  const double mi = i.m(), msi = i.ms(), ml = l.m(), msl = l.ms();
  const double vpi = mi + msi, vpl = ml + msl;
  const double lnBl = ln_beta(ml, msl);
  long long budget = ctl.max_terms;
  double value;
  if (Li > Ll) {
    // K = E ln X_l - int ln z (1 - F_i) f_l, expanded in w = L_i z / (1 + L_i z):
    // (1 - F_i) = sum_n cbar_n w^m_i (1-w)^(ms_i+n), f_l dz = rho^m_l w^(m_l-1)
    // (1-w)^(ms_l-1) (1 - delta w)^-(m_l+ms_l) dw / B_l.
    const double rho = Ll / Li, delta = 1.0 - rho, lnL = std::log(Li);
    const double lncb0 = -std::log(msi) - ln_beta(msi, mi);
    const double pre = ml * std::log(rho) - lnBl;
    double lncb = lncb0;
    const double tail = outer_series(ctl, budget, [&](int n, long long& bud) {
      if (n > 0) lncb += std::log((vpi + n - 1.0) / (msi + n));
      const double bn = msl + msi + n;
      const double A0 = ml + mi;
      return inner_series(pre + lncb + ln_beta(A0, bn), vpl, delta, A0, bn, lnL, ctl, bud);
    });
    value = log_moment(l) - tail;
  } else {
    // F_i = sum_n c_n w_i^(m_i+n) (1-w_i)^ms_i with w_i = rho w / (1 - delta w),
    // w = L_l z / (1 + L_l z); expand (1 - delta w)^-(m_i+ms_i+n).
    const double rho = Li / Ll, delta = 1.0 - rho, lnL = std::log(Ll);
    const double b = msi + msl;
    double lnc = -std::log(mi) - ln_beta(mi, msi);
    value = outer_series(ctl, budget, [&](int n, long long& bud) {
      if (n > 0) lnc += std::log((vpi + n - 1.0) / (mi + n));
      const double A0 = ml + mi + n;
      const double lg0 = lnc + (mi + n) * std::log(rho) - lnBl + ln_beta(A0, b);
      return inner_series(lg0, vpi + n, delta, A0, b, lnL, ctl, bud);
    });
  }
  if (terms) *terms += ctl.max_terms - budget;
  return value;
}

double log_cross_equal_rate_partial(const FadingLink& i, const FadingLink& l, int n_terms) {
  if (n_terms < 1) throw DomainError("log_cross_equal_rate_partial: n_terms must be >= 1");
  if (!equal_rates(i.lambda(), l.lambda())) throw DomainError("log_cross_equal_rate_partial: rates differ");
  return equal_rate_series(i, l, SeriesControl{}, n_terms, nullptr);
}

double log_cross_quadrature(const FadingLink& i, const FadingLink& l, double rel_tol) {
  const double t0 = -std::log(l.lambda());
  auto g = [&](double t) {
    const double z = std::exp(t);
    if (z == 0.0 || std::isinf(z)) return 0.0;
    return t * cdf(i, z) * pdf(l, z) * z;
  };
  const QuadResult left = integrate_tail([&](double u) { return g(t0 - u); }, 0.0, rel_tol);
  const QuadResult right = integrate_tail([&](double u) { return g(t0 + u); }, 0.0, rel_tol);
  return left.value + right.value;
}

double log_min_series(const FadingLink& x, const FadingLink& y, const SeriesControl& ctl, long long* terms) {
  return log_moment(x) + log_moment(y) - log_cross_series(x, y, ctl, terms) - log_cross_series(y, x, ctl, terms);
}

double log_min_quadrature(const FadingLink& x, const FadingLink& y, double rel_tol) {
  const double scale = 1.0 / std::max(x.lambda(), y.lambda());
  return log_expectation([&](double u) { return min_cdf(x, y, u); }, [&](double u) { return min_ccdf(x, y, u); },
                         scale, rel_tol)
      .value;
}

namespace {

CapacityEstimate asymptotic_min_term(const FadingLink& x, const FadingLink& y, const NumericsPolicy& pol) {
  CapacityEstimate out;
  out.method = Method::asymptotic;
  try {
    out.value = kBitsPerNat2 * log_min_series(x, y, pol.series, &out.terms);
    out.error = kBitsPerNat2 * pol.series.rel_tol * (std::abs(log_moment(x)) + std::abs(log_moment(y)));
    return out;
  } catch (const Error& e) {
    out.diagnostic = std::string("log series failed, used quadrature: ") + e.what();
  }
  out.value = kBitsPerNat2 * log_min_quadrature(x, y, pol.quad_tol);
  out.error = pol.quad_tol * std::abs(out.value);
  return out;
}

}  // namespace

CapacityEstimate c_noma_asymptotic(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  validate(pol);
  shared_shadowing_ratio(cfg);
  const FadingLink sr = cfg.links.sr, sd = cfg.links.sd, rd = cfg.links.rd;
  const CapacityEstimate c11 = asymptotic_min_term(sr, sd, pol);
  const CapacityEstimate c12 = asymptotic_min_term(sr.scaled(cfg.a2), sd.scaled(cfg.a2), pol);
  const CapacityEstimate c2 = asymptotic_min_term(sr.scaled(cfg.a2), rd, pol);
  return combine(c11, c12, c2, Method::asymptotic, "C11_asym", "C12_asym", "C2_asym");
}

}  // namespace fsnoma
