#include "fsnoma/capacity_oma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fsnoma/errors.hpp"
#include "fsnoma/quadrature.hpp"
#include "series.hpp"

namespace fsnoma {

namespace {

constexpr double kBitsPerNat2 = 1.0 / (2.0 * std::numbers::ln2);

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void require_shared_rate(const FadingLink& sr, const FadingLink& rd) {
  if (!same(sr.lambda(), rd.lambda()))
    throw ConstraintError("OMA series: sr and rd links must share ms - 1 = C m");
}

// ln int_0^v z^a (1 + p z)^-b1 (1 + q z)^-b2 dz through
// v^(a+1)/(a+1) F1(a+1; b1, b2; a+2; -p v, -q v), with the F1 moved to
// nonnegative arguments so the result neither overflows nor underflows.
double log_power_integral(double a, double b1, double p, double b2, double q, double v,
                          const SeriesControl& ctl) {
  const double x1 = p * v, x2 = q * v;
  const double f = appell_f1(1.0, b1, b2, a + 2.0, x1 / (1.0 + x1), x2 / (1.0 + x2), ctl);
  return (a + 1.0) * std::log(v) - std::log(a + 1.0) - b1 * std::log1p(x1) - b2 * std::log1p(x2) +
         std::log(f);
}

// Neumaier-compensated sum.
double compensated(std::initializer_list<double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

// Sum of t_n for n = 0, 1, ... with ratio taken from consecutive terms.
template <class Term>
double sum_series(const SeriesControl& ctl, int fixed_terms, long long& terms, Term term) {
  detail::SeriesSum sum(ctl);
  double plain = 0.0, prev = 0.0;
  for (int n = 0;; ++n) {
    const double t = term(n);
    ++terms;
    if (fixed_terms > 0) {
      plain += t;
      if (n + 1 == fixed_terms) return plain;
      continue;
    }
    const double ratio = (n == 0) ? 1.0 : (prev == 0.0 ? (t == 0.0 ? 0.0 : 1.0) : std::abs(t / prev));
    if (sum.add(t, ratio)) return sum.value();
    prev = t;
  }
}

// Double sum over (k, j): inner sums in j, outer ratio from successive inner sizes.
template <class Term>
double sum_double(const SeriesControl& ctl, long long& terms, Term term) {
  detail::SeriesSum outer(ctl);
  double prev = 0.0;
  for (int k = 0;; ++k) {
    double size = 0.0;
    const double inner = sum_series(ctl, 0, terms, [&](int j) {
      const double t = term(k, j);
      size += std::abs(t);
      return t;
    });
    const double ratio = (k == 0) ? 1.0 : (prev == 0.0 ? (size == 0.0 ? 0.0 : 1.0) : size / prev);
    if (k > 1 && outer.add(inner, size, ratio)) return outer.value();
    if (k <= 1) outer.add(inner, size, 2.0);
    prev = size;
  }
}

// (x)_k / k! with sign, updated in place.
struct RisingOverFactorial {
  double x;
  double value = 1.0;
  void advance(int k) { value *= (x + k - 1.0) / k; }
};

// Coefficients of F_S(z) = sum_j D_j w^(2m+j) (1-w)^(2ms) and, for a second
// link with the same rate, F_sr F_S = sum_n E_n w^(m_sr+2m+n) (1-w)^(ms_sr+2ms).
// Each mixture term I_w(a, b) = w^a (1-w)^b / (a B(a, b)) 2F1(a+b, 1; a+1; w).
class MixturePowers {
public:
  MixturePowers(const IidSumLaw& law, const FadingLink* sr) : law_(law), sr_(sr) {
    if (law.weights().empty()) throw TruncationError("OMA series: sum law has no mixture weights");
    b_ = 2.0 * law.link().ms();
    a0_ = 2.0 * law.link().m();
  }

  double D(int j) {
    while (static_cast<int>(D_.size()) <= j) extend_D();
    return D_[j];
  }

  double E(int n) {
    while (static_cast<int>(e_.size()) <= n) {
      const int l = static_cast<int>(e_.size());
      const double msr = sr_->m(), vp = msr + sr_->ms();
      if (l == 0)
        e_.push_back(std::exp(-std::log(msr) - ln_beta(msr, sr_->ms())));
      else
        e_.push_back(e_.back() * (vp + l - 1.0) / (msr + l));
    }
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += D(j) * e_[n - j];
    return s;
  }

private:
  void extend_D() {
    const int j = static_cast<int>(D_.size());
    const auto& p = law_.weights();
    for (int N = 0; N < static_cast<int>(cur_.size()); ++N) {
      const double a = a0_ + N;
      const int k = j - N;
      cur_[N] *= (a + b_ + k - 1.0) / (a + k);
    }
    if (j < static_cast<int>(p.size())) {
      const double a = a0_ + j;
      cur_.push_back(std::exp(-std::log(a) - ln_beta(a, b_)));
    }
    double s = 0.0;
    for (int N = 0; N < static_cast<int>(cur_.size()); ++N) s += p[N] * cur_[N];
    D_.push_back(s);
  }

  const IidSumLaw& law_;
  const FadingLink* sr_;
  double a0_ = 0.0, b_ = 0.0;
  std::vector<double> cur_;  // g_{N, j-N}
  std::vector<double> D_;
  std::vector<double> e_;
};

double log_psi(const FadingLink& sr) {
  return sr.m() * std::log(sr.lambda()) - ln_beta(sr.m(), sr.ms()) - std::log(sr.m());
}

double log_upsilon(const FadingLink& rd) {
  const double m = rd.m(), ms = rd.ms();
  return 2.0 * ln_gamma(m + ms) + 2.0 * m * std::log(rd.lambda()) - 2.0 * ln_gamma(ms) - ln_gamma(2.0 * m + 1.0);
}

// (1 - F_sr(z)) (1 - F_S(z)).
double ccdf_w(const FadingLink& sr, const IidSumLaw& law, double z) { return ccdf(sr, z) * law.ccdf(z); }

}  // namespace

void require_iid_sum(const SystemConfig& cfg) {
  const FadingLink &sd = cfg.links.sd, &rd = cfg.links.rd;
  if (!same(sd.m(), rd.m()) || !same(sd.ms(), rd.ms()) || !same(sd.mean_snr(), rd.mean_snr()))
    throw ConstraintError("OMA: sd and rd links must be identically distributed");
}

// 2F1(m+ms, 2m; 2m+1; -L z) = (1 + L z)^-2m sum_n (m-ms+1)_n (2m)_n / ((2m+1)_n n!) w^n, and
// int_0^v z^(2m+n) (1 + L z)^-(2m+n) / (1 + z) dz closes with the transformed F1.
double oma_j2(const FadingLink& rd, const SeriesControl& ctl, int fixed_terms) {
  validate(ctl);
  const double m = rd.m(), L = rd.lambda();
  RisingOverFactorial c{m - rd.ms() + 1.0};
  long long terms = 0;
  return sum_series(ctl, fixed_terms, terms, [&](int n) {
    if (n > 0) c.advance(n);
    if (c.value == 0.0) return 0.0;
    const double xi = 2.0 * m + n + 1.0;
    const double f = appell_f1(1.0, 2.0 * m + n, 1.0, xi + 1.0, 0.5, 1.0 / (L + 1.0), ctl);
    const double lmag = std::log(std::abs(c.value)) + std::log(2.0 * m / (2.0 * m + n)) - 2.0 * m * std::log(L) -
                        std::log1p(L) - (2.0 * m + n) * std::numbers::ln2 - std::log(xi) + std::log(f);
    return std::copysign(std::exp(lmag), c.value);
  });
}

double oma_j3(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl) {
  validate(ctl);
  const double m = sr.m(), vp = m + sr.ms(), Ls = sr.lambda(), v = 1.0 / rd.lambda();
  long long terms = 0;
  return sum_series(ctl, 0, terms, [&](int l) {
    const double lc = ln_gamma(vp + l) + ln_gamma(m + 1.0) - ln_gamma(m + l + 1.0) - ln_gamma(vp) + l * std::log(Ls);
    return std::exp(lc + log_power_integral(m + l, vp + l, Ls, 1.0, 1.0, v, ctl));
  });
}

double oma_j4(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl) {
  validate(ctl);
  require_shared_rate(sr, rd);
  const double L = rd.lambda(), v = 1.0 / L, mr = rd.m(), msr = sr.m(), vps = msr + sr.ms();
  RisingOverFactorial c{mr - rd.ms() + 1.0};
  long long terms = 0;
  int last_k = 0;
  return sum_double(ctl, terms, [&](int k, int j) {
    if (k != last_k) {
      c.advance(k);
      last_k = k;
    }
    if (c.value == 0.0) return 0.0;
    const double kappa = msr + 2.0 * mr + k + j;
    const double lc = std::log(std::abs(c.value)) + std::log(2.0 * mr / (2.0 * mr + k)) + ln_gamma(vps + j) -
                      ln_gamma(vps) + ln_gamma(msr + 1.0) - ln_gamma(msr + 1.0 + j) + (k + j) * std::log(L);
    return std::copysign(std::exp(lc + log_power_integral(kappa, kappa + sr.ms(), L, 1.0, 1.0, v, ctl)), c.value);
  });
}

double oma_j2_asymptotic(const FadingLink& rd, const SeriesControl& ctl) {
  const double m = rd.m(), v = 1.0 / rd.lambda();
  return std::exp(2.0 * m * std::log(v) - std::log(2.0 * m)) *
         hyp_3f2(2.0 * m, 2.0 * m, m + rd.ms(), 2.0 * m + 1.0, 2.0 * m + 1.0, -1.0, ctl);
}

double oma_j3_asymptotic(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl) {
  const double m = sr.m(), v = 1.0 / rd.lambda();
  return std::exp(m * std::log(v) - std::log(m)) *
         hyp_3f2(m, m, m + sr.ms(), m + 1.0, m + 1.0, -sr.lambda() * v, ctl);
}

double oma_j4_asymptotic(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl) {
  validate(ctl);
  const double Lr = rd.lambda(), Ls = sr.lambda(), v = 1.0 / Lr, mr = rd.m(), msr = sr.m(), vps = msr + sr.ms();
  RisingOverFactorial c{mr - rd.ms() + 1.0};
  long long terms = 0;
  int last_k = 0;
  return sum_double(ctl, terms, [&](int k, int j) {
    if (k != last_k) {
      c.advance(k);
      last_k = k;
    }
    if (c.value == 0.0) return 0.0;
    const double kappa = msr + 2.0 * mr + k + j;
    const double lc = std::log(std::abs(c.value)) + std::log(2.0 * mr / (2.0 * mr + k)) + ln_gamma(vps + j) -
                      ln_gamma(vps) + ln_gamma(msr + 1.0) - ln_gamma(msr + 1.0 + j) + k * std::log(Lr) +
                      j * std::log(Ls);
    return std::copysign(std::exp(lc + log_power_integral(kappa - 1.0, 2.0 * mr + k, Lr, vps + j, Ls, v, ctl)),
                         c.value);
  });
}

OmaSeriesTerms oma_terms(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  validate(pol);
  require_iid_sum(cfg);
  const FadingLink &sr = cfg.links.sr, &rd = cfg.links.rd;
  require_shared_rate(sr, rd);
  const IidSumLaw law(rd, pol.appell);
  const double L = rd.lambda(), v = 1.0 / L, m = rd.m(), ms = rd.ms(), msr = sr.m(), mssr = sr.ms();
  OmaSeriesTerms t;
  t.v = v;
  t.psi = std::exp(log_psi(sr));
  t.upsilon = std::exp(log_upsilon(rd));
  t.J1 = std::log1p(v);
  t.J2 = oma_j2(rd, pol.series);
  t.J3 = oma_j3(sr, rd, pol.series);
  t.J4 = oma_j4(sr, rd, pol.series);
  // w^p (1-w)^q / (1 + z) integrates to L^p int z^p (1 + L z)^-(p+q) / (1 + z).
  auto U = [&](double p, double q) {
    return std::exp(p * std::log(L) + log_power_integral(p, p + q, L, 1.0, 1.0, v, pol.series));
  };
  MixturePowers mix(law, &sr);
  t.S2 = sum_series(pol.series, 0, t.terms, [&](int j) { return mix.D(j) * U(2.0 * m + j, 2.0 * ms); });
  t.S4 = sum_series(pol.series, 0, t.terms,
                    [&](int n) { return mix.E(n) * U(msr + 2.0 * m + n, mssr + 2.0 * ms); });
  const QuadResult tail = integrate_tail(
      [&](double u) {
        const double z = v * std::exp(u);
        if (std::isinf(z)) return 0.0;
        return ccdf_w(sr, law, z) * z / (1.0 + z);
      },
      0.0, pol.quad_tol);
  t.tail = tail.value;
  return t;
}

OmaAsymptoticTerms oma_asymptotic_terms(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  validate(pol);
  require_iid_sum(cfg);
  const FadingLink &sr = cfg.links.sr, &rd = cfg.links.rd;
  require_shared_rate(sr, rd);
  const IidSumLaw law(rd, pol.appell);
  const double v = 1.0 / rd.lambda(), m = rd.m(), ms = rd.ms(), msr = sr.m(), mssr = sr.ms();
  OmaAsymptoticTerms t;
  t.v = v;
  t.psi = std::exp(log_psi(sr));
  t.upsilon = std::exp(log_upsilon(rd));
  t.J1 = std::log(v);
  t.J2 = oma_j2_asymptotic(rd, pol.series);
  t.J3 = oma_j3_asymptotic(sr, rd, pol.series);
  t.J4 = oma_j4_asymptotic(sr, rd, pol.series);
  // w^p (1-w)^q / z integrates to int_0^1 s^(p-1) (1+s)^-(p+q) ds
  //   = 2^-(p+q) 2F1(p+q, 1; p+1; 1/2) / p, a series of positive terms.
  auto V = [&](double p, double q) {
    return std::exp(-(p + q) * std::numbers::ln2 - std::log(p)) * gauss_2f1_series(p + q, 1.0, p + 1.0, 0.5, pol.series);
  };
  MixturePowers mix(law, &sr);
  t.S2 = sum_series(pol.series, 0, t.terms, [&](int j) { return mix.D(j) * V(2.0 * m + j, 2.0 * ms); });
  t.S4 = sum_series(pol.series, 0, t.terms,
                    [&](int n) { return mix.E(n) * V(msr + 2.0 * m + n, mssr + 2.0 * ms); });
  const QuadResult tail = integrate_tail(
      [&](double u) {
        const double z = v * std::exp(u);
        if (std::isinf(z)) return 0.0;
        return ccdf_w(sr, law, z);
      },
      0.0, pol.quad_tol);
  t.tail = tail.value;
  return t;
}

double oma_log1p_quadrature(const SystemConfig& cfg, double rel_tol) {
  require_iid_sum(cfg);
  const IidSumLaw law(cfg.links.rd);
  const FadingLink& sr = cfg.links.sr;
  return log1p_expectation([&](double z) { return ccdf_w(sr, law, z); }, 1.0 / cfg.links.rd.lambda(), rel_tol).value;
}

double oma_log_quadrature(const SystemConfig& cfg, double rel_tol) {
  require_iid_sum(cfg);
  const IidSumLaw law(cfg.links.rd);
  const FadingLink& sr = cfg.links.sr;
  return log_expectation([&](double z) { return 1.0 - ccdf_w(sr, law, z); },
                         [&](double z) { return ccdf_w(sr, law, z); }, 1.0 / cfg.links.rd.lambda(), rel_tol)
      .value;
}

namespace {

CapacityEstimate from_terms(const OmaSeriesTerms& t, Method method, const NumericsPolicy& pol, bool asym) {
  CapacityEstimate out;
  out.method = method;
  const double j3 = t.psi * t.J3, s4 = t.S4;
  out.value = kBitsPerNat2 * compensated({t.J1, -t.S2, -j3, s4, t.tail});
  out.error = kBitsPerNat2 * (pol.series.rel_tol * (std::abs(t.J1) + t.S2 + j3 + s4) + pol.quad_tol * t.tail);
  out.terms = t.terms;
  const double literal = compensated({t.J1, -t.upsilon * t.J2, -j3, t.psi * t.upsilon * t.J4});
  const std::string sfx = asym ? "_asym" : "";
  out.detail = {{"J1" + sfx, kBitsPerNat2 * t.J1},
                {"S2" + sfx, kBitsPerNat2 * t.S2},
                {"Psi*J3" + sfx, kBitsPerNat2 * j3},
                {"S4" + sfx, kBitsPerNat2 * s4},
                {"tail" + sfx, kBitsPerNat2 * t.tail},
                {"Upsilon*J2" + sfx, kBitsPerNat2 * t.upsilon * t.J2},
                {"Psi*Upsilon*J4" + sfx, kBitsPerNat2 * t.psi * t.upsilon * t.J4},
                {"J_combination" + sfx, kBitsPerNat2 * literal}};
  return out;
}

}  // namespace

CapacityEstimate c_oma_exact(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  validate(pol);
  require_iid_sum(cfg);
  std::string why;
  try {
    return from_terms(oma_terms(cfg, pol), Method::exact, pol, false);
  } catch (const Error& e) {
    why = e.what();
  }
  CapacityEstimate out;
  out.method = Method::quadrature;
  out.value = kBitsPerNat2 * oma_log1p_quadrature(cfg, pol.quad_tol);
  out.error = pol.quad_tol * std::abs(out.value);
  out.diagnostic = "series route failed, used quadrature: " + why;
  return out;
}

CapacityEstimate c_oma_asymptotic(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  validate(pol);
  require_iid_sum(cfg);
  std::string why;
  try {
    return from_terms(oma_asymptotic_terms(cfg, pol), Method::asymptotic, pol, true);
  } catch (const Error& e) {
    why = e.what();
  }
  CapacityEstimate out;
  out.method = Method::asymptotic;
  out.value = kBitsPerNat2 * oma_log_quadrature(cfg, pol.quad_tol);
  out.error = pol.quad_tol * std::abs(out.value);
  out.diagnostic = "series route failed, used quadrature: " + why;
  return out;
}

}  // namespace fsnoma
