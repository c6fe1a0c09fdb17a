#include "fsnoma/fading.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>

#include "fsnoma/errors.hpp"
#include "fsnoma/quadrature.hpp"

namespace fsnoma {

namespace {

// Beyond this many mixture weights the sum law switches to convolution quadrature.
constexpr int kMaxMixtureTerms = 4000;

void check_arg(double g, const char* what) {
  if (!(g >= 0.0)) throw DomainError(std::string(what) + ": argument must be >= 0");
}

}  // namespace

FadingLink::FadingLink(double m, double ms, double mean_snr) : m_(m), ms_(ms), mean_snr_(mean_snr) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("FadingLink: m must be > 0");
  if (!(ms > 1.0) || !std::isfinite(ms)) throw DomainError("FadingLink: m_s must be > 1");
  if (!(mean_snr > 0.0) || !std::isfinite(mean_snr))
    throw DomainError("FadingLink: mean SNR must be > 0");
}

double pdf(const FadingLink& link, double gamma) {
  check_arg(gamma, "pdf");
  const double m = link.m(), ms = link.ms(), lam = link.lambda();
  if (gamma == 0.0) {
    if (m < 1.0) return std::numeric_limits<double>::infinity();
    if (m > 1.0) return 0.0;
    return lam / beta(1.0, ms);
  }
  const double lv = m * std::log(lam) + (m - 1.0) * std::log(gamma) - (m + ms) * std::log1p(lam * gamma) -
                    ln_beta(m, ms);
  return std::exp(lv);
}

double cdf(const FadingLink& link, double gamma) {
  check_arg(gamma, "cdf");
  if (gamma == 0.0) return 0.0;
  if (std::isinf(gamma)) return 1.0;
  const double lg = link.lambda() * gamma;
  return boost::math::ibeta(link.m(), link.ms(), lg / (1.0 + lg));
}

double ccdf(const FadingLink& link, double gamma) {
  check_arg(gamma, "ccdf");
  if (gamma == 0.0) return 1.0;
  if (std::isinf(gamma)) return 0.0;
  // I_{1-w}(ms, m) with 1 - w = 1/(1 + L g) formed without cancellation.
  return boost::math::ibeta(link.ms(), link.m(), 1.0 / (1.0 + link.lambda() * gamma));
}

double min_ccdf(const FadingLink& x, const FadingLink& y, double u) {
  check_arg(u, "min_ccdf");
  return ccdf(x, u) * ccdf(y, u);
}

double min_cdf(const FadingLink& x, const FadingLink& y, double u) {
  check_arg(u, "min_cdf");
  const double fx = cdf(x, u), fy = cdf(y, u);
  // Small-argument branch keeps relative accuracy where both CDFs are tiny.
  if (fx + fy < 0.5) return fx + fy - fx * fy;
  return 1.0 - min_ccdf(x, y, u);
}

double min_pdf(const FadingLink& x, const FadingLink& y, double z) {
  check_arg(z, "min_pdf");
  const double px = pdf(x, z), py = pdf(y, z);
  double v = 0.0;
  if (px != 0.0) v += px * ccdf(y, z);
  if (py != 0.0) v += py * ccdf(x, z);
  return v;
}

IidSumLaw::IidSumLaw(const FadingLink& link, const SeriesControl& ctl) : link_(link) {
  validate(ctl);
  const double m = link.m(), ms = link.ms(), vp = m + ms;
  const int cap = std::min(ctl.max_terms, kMaxMixtureTerms);
  // p_N = Gamma(2ms) / (Gamma(2m+2ms+N) B(m,ms)^2) sum_j c_j c_{N-j},
  // ln c_j = ln Gamma(vp+j) - ln Gamma(vp) + ln Gamma(m+j) - ln Gamma(j+1).
  std::vector<double> lc;
  lc.reserve(256);
  const double base = ln_gamma(2.0 * ms) - 2.0 * ln_beta(m, ms);
  double mass = 0.0;
  for (int n = 0; n < cap; ++n) {
    lc.push_back(ln_gamma(vp + n) - ln_gamma(vp) + ln_gamma(m + n) - ln_gamma(n + 1.0));
    const double scale = base - ln_gamma(2.0 * m + 2.0 * ms + n);
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) acc += std::exp(lc[j] + lc[n - j] + scale);
    weights_.push_back(acc);
    mass += acc;
    missing_ = std::max(0.0, 1.0 - mass);
    if (missing_ <= ctl.rel_tol) return;
  }
  weights_.clear();
  missing_ = 1.0;
}

double IidSumLaw::cdf(double z) const {
  check_arg(z, "IidSumLaw::cdf");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  if (weights_.empty()) {
    // Convolution route: F(z) = int_0^z f(x) F(z - x) dx.
    const FadingLink& l = link_;
    auto g = [&](double x) {
      if (x <= 0.0 || x >= z) return 0.0;
      return pdf(l, x) * fsnoma::cdf(l, z - x);
    };
    return integrate_singular(g, 0.0, z, 1e-12).value;
  }
  const double lz = link_.lambda() * z;
  const double w = lz / (1.0 + lz);
  const double two_m = 2.0 * link_.m(), two_ms = 2.0 * link_.ms();
  double s = 0.0;
  for (std::size_t n = 0; n < weights_.size(); ++n) {
    const double t = weights_[n] * boost::math::ibeta(two_m + n, two_ms, w);
    s += t;
    if (t < 1e-17 * s) break;
  }
  return s;
}

double IidSumLaw::ccdf(double z) const {
  check_arg(z, "IidSumLaw::ccdf");
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  if (weights_.empty()) return 1.0 - cdf(z);
  const double lz = link_.lambda() * z;
  const double wc = 1.0 / (1.0 + lz);
  const double two_m = 2.0 * link_.m(), two_ms = 2.0 * link_.ms();
  double s = missing_;
  for (std::size_t n = 0; n < weights_.size(); ++n)
    s += weights_[n] * boost::math::ibeta(two_ms, two_m + n, wc);
  return s;
}

double sum_cdf_iid(const FadingLink& link, double z, const SeriesControl& ctl) {
  return IidSumLaw(link, ctl).cdf(z);
}

double sum_cdf_iid_printed(const FadingLink& link, double z, const SeriesControl& ctl) {
  check_arg(z, "sum_cdf_iid_printed");
  if (z == 0.0) return 0.0;
  const double m = link.m(), ms = link.ms(), lam = link.lambda(), vp = m + ms;
  const double upsilon =
      std::exp(2.0 * ln_gamma(vp) + 2.0 * m * std::log(lam) - 2.0 * ln_gamma(ms) - ln_gamma(2.0 * m + 1.0));
  return upsilon * std::pow(z, 2.0 * m) * gauss_2f1(vp, 2.0 * m, 2.0 * m + 1.0, -lam * z, ctl);
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t counter)
    : state_(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(counter * 0xd1b54a32d192ed03ULL + 1)) {}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

}  // namespace fsnoma
