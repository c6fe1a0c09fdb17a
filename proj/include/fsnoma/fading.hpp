#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "fsnoma/specfun.hpp"

namespace fsnoma {

// One Fisher-Snedecor F faded link. The SNR gamma has density
//   f(g) = L^m g^(m-1) (1 + L g)^-(m+ms) / B(m, ms),  L = m / ((ms - 1) mean_snr).
// The rate L is always derived from (m, ms, mean_snr).
class FadingLink {
public:
  FadingLink(double m, double ms, double mean_snr);

  double m() const { return m_; }
  double ms() const { return ms_; }
  double mean_snr() const { return mean_snr_; }
  double lambda() const { return m_ / ((ms_ - 1.0) * mean_snr_); }

  // Same shape, mean SNR multiplied by factor.
  FadingLink scaled(double factor) const { return FadingLink(m_, ms_, mean_snr_ * factor); }

private:
  double m_;
  double ms_;
  double mean_snr_;
};

struct LinkTriple {
  FadingLink sr;
  FadingLink rd;
  FadingLink sd;
};

double pdf(const FadingLink& link, double gamma);
double cdf(const FadingLink& link, double gamma);
double ccdf(const FadingLink& link, double gamma);

// Minimum of two independent links.
double min_cdf(const FadingLink& x, const FadingLink& y, double u);
double min_ccdf(const FadingLink& x, const FadingLink& y, double u);
double min_pdf(const FadingLink& x, const FadingLink& y, double z);

// Law of the sum of two i.i.d. copies of a link. With w = L z / (1 + L z),
//   F(z) = sum_N p_N I_w(2m + N, 2ms),
// p_N = B(2m+N, 2ms) / B(m, ms)^2 * sum_{j+k=N} (m+ms)_j (m+ms)_k B(m+k, m+j) / (j! k!).
// The weights sum to one; they are accumulated until the missing mass drops
// below ctl.rel_tol.
class IidSumLaw {
public:
  explicit IidSumLaw(const FadingLink& link, const SeriesControl& ctl = {});

  double cdf(double z) const;
  double ccdf(double z) const;
  const std::vector<double>& weights() const { return weights_; }
  // Probability mass not carried by the stored weights.
  double missing_mass() const { return missing_; }
  const FadingLink& link() const { return link_; }

private:
  FadingLink link_;
  std::vector<double> weights_;
  double missing_ = 0.0;
};

double sum_cdf_iid(const FadingLink& link, double z, const SeriesControl& ctl = {});

// Literal closed form Upsilon z^(2m) 2F1(m+ms, 2m; 2m+1; -L z) with
// Upsilon = Gamma(m+ms)^2 L^(2m) / (Gamma(ms)^2 Gamma(2m+1)). It exceeds one
// for large z, so it is kept for comparison only.
double sum_cdf_iid_printed(const FadingLink& link, double z, const SeriesControl& ctl = {});

// Counter-based stream: the state is a pure function of (seed, counter), so a
// sample index maps to the same draws regardless of how work is partitioned.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  SplitMix64(std::uint64_t seed, std::uint64_t counter);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

// Gamma-ratio construction: g = mean_snr (ms - 1) / m * A / B with
// A ~ Gamma(m, 1), B ~ Gamma(ms, 1).
template <class Urbg>
double sample(const FadingLink& link, Urbg& rng) {
  std::gamma_distribution<double> ga(link.m(), 1.0);
  std::gamma_distribution<double> gb(link.ms(), 1.0);
  const double a = ga(rng);
  const double b = gb(rng);
  return link.mean_snr() * (link.ms() - 1.0) / link.m() * a / b;
}

}  // namespace fsnoma
