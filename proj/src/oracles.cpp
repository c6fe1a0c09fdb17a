#include "fsnoma/oracles.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "fsnoma/capacity_oma.hpp"
#include "fsnoma/errors.hpp"
#include "fsnoma/fading.hpp"

namespace fsnoma {

namespace {

constexpr double kBitsPerNat2 = 1.0 / (2.0 * std::numbers::ln2);
constexpr long long kBlock = 4096;

// Running mean and sum of squared deviations.
struct Moments {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    const long long nn = n + o.n;
    mean += d * nb / static_cast<double>(nn);
    m2 += o.m2 + d * d * na * nb / static_cast<double>(nn);
    n = nn;
  }

  double ci95() const { return n > 1 ? 1.96 * std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; }
};

template <std::size_t K>
using BlockStats = std::array<Moments, K>;

// Runs sample(i, out) for i in [0, n) and reduces per-block statistics in index order.
template <std::size_t K, class Sample>
BlockStats<K> run(const McSettings& mc, Sample sample) {
  const long long n_blocks = (mc.n_samples + kBlock - 1) / kBlock;
  std::vector<BlockStats<K>> blocks(static_cast<std::size_t>(n_blocks));
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (long long b = next++; b < n_blocks; b = next++) {
      BlockStats<K>& acc = blocks[static_cast<std::size_t>(b)];
      const long long end = std::min(mc.n_samples, (b + 1) * kBlock);
      std::array<double, K> x{};
      for (long long i = b * kBlock; i < end; ++i) {
        sample(static_cast<std::uint64_t>(i), x);
        for (std::size_t k = 0; k < K; ++k) acc[k].add(x[k]);
      }
    }
  };
  const int workers = static_cast<int>(std::min<long long>(mc.n_workers, n_blocks));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  BlockStats<K> total{};
  for (const auto& b : blocks)
    for (std::size_t k = 0; k < K; ++k) total[k].merge(b[k]);
  return total;
}

// |h|^2 with unit mean, so that g |h|^2 has the link's law at mean g.
template <class Urbg>
double unit_gain(const FadingLink& link, Urbg& rng) {
  return sample(link, rng) / link.mean_snr();
}

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

// F_S(z) and 1 - F_S(z) for the sum of two i.i.d. copies, by convolution.
double sum_cdf_conv(const FadingLink& x, double z, double tol) {
  if (z <= 0.0) return 0.0;
  return integrate_singular([&](double t) { return pdf(x, t) * cdf(x, z - t); }, 0.0, z, tol).value;
}

double sum_ccdf_conv(const FadingLink& x, double z, double tol) {
  if (z <= 0.0) return 1.0;
  return ccdf(x, z) + integrate_singular([&](double t) { return pdf(x, t) * ccdf(x, z - t); }, 0.0, z, tol).value;
}

}  // namespace

void validate(const McSettings& mc) {
  if (mc.n_samples < 1) throw DomainError("McSettings: n_samples must be at least 1");
  if (mc.n_workers < 1) throw DomainError("McSettings: n_workers must be at least 1");
}

McResult simulate_noma(const SystemConfig& cfg, const McSettings& mc) {
  validate(cfg);
  validate(mc);
  const double g = cfg.mean_snr, a1 = cfg.a1, a2 = cfg.a2;
  const auto s = run<3>(mc, [&](std::uint64_t i, std::array<double, 3>& x) {
    SplitMix64 rng(mc.master_seed, i);
    const double h_sr = unit_gain(cfg.links.sr, rng);
    const double h_rd = unit_gain(cfg.links.rd, rng);
    const double h_sd = unit_gain(cfg.links.sd, rng);
    const double sr1 = a1 * g * h_sr / (a2 * g * h_sr + 1.0);
    const double sd = a1 * g * h_sd / (a2 * g * h_sd + 1.0);
    const double sr2 = a2 * g * h_sr;
    const double rd = g * h_rd;
    x[1] = 0.5 * log2_1p(std::min(sr1, sd));
    x[2] = 0.5 * log2_1p(std::min(sr2, rd));
    x[0] = x[1] + x[2];
  });
  McResult r;
  r.mean = s[0].mean;
  r.ci95 = s[0].ci95();
  r.n_samples = s[0].n;
  r.per_term = {{"C1", s[1].mean}, {"C2", s[2].mean}};
  return r;
}

McResult simulate_oma(const SystemConfig& cfg, const McSettings& mc, const OmaSimHooks& hooks) {
  validate(cfg);
  validate(mc);
  const double g = cfg.mean_snr;
  const auto s = run<1>(mc, [&](std::uint64_t i, std::array<double, 1>& x) {
    SplitMix64 rng(mc.master_seed, i);
    const double h_sr = unit_gain(cfg.links.sr, rng);
    double h_rd = unit_gain(cfg.links.rd, rng);
    const double h_sd = unit_gain(cfg.links.sd, rng);
    if (hooks.drop_rd) h_rd = 0.0;
    x[0] = 0.5 * log2_1p(g * std::min(h_sr, h_sd + h_rd));
  });
  McResult r;
  r.mean = s[0].mean;
  r.ci95 = s[0].ci95();
  r.n_samples = s[0].n;
  return r;
}

CapacityEstimate capacity_quadrature(const Integrand& density, double scale, double z_hint, const NumericsPolicy& pol) {
  if (!(scale > 0.0) || !(z_hint > 0.0)) throw DomainError("capacity_quadrature: scale and z_hint must be positive");
  const double t0 = std::log(z_hint);
  auto line = [&](const Integrand& g) {
    auto h = [&](double t) {
      const double z = std::exp(t);
      if (z == 0.0 || std::isinf(z)) return 0.0;
      const double v = g(z) * z;
      return std::isfinite(v) ? v : 0.0;
    };
    const QuadResult l = integrate_tail([&](double u) { return h(t0 - u); }, 0.0, pol.quad_tol);
    const QuadResult r = integrate_tail([&](double u) { return h(t0 + u); }, 0.0, pol.quad_tol);
    return QuadResult{l.value + r.value, l.error + r.error};
  };
  const QuadResult mass = line(density);
  if (std::abs(mass.value - 1.0) > 1e-6) throw DomainError("capacity_quadrature: density does not integrate to one");
  const QuadResult q = line([&](double z) { return std::log1p(scale * z) * density(z); });
  if (!(q.error <= pol.quad_tol * std::max(1.0, std::abs(q.value))))
    throw NonConvergence("capacity_quadrature: error estimate above quad_tol");
  CapacityEstimate out;
  out.method = Method::quadrature;
  out.value = kBitsPerNat2 * q.value;
  out.error = kBitsPerNat2 * q.error;
  return out;
}

std::vector<CapacityTerm> noma_terms_quadrature(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  const FadingLink &sr = cfg.links.sr, &rd = cfg.links.rd, &sd = cfg.links.sd;
  const FadingLink sr2 = sr.scaled(cfg.a2);
  auto hint = [](const FadingLink& x, const FadingLink& y) { return std::min(x.mean_snr(), y.mean_snr()); };
  auto min_density = [](const FadingLink& x, const FadingLink& y) {
    return [&x, &y](double z) { return min_pdf(x, y, z); };
  };
  return {{"C11", capacity_quadrature(min_density(sr, sd), 1.0, hint(sr, sd), pol).value},
          {"C12", capacity_quadrature(min_density(sr, sd), cfg.a2, hint(sr, sd), pol).value},
          {"C2", capacity_quadrature(min_density(sr2, rd), 1.0, hint(sr2, rd), pol).value}};
}

std::vector<CapacityTerm> oma_terms_quadrature(const SystemConfig& cfg, const NumericsPolicy& pol) {
  validate(cfg);
  const FadingLink &sr = cfg.links.sr, &rd = cfg.links.rd;
  require_iid_sum(cfg);
  const double v = 1.0 / rd.lambda();
  const double mr = rd.m(), msr = rd.ms(), Lr = rd.lambda();
  const double ms = sr.m(), mss = sr.ms(), Ls = sr.lambda();
  const double ln_ups = 2.0 * ln_gamma(mr + msr) + 2.0 * mr * std::log(Lr) - 2.0 * ln_gamma(msr) - ln_gamma(2.0 * mr + 1.0);
  const double ln_psi = ms * std::log(Ls) - std::log(ms) - ln_beta(ms, mss);
  const SeriesControl ctl = pol.series;
  auto ups_kernel = [&](double z) {
    return std::exp(ln_ups + 2.0 * mr * std::log(z)) * gauss_2f1(mr + msr, 2.0 * mr, 2.0 * mr + 1.0, -Lr * z, ctl);
  };
  auto psi_kernel = [&](double z) {
    return std::exp(ln_psi + ms * std::log(z)) * gauss_2f1(ms, ms + mss, ms + 1.0, -Ls * z, ctl);
  };
  auto on_range = [&](const Integrand& f) {
    return kBitsPerNat2 * integrate_singular([&](double z) { return z == 0.0 ? 0.0 : f(z) / (1.0 + z); }, 0.0, v,
                                             pol.quad_tol)
                              .value;
  };
  const double tol = 0.1 * pol.quad_tol;
  const double tail =
      kBitsPerNat2 *
      integrate_tail([&](double u) { return ccdf(sr, v + u) * sum_ccdf_conv(rd, v + u, tol) / (1.0 + v + u); }, 0.0,
                     pol.quad_tol)
          .value;
  return {{"Upsilon*J2", on_range(ups_kernel)},
          {"Psi*J3", on_range(psi_kernel)},
          {"Psi*Upsilon*J4", on_range([&](double z) { return psi_kernel(z) * ups_kernel(z); })},
          {"S2", on_range([&](double z) { return sum_cdf_conv(rd, z, tol); })},
          {"S4", on_range([&](double z) { return cdf(sr, z) * sum_cdf_conv(rd, z, tol); })},
          {"tail", tail}};
}

}  // namespace fsnoma
