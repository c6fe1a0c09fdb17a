#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fsnoma/capacity_noma.hpp"
#include "fsnoma/capacity_oma.hpp"
#include "fsnoma/errors.hpp"
#include "fsnoma/oracles.hpp"

using namespace fsnoma;

namespace {

const double kBits = 1.0 / (2.0 * std::numbers::ln2);

SystemConfig defaults(double db, double a2 = 0.01) {
  return make_config({5, 16}, {5, 16}, {5, 16}, a2, db_to_linear(db));
}

McSettings settings(long long n, int workers = 1, std::uint64_t seed = 7) { return {n, seed, workers}; }

bool agrees(double mc, double ci, double ref) { return std::abs(mc - ref) <= std::max(0.01 * std::abs(ref), ci); }

double term(const std::vector<CapacityTerm>& ts, const std::string& name) {
  for (const auto& t : ts)
    if (t.name == name) return t.value;
  ADD_FAILURE() << "missing term " << name;
  return 0.0;
}

}  // namespace

TEST(MonteCarlo, RepeatRunsAreBitIdentical) {
  const auto cfg = defaults(20);
  const auto a = simulate_noma(cfg, settings(50000, 2)), b = simulate_noma(cfg, settings(50000, 2));
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.ci95, b.ci95);
  EXPECT_EQ(a.per_term[0].value, b.per_term[0].value);
  EXPECT_EQ(simulate_oma(cfg, settings(50000, 2)).mean, simulate_oma(cfg, settings(50000, 2)).mean);
}

TEST(MonteCarlo, InvariantToWorkerCount) {
  const auto cfg = defaults(30, 0.2);
  const auto base = simulate_noma(cfg, settings(100001, 1));
  const auto oma = simulate_oma(cfg, settings(100001, 1));
  for (int w : {2, 3, 8}) {
    const auto r = simulate_noma(cfg, settings(100001, w));
    EXPECT_EQ(r.mean, base.mean) << w;
    EXPECT_EQ(r.ci95, base.ci95) << w;
    EXPECT_EQ(r.n_samples, 100001);
    EXPECT_EQ(simulate_oma(cfg, settings(100001, w)).mean, oma.mean) << w;
  }
}

TEST(MonteCarlo, SeedChangesTheStream) {
  const auto cfg = defaults(20);
  EXPECT_NE(simulate_oma(cfg, settings(10000, 1, 1)).mean, simulate_oma(cfg, settings(10000, 1, 2)).mean);
}

TEST(MonteCarlo, ConfidenceHalvesWithFourTimesTheSamples) {
  const auto cfg = defaults(20);
  for (bool noma : {true, false}) {
    const auto a = noma ? simulate_noma(cfg, settings(100000)) : simulate_oma(cfg, settings(100000));
    const auto b = noma ? simulate_noma(cfg, settings(400000)) : simulate_oma(cfg, settings(400000));
    const double r = b.ci95 / a.ci95;
    EXPECT_GE(r, 0.375);
    EXPECT_LE(r, 0.625);
  }
}

TEST(MonteCarlo, NomaMatchesClosedForm) {
  const NumericsPolicy pol;
  for (auto [db, a2] : std::vector<std::pair<double, double>>{{30, 0.01}, {10, 0.2}}) {
    const auto cfg = defaults(db, a2);
    const auto r = simulate_noma(cfg, settings(200000, 2));
    const auto e = c_noma_exact(cfg, pol);
    EXPECT_TRUE(agrees(r.mean, r.ci95, e.value)) << r.mean << " vs " << e.value;
    EXPECT_NEAR(r.per_term[0].value + r.per_term[1].value, r.mean, 1e-12);
    const double c2 = c2_exact(cfg, pol).value;
    EXPECT_TRUE(agrees(r.per_term[1].value, r.ci95, c2));
  }
}

TEST(MonteCarlo, OmaMatchesClosedForm) {
  const NumericsPolicy pol;
  for (double db : {5.0, 20.0}) {
    const auto cfg = defaults(db);
    const auto r = simulate_oma(cfg, settings(200000, 2));
    const double ex = c_oma_exact(cfg, pol).value;
    EXPECT_TRUE(agrees(r.mean, r.ci95, ex)) << r.mean << " vs " << ex;
  }
}

TEST(MonteCarlo, VanishesWithSnr) {
  double prev = INFINITY;
  for (double db : {0.0, -10.0, -20.0, -30.0}) {
    const double c = simulate_noma(defaults(db), settings(20000)).mean;
    EXPECT_LT(c, prev) << db;
    prev = c;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(MonteCarlo, DroppingRelayLinkLowersOma) {
  const auto cfg = defaults(20);
  EXPECT_LT(simulate_oma(cfg, settings(50000), {true}).mean, simulate_oma(cfg, settings(50000)).mean);
}

TEST(MonteCarlo, RejectsInvalidSettings) {
  EXPECT_THROW(simulate_noma(defaults(20), settings(0)), DomainError);
  EXPECT_THROW(simulate_oma(defaults(20), settings(10, 0)), DomainError);
}

TEST(CapacityQuadrature, NarrowSpikeSiftsLogarithm) {
  const double z0 = 7.0, s = 1e-3;
  auto spike = [&](double z) {
    const double t = (std::log(z) - std::log(z0)) / s;
    return std::exp(-0.5 * t * t) / (z * s * std::sqrt(2.0 * std::numbers::pi));
  };
  EXPECT_NEAR(capacity_quadrature(spike, 1.0, z0, NumericsPolicy{}).value, kBits * std::log(8.0), 1e-5);
}

TEST(CapacityQuadrature, ScaledDensityEqualsScaledLogarithm) {
  const NumericsPolicy pol;
  const FadingLink x(2, 5, 10);
  for (double a : {0.01, 0.3, 4.0}) {
    const FadingLink ax = x.scaled(a);
    const double direct = capacity_quadrature([&](double z) { return pdf(ax, z); }, 1.0, ax.mean_snr(), pol).value;
    const double mapped = capacity_quadrature([&](double z) { return pdf(x, z); }, a, x.mean_snr(), pol).value;
    EXPECT_NEAR(direct, mapped, 1e-8) << a;
  }
}

TEST(CapacityQuadrature, MinDensityMatchesSampling) {
  const FadingLink x(5, 16, 100);
  const double q =
      capacity_quadrature([&](double z) { return min_pdf(x, x, z); }, 1.0, 100.0, NumericsPolicy{}).value;
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    SplitMix64 rng(11, static_cast<std::uint64_t>(i));
    const double a = sample(x, rng), b = sample(x, rng);
    const double c = 0.5 * std::log2(1.0 + std::min(a, b));
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / n, ci = 1.96 * std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_TRUE(agrees(mean, ci, q)) << mean << " vs " << q;
}

TEST(CapacityQuadrature, RejectsUnnormalizedDensity) {
  const FadingLink x(2, 5, 10);
  EXPECT_THROW(capacity_quadrature([&](double z) { return 2.0 * pdf(x, z); }, 1.0, 10.0, NumericsPolicy{}),
               DomainError);
}

TEST(TermQuadrature, NomaTermsMatchClosedForm) {
  const NumericsPolicy pol;
  const auto cfg = defaults(20, 0.2);
  const auto q = noma_terms_quadrature(cfg, pol);
  EXPECT_NEAR(term(q, "C11"), c11_exact(cfg, pol).value, pol.cap_tol);
  EXPECT_NEAR(term(q, "C12"), c12_exact(cfg, pol).value, pol.cap_tol);
  EXPECT_NEAR(term(q, "C2"), c2_exact(cfg, pol).value, pol.cap_tol);
}

TEST(TermQuadrature, OmaTermsMatchSeries) {
  const NumericsPolicy pol;
  const auto cfg = defaults(20);
  const auto q = oma_terms_quadrature(cfg, pol);
  const auto e = c_oma_exact(cfg, pol);
  for (const char* name : {"Upsilon*J2", "Psi*J3", "Psi*Upsilon*J4", "S2", "S4", "tail"}) {
    double series = 0.0;
    for (const auto& t : e.detail)
      if (t.name == name) series = t.value;
    EXPECT_NEAR(term(q, name), series, pol.cap_tol) << name;
  }
}
