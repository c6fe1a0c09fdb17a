#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fsnoma/capacity_noma.hpp"
#include "fsnoma/capacity_oma.hpp"
#include "fsnoma/errors.hpp"
#include "fsnoma/system.hpp"
#include "oracle.hpp"

using namespace fsnoma;
using namespace fsnoma::oracle;

namespace {

const double kBits = 1.0 / (2.0 * std::numbers::ln2);

SystemConfig shaped(LinkShape sr, LinkShape rd, double db) {
  return make_config(sr, rd, rd, 0.01, db_to_linear(db));
}

SystemConfig defaults(double db, double a2 = 0.01) {
  return make_config({5, 16}, {5, 16}, {5, 16}, a2, db_to_linear(db));
}

double tail_from(const std::function<double(double)>& g, double a) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(g, a, std::numeric_limits<double>::infinity(), 1e-12);
}

// Upsilon z^(2m) 2F1(m+ms, 2m; 2m+1; -L z) written as an incomplete beta in w.
double upsilon_kernel(const FadingLink& rd, double z) {
  const double m = rd.m(), ms = rd.ms(), L = rd.lambda();
  const double scale = std::exp(2.0 * std::lgamma(m + ms) - 2.0 * std::lgamma(ms) - std::lgamma(2.0 * m));
  return scale * boost::math::beta(2.0 * m, ms - m, L * z / (1.0 + L * z));
}

double def_upsilon_j2(const FadingLink& rd) {
  return finite([&](double z) { return upsilon_kernel(rd, z) / (1.0 + z); }, 0.0, 1.0 / rd.lambda());
}

double def_psi_j3(const FadingLink& sr, const FadingLink& rd) {
  const Law a(sr);
  return finite([&](double z) { return a.cdf(z) / (1.0 + z); }, 0.0, 1.0 / rd.lambda());
}

double def_psi_upsilon_j4(const FadingLink& sr, const FadingLink& rd) {
  const Law a(sr);
  return finite([&](double z) { return a.cdf(z) * upsilon_kernel(rd, z) / (1.0 + z); }, 0.0, 1.0 / rd.lambda());
}

// E ln(1 + min(X_sr, X_sd + X_rd)) from the convolution law.
double oracle_log1p_w(const SystemConfig& cfg) {
  const Law a(cfg.links.sr);
  const SumLaw s(cfg.links.rd);
  return log_line([&](double z) { return a.ccdf(z) * s.ccdf(z) / (1.0 + z); }, -std::log(cfg.links.rd.lambda()));
}

double oracle_log_w(const SystemConfig& cfg) {
  const Law a(cfg.links.sr);
  const SumLaw s(cfg.links.rd);
  const double c = 1.0 / cfg.links.rd.lambda();
  const double lo = finite(
      [&](double z) {
        const double fa = a.cdf(z), fs = s.cdf(z);
        return (fa + fs - fa * fs) / z;
      },
      0.0, c);
  return std::log(c) - lo + tail_from([&](double z) { return a.ccdf(z) * s.ccdf(z) / z; }, c);
}

double detail(const CapacityEstimate& e, const std::string& name) {
  for (const auto& t : e.detail)
    if (t.name == name) return t.value;
  ADD_FAILURE() << "missing detail " << name;
  return 0.0;
}

}  // namespace

TEST(OmaTerms, J1IsLogOnePlusInverseRate) {
  // L = 1/4 at (5, 16) needs mean SNR 4/3.
  const auto cfg = make_config({5, 16}, {5, 16}, {5, 16}, 0.01, 4.0 / 3.0);
  const auto t = oma_terms(cfg, NumericsPolicy{});
  EXPECT_NEAR(t.v, 4.0, 1e-14);
  EXPECT_NEAR(t.J1, 1.6094379124341003, 1e-14);
  EXPECT_EQ(t.J1, std::log1p(t.v));
}

TEST(OmaTerms, J2SeriesTruncationConverges) {
  for (auto [m, ms, db] : std::vector<std::tuple<double, double, double>>{{2, 5.5, 10}, {5, 16.5, 20}, {1.5, 5.5, 30}}) {
    const FadingLink rd(m, ms, db_to_linear(db));
    const double a = oma_j2(rd, SeriesControl{}, 40), b = oma_j2(rd, SeriesControl{}, 80);
    EXPECT_LE(std::abs(a - b), 1e-8 * std::abs(b)) << m << " " << ms << " " << db;
  }
}

TEST(OmaTerms, J3MatchesQuadratureAtSmallShape) {
  const FadingLink x(2, 5, 10);
  const auto cfg = make_config({2, 5}, {2, 5}, {2, 5}, 0.01, 10.0);
  const auto t = oma_terms(cfg, NumericsPolicy{});
  const double ref = def_psi_j3(x, x);
  EXPECT_LE(std::abs(t.psi * t.J3 - ref), 1e-6 * ref);
  EXPECT_NEAR(t.psi * oma_j3(x, x, SeriesControl{}), ref, 1e-10 * ref);
}

TEST(OmaTerms, EachSeriesMatchesItsDefiningIntegral) {
  const NumericsPolicy pol;
  for (auto [m, ms] : std::vector<std::pair<double, double>>{{5, 16}, {2, 7}, {1, 4}})
    for (double db : {10.0, 20.0, 30.0}) {
      const auto cfg = shaped({m, ms}, {m, ms}, db);
      const auto t = oma_terms(cfg, pol);
      const FadingLink &sr = cfg.links.sr, &rd = cfg.links.rd;
      const double j2 = def_upsilon_j2(rd), j3 = def_psi_j3(sr, rd), j4 = def_psi_upsilon_j4(sr, rd);
      EXPECT_NEAR(kBits * t.upsilon * t.J2, kBits * j2, pol.cap_tol) << m << " " << db;
      EXPECT_NEAR(kBits * t.psi * t.J3, kBits * j3, pol.cap_tol) << m << " " << db;
      EXPECT_NEAR(kBits * t.psi * t.upsilon * t.J4, kBits * j4, pol.cap_tol) << m << " " << db;
      EXPECT_NEAR(t.upsilon * t.J2, j2, 1e-8 * std::abs(j2));
      EXPECT_NEAR(t.psi * t.J3, j3, 1e-8 * std::abs(j3));
      EXPECT_NEAR(t.psi * t.upsilon * t.J4, j4, 1e-8 * std::abs(j4));
    }
}

TEST(OmaTerms, MixtureTermsMatchConvolutionOracle) {
  const NumericsPolicy pol;
  for (auto [sr, rd, db] : std::vector<std::tuple<LinkShape, LinkShape, double>>{
           {{5, 16}, {5, 16}, 10}, {{5, 16}, {5, 16}, 30}, {{2, 7}, {4, 13}, 20}, {{1, 4}, {3, 10}, 15}}) {
    const auto cfg = shaped(sr, rd, db);
    const auto t = oma_terms(cfg, pol);
    const Law a(cfg.links.sr);
    const SumLaw s(cfg.links.rd);
    const double v = t.v;
    const double s2 = finite([&](double z) { return s.cdf(z) / (1.0 + z); }, 0.0, v);
    const double s4 = finite([&](double z) { return a.cdf(z) * s.cdf(z) / (1.0 + z); }, 0.0, v);
    const double tail = tail_from([&](double z) { return a.ccdf(z) * s.ccdf(z) / (1.0 + z); }, v);
    EXPECT_NEAR(t.S2, s2, 1e-9 * s2) << db;
    EXPECT_NEAR(t.S4, s4, 1e-9 * s4) << db;
    EXPECT_NEAR(t.tail, tail, 1e-8 * tail) << db;
  }
}

TEST(OmaTerms, J4RequiresSharedRate) {
  const FadingLink sr(2, 4, 100), rd(5, 16, 100);
  EXPECT_THROW(oma_j4(sr, rd, SeriesControl{}), ConstraintError);
  EXPECT_THROW(oma_terms(shaped({2, 4}, {5, 16}, 20), NumericsPolicy{}), ConstraintError);
}

TEST(OmaExact, MatchesConvolutionOracle) {
  const NumericsPolicy pol;
  for (double db : {0.0, 5.0, 10.0, 20.0, 30.0, 40.0}) {
    const auto cfg = defaults(db);
    const auto e = c_oma_exact(cfg, pol);
    EXPECT_EQ(e.method, Method::exact);
    EXPECT_TRUE(e.diagnostic.empty());
    EXPECT_NEAR(e.value, kBits * oracle_log1p_w(cfg), 1e-8) << db;
  }
}

TEST(OmaExact, TotalIsSignedSumOfDetail) {
  const auto e = c_oma_exact(defaults(20), NumericsPolicy{});
  const double s = detail(e, "J1") - detail(e, "S2") - detail(e, "Psi*J3") + detail(e, "S4") + detail(e, "tail");
  EXPECT_NEAR(e.value, s, 1e-12);
}

TEST(OmaExact, LiteralJCombinationIsNotTheCapacity) {
  const auto e = c_oma_exact(defaults(20), NumericsPolicy{});
  const double lit =
      detail(e, "J1") - detail(e, "Upsilon*J2") - detail(e, "Psi*J3") + detail(e, "Psi*Upsilon*J4");
  EXPECT_NEAR(detail(e, "J_combination"), lit, 1e-12);
  EXPECT_GT(std::abs(lit - e.value), 1e-3);
}

TEST(OmaExact, IndependentOfPowerSplit) {
  const NumericsPolicy pol;
  for (double db : {5.0, 20.0}) {
    EXPECT_EQ(c_oma_exact(defaults(db, 0.01), pol).value, c_oma_exact(defaults(db, 0.3), pol).value);
    EXPECT_EQ(c_oma_asymptotic(defaults(db, 0.01), pol).value, c_oma_asymptotic(defaults(db, 0.3), pol).value);
  }
}

TEST(OmaExact, MonotoneInSnr) {
  const NumericsPolicy pol;
  double prev = -1.0;
  for (double db = -10.0; db <= 60.0; db += 5.0) {
    const double c = c_oma_exact(defaults(db), pol).value;
    EXPECT_GT(c, prev) << db;
    prev = c;
  }
}

TEST(OmaExact, BeatsNomaAtLowSnr) {
  const NumericsPolicy pol;
  for (double db : {0.0, 5.0}) EXPECT_GT(c_oma_exact(defaults(db), pol).value, c_noma_exact(defaults(db), pol).value);
}

TEST(OmaExact, DistinctShadowingRatioFallsBackToQuadrature) {
  const auto cfg = shaped({2, 4}, {5, 16}, 20);
  const auto e = c_oma_exact(cfg, NumericsPolicy{});
  EXPECT_EQ(e.method, Method::quadrature);
  EXPECT_FALSE(e.diagnostic.empty());
  EXPECT_NEAR(e.value, kBits * oracle_log1p_w(cfg), 1e-7);
}

TEST(OmaExact, RejectsNonIdenticalSumLinks) {
  const NumericsPolicy pol;
  const auto a = make_config({5, 16}, {5, 16}, {4, 13}, 0.01, 100.0);
  EXPECT_THROW(c_oma_exact(a, pol), ConstraintError);
  EXPECT_THROW(c_oma_asymptotic(a, pol), ConstraintError);
  EXPECT_THROW(oma_terms(a, pol), ConstraintError);
  auto b = defaults(20);
  b.links.sd = b.links.sd.scaled(2.0);
  EXPECT_THROW(c_oma_exact(b, pol), DomainError);
}

TEST(OmaAsymptotic, J2MatchesQuadrature) {
  for (auto [m, ms, db] : std::vector<std::tuple<double, double, double>>{{5, 16, 20}, {2, 7, 30}, {1.5, 4, 10}}) {
    const FadingLink rd(m, ms, db_to_linear(db));
    const auto cfg = make_config({m, ms}, {m, ms}, {m, ms}, 0.01, db_to_linear(db));
    const auto t = oma_asymptotic_terms(cfg, NumericsPolicy{});
    const double ref = finite([&](double z) { return upsilon_kernel(rd, z) / z; }, 0.0, 1.0 / rd.lambda());
    EXPECT_LE(std::abs(t.upsilon * t.J2 - ref), 1e-6 * ref) << m << " " << db;
  }
}

TEST(OmaAsymptotic, J3J4MatchQuadrature) {
  for (auto [m, ms, db] : std::vector<std::tuple<double, double, double>>{{5, 16, 20}, {2, 7, 30}}) {
    const auto cfg = shaped({m, ms}, {m, ms}, db);
    const FadingLink &sr = cfg.links.sr, &rd = cfg.links.rd;
    const auto t = oma_asymptotic_terms(cfg, NumericsPolicy{});
    const Law a(sr);
    const double v = 1.0 / rd.lambda();
    const double j3 = finite([&](double z) { return a.cdf(z) / z; }, 0.0, v);
    const double j4 = finite([&](double z) { return a.cdf(z) * upsilon_kernel(rd, z) / z; }, 0.0, v);
    EXPECT_LE(std::abs(t.psi * t.J3 - j3), 1e-8 * j3) << m << " " << db;
    EXPECT_LE(std::abs(t.psi * t.upsilon * t.J4 - j4), 1e-8 * j4) << m << " " << db;
  }
}

TEST(OmaAsymptotic, MatchesLogOracle) {
  const NumericsPolicy pol;
  for (auto [m, ms] : std::vector<std::pair<double, double>>{{5, 16}, {1, 4}})
    for (double db : {0.0, 20.0, 40.0}) {
      const auto cfg = shaped({m, ms}, {m, ms}, db);
      const auto e = c_oma_asymptotic(cfg, pol);
      EXPECT_EQ(e.method, Method::asymptotic);
      EXPECT_TRUE(e.diagnostic.empty());
      EXPECT_NEAR(e.value, kBits * oracle_log_w(cfg), 1e-8) << m << " " << db;
    }
}

TEST(OmaAsymptotic, GapShrinksWithSnr) {
  const NumericsPolicy pol;
  double prev = INFINITY;
  for (double db : {30.0, 40.0, 50.0, 60.0}) {
    const double ex = c_oma_exact(defaults(db), pol).value;
    const double gap = std::abs(c_oma_asymptotic(defaults(db), pol).value - ex);
    if (db == 40.0) EXPECT_LE(gap / ex, 0.02);
    EXPECT_LT(gap, prev) << db;
    prev = gap;
  }
}

TEST(OmaAsymptotic, NotClampedAtLowSnr) {
  EXPECT_LT(c_oma_asymptotic(defaults(-10), NumericsPolicy{}).value, 0.0);
}

TEST(OmaAsymptotic, DistinctShadowingRatioFallsBackToQuadrature) {
  const auto cfg = shaped({2, 4}, {5, 16}, 30);
  const auto e = c_oma_asymptotic(cfg, NumericsPolicy{});
  EXPECT_EQ(e.method, Method::asymptotic);
  EXPECT_FALSE(e.diagnostic.empty());
  EXPECT_NEAR(e.value, kBits * oracle_log_w(cfg), 1e-7);
}
