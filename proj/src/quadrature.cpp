#include "fsnoma/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

#include "fsnoma/errors.hpp"

namespace fsnoma {

namespace bq = boost::math::quadrature;

QuadResult integrate(const Integrand& f, double a, double b, double rel_tol) {
  double err = 0.0;
  const double v = bq::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol, &err);
  if (!std::isfinite(v)) throw NonConvergence("gauss-kronrod produced a non-finite value");
  return {v, err};
}

QuadResult integrate_singular(const Integrand& f, double a, double b, double rel_tol) {
  thread_local bq::tanh_sinh<double> ts(15);
  double err = 0.0;
  double l1 = 0.0;
  const double v = ts.integrate(f, a, b, rel_tol, &err, &l1);
  if (!std::isfinite(v)) throw NonConvergence("tanh-sinh produced a non-finite value");
  return {v, err};
}

QuadResult integrate_tail(const Integrand& f, double a, double rel_tol) {
  thread_local bq::exp_sinh<double> es(12);
  double err = 0.0;
  double l1 = 0.0;
  // exp_sinh integrates over [0, inf); shift the origin to a.
  auto g = [&](double u) { return f(a + u); };
  const double v = es.integrate(g, rel_tol, &err, &l1);
  if (!std::isfinite(v)) throw NonConvergence("exp-sinh produced a non-finite value");
  return {v, err};
}

QuadResult integrate_half_line(const Integrand& f, double scale, double rel_tol) {
  if (!(scale > 0.0)) throw DomainError("integrate_half_line: scale must be positive");
  const double b1 = scale;
  const double b2 = 64.0 * scale;
  const QuadResult r0 = integrate_singular(f, 0.0, b1, rel_tol);
  const QuadResult r1 = integrate(f, b1, b2, rel_tol);
  const QuadResult r2 = integrate_tail(f, b2, rel_tol);
  return {r0.value + r1.value + r2.value, r0.error + r1.error + r2.error};
}

QuadResult log1p_expectation(const Integrand& ccdf, double scale, double rel_tol) {
  if (!(scale > 0.0)) throw DomainError("log1p_expectation: scale must be positive");
  const double t0 = std::log(scale);
  auto g = [&](double t) {
    const double z = std::exp(t);
    return z == 0.0 ? 0.0 : ccdf(z) / (1.0 + std::exp(-t));
  };
  const QuadResult left = integrate_tail([&](double u) { return g(t0 - u); }, 0.0, rel_tol);
  const QuadResult right = integrate_tail([&](double u) { return g(t0 + u); }, 0.0, rel_tol);
  return {left.value + right.value, left.error + right.error};
}

QuadResult log_expectation(const Integrand& cdf, const Integrand& ccdf, double scale, double rel_tol) {
  if (!(scale > 0.0)) throw DomainError("log_expectation: scale must be positive");
  const double t0 = std::log(scale);
  const QuadResult left = integrate_tail([&](double u) { return cdf(std::exp(t0 - u)); }, 0.0, rel_tol);
  const QuadResult right = integrate_tail([&](double u) { return ccdf(std::exp(t0 + u)); }, 0.0, rel_tol);
  return {t0 - left.value + right.value, left.error + right.error};
}

}  // namespace fsnoma
