#pragma once

#include <functional>

namespace fsnoma {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

using Integrand = std::function<double(double)>;

// Finite interval, adaptive Gauss-Kronrod 61.
QuadResult integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12);
// Finite interval with integrable endpoint singularities (tanh-sinh).
QuadResult integrate_singular(const Integrand& f, double a, double b, double rel_tol = 1e-12);
// [a, inf) by exp-sinh.
QuadResult integrate_tail(const Integrand& f, double a, double rel_tol = 1e-12);
// [0, inf) split at multiples of the natural scale of the integrand.
QuadResult integrate_half_line(const Integrand& f, double scale, double rel_tol = 1e-12);

// E ln(1 + W) = int_0^inf ccdf(z) / (1 + z) dz for a nonnegative W, integrated
// in t = ln z on both sides of ln(scale).
QuadResult log1p_expectation(const Integrand& ccdf, double scale, double rel_tol = 1e-10);
// E ln W = c - int_0^e^c cdf(u)/u du + int_e^c^inf ccdf(u)/u du with c = ln(scale).
QuadResult log_expectation(const Integrand& cdf, const Integrand& ccdf, double scale,
                           double rel_tol = 1e-10);

}  // namespace fsnoma
