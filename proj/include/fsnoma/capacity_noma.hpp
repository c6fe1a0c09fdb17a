#pragma once

#include "fsnoma/fading.hpp"
#include "fsnoma/system.hpp"

namespace fsnoma {

// Building blocks, in nats.

// E ln(1 + X) = G^{4,3}_{5,5}[1/L | 1-m,1,1,0,1; 1,ms,0,1,0] / (Gamma(m) Gamma(ms)).
// The standard pole families touch, so the contour is placed at Re s = 1/2.
double log1p_moment(const FadingLink& x, const ContourControl& ctl = {});

// int_0^inf ln(1+z) F_i(z) f_l(z) dz as a bivariate Meijer G:
//   Theta_i Theta_l L_l G[L_i, L_l | -1,0; -1,-1 | 1-ms_i,1; m_i,0 | -1,-ms_l,0; m_l-1,0,-1].
double log1p_cross(const FadingLink& i, const FadingLink& l, const ContourControl& ctl);

// E ln(1 + min(X, Y)) = sum_l E ln(1 + X_l) - sum_{i != l} log1p_cross(i, l).
double log1p_min_closed(const FadingLink& x, const FadingLink& y, const NumericsPolicy& pol);
// Same quantity by quadrature of the min-CCDF.
double log1p_min_quadrature(const FadingLink& x, const FadingLink& y, double rel_tol);

// (1 / (2 ln 2)) E ln(1 + min(X, Y)); closed form, quadrature fallback.
CapacityEstimate min_link_capacity(const FadingLink& x, const FadingLink& y, const NumericsPolicy& pol);

CapacityEstimate c11_exact(const SystemConfig& cfg, const NumericsPolicy& pol);
CapacityEstimate c12_exact(const SystemConfig& cfg, const NumericsPolicy& pol);
CapacityEstimate c2_exact(const SystemConfig& cfg, const NumericsPolicy& pol);
// c11 - c12 + c2 with the three terms in detail.
CapacityEstimate c_noma_exact(const SystemConfig& cfg, const NumericsPolicy& pol);
// Same, reusing c11 = c11_exact(cfg, pol), which does not depend on the power split.
CapacityEstimate c_noma_exact(const CapacityEstimate& c11, const SystemConfig& cfg, const NumericsPolicy& pol);

// High-SNR building blocks, in nats.

// E ln X = psi(m) - psi(ms) - ln L.
double log_moment(const FadingLink& x);

// K_il = int_0^inf ln z F_i(z) f_l(z) dz by Beta-digamma series. Equal rates use
// one series in n; distinct rates expand around the larger rate.
// terms receives the number of summed terms when non-null.
double log_cross_series(const FadingLink& i, const FadingLink& l, const SeriesControl& ctl,
                        long long* terms = nullptr);
// Equal-rate series cut after exactly n_terms terms.
double log_cross_equal_rate_partial(const FadingLink& i, const FadingLink& l, int n_terms);
// K_il by quadrature.
double log_cross_quadrature(const FadingLink& i, const FadingLink& l, double rel_tol);

// E ln min(X, Y) = sum_l E ln X_l - sum_{i != l} K_il.
double log_min_series(const FadingLink& x, const FadingLink& y, const SeriesControl& ctl,
                      long long* terms = nullptr);
double log_min_quadrature(const FadingLink& x, const FadingLink& y, double rel_tol);

// Requires ms - 1 = C m on every link with one shared C (ConstraintError otherwise).
// Values are not clamped and may be negative at low SNR.
CapacityEstimate c_noma_asymptotic(const SystemConfig& cfg, const NumericsPolicy& pol);

}  // namespace fsnoma
