#pragma once

#include "fsnoma/fading.hpp"
#include "fsnoma/system.hpp"

namespace fsnoma {

// Conventional DF relaying: W = min(W_sr, W_sd + W_rd), capacity
// (1 / (2 ln 2)) E ln(1 + W). The sd and rd links must be identically
// distributed (ConstraintError otherwise). Power split a1, a2 is ignored.
//
// Notation: v = 1 / L_rd, S = W_sd + W_rd, w = L z / (1 + L z),
//   Psi = L_sr^m_sr / (m_sr B(m_sr, ms_sr)),
//   Upsilon = Gamma(m_rd + ms_rd)^2 L_rd^(2 m_rd) / (Gamma(ms_rd)^2 Gamma(2 m_rd + 1)).
// J1..J4 are the finite-limit integrals
//   J1 = int_0^v dz / (1 + z) = ln(1 + v)
//   J2 = int_0^v z^(2m_rd) 2F1(m_rd+ms_rd, 2m_rd; 2m_rd+1; -L_rd z) / (1 + z) dz
//   J3 = int_0^v z^m_sr 2F1(m_sr, m_sr+ms_sr; m_sr+1; -L_sr z) / (1 + z) dz
//   J4 = int_0^v z^(m_sr+2m_rd) 2F1(..rd..) 2F1(..sr..) / (1 + z) dz
// so that Psi J3 = int_0^v F_sr / (1 + z). Upsilon z^(2m_rd) 2F1(..rd..) is not
// the CDF of S, so the capacity uses the mixture law of S instead:
//   S2 = int_0^v F_S / (1 + z), S4 = int_0^v F_sr F_S / (1 + z),
//   tail = int_v^inf (1 - F_sr)(1 - F_S) / (1 + z),
//   E ln(1 + W) = J1 - S2 - Psi J3 + S4 + tail.
// All values in nats.
struct OmaSeriesTerms {
  double v = 0.0;
  double psi = 0.0;
  double upsilon = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
  double J3 = 0.0;
  double J4 = 0.0;
  double S2 = 0.0;
  double S4 = 0.0;
  double tail = 0.0;
  long long terms = 0;
};

// High-SNR counterpart with ln W in place of ln(1 + W):
//   J1 = ln v, J2 = int_0^v z^(2m_rd-1) 2F1(..rd..) dz, J3 = int_0^v z^(m_sr-1) 2F1(..sr..) dz,
//   J4 = int_0^v z^(m_sr+2m_rd-1) 2F1(..rd..) 2F1(..sr..) dz,
//   S2 = int_0^v F_S / z, S4 = int_0^v F_sr F_S / z, tail = int_v^inf (1 - F_W) / z,
//   E ln W = J1 - S2 - Psi J3 + S4 + tail.
using OmaAsymptoticTerms = OmaSeriesTerms;

// Throws ConstraintError unless sd and rd are identically distributed.
void require_iid_sum(const SystemConfig& cfg);

// Individual series; fixed_terms > 0 cuts the outer sum after that many terms.
double oma_j2(const FadingLink& rd, const SeriesControl& ctl, int fixed_terms = 0);
double oma_j3(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl);
// Requires L_sr = L_rd, i.e. ms - 1 = C m on both links with one C.
double oma_j4(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl);

double oma_j2_asymptotic(const FadingLink& rd, const SeriesControl& ctl);
double oma_j3_asymptotic(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl);
double oma_j4_asymptotic(const FadingLink& sr, const FadingLink& rd, const SeriesControl& ctl);

// Requires the i.i.d. sum and L_sr = L_rd (ConstraintError otherwise).
OmaSeriesTerms oma_terms(const SystemConfig& cfg, const NumericsPolicy& pol);
OmaAsymptoticTerms oma_asymptotic_terms(const SystemConfig& cfg, const NumericsPolicy& pol);

// E ln(1 + W) and E ln W by quadrature of the CCDF of W over (0, inf).
double oma_log1p_quadrature(const SystemConfig& cfg, double rel_tol);
double oma_log_quadrature(const SystemConfig& cfg, double rel_tol);

// Series route; falls back to quadrature (method = quadrature, diagnostic set)
// when the series preconditions fail or a series does not converge.
CapacityEstimate c_oma_exact(const SystemConfig& cfg, const NumericsPolicy& pol);
// Values are not clamped and may be negative at low SNR.
CapacityEstimate c_oma_asymptotic(const SystemConfig& cfg, const NumericsPolicy& pol);

}  // namespace fsnoma
