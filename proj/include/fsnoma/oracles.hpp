#pragma once

#include <cstdint>
#include <vector>

#include "fsnoma/quadrature.hpp"
#include "fsnoma/system.hpp"

namespace fsnoma {

// Monte-Carlo settings. Sample i draws from SplitMix64(master_seed, i), samples
// are reduced in fixed blocks in index order, so the result does not depend on
// n_workers.
struct McSettings {
  long long n_samples = 1000000;
  std::uint64_t master_seed = 0x5eedf00dULL;
  int n_workers = 1;
};

void validate(const McSettings& mc);

struct McResult {
  double mean = 0.0;  // bits/s/Hz
  double ci95 = 0.0;  // half-width, 1.96 standard errors
  long long n_samples = 0;
  std::vector<CapacityTerm> per_term;  // C1, C2 for NOMA
};

// Per sample: gamma_sr1 = a1 g h_sr / (a2 g h_sr + 1), gamma_sd likewise,
// gamma_sr2 = a2 g h_sr, gamma_rd = g h_rd, and
// C1 + C2 = (1/2) log2(1 + min(gamma_sr1, gamma_sd)) + (1/2) log2(1 + min(gamma_sr2, gamma_rd)).
McResult simulate_noma(const SystemConfig& cfg, const McSettings& mc);

struct OmaSimHooks {
  bool drop_rd = false;  // forces |h_rd|^2 = 0
};

// Per sample: (1/2) log2(1 + g min(h_sr, h_sd + h_rd)).
McResult simulate_oma(const SystemConfig& cfg, const McSettings& mc, const OmaSimHooks& hooks = {});

// (1 / (2 ln 2)) int_0^inf ln(1 + scale z) density(z) dz, integrated in ln z
// on both sides of ln(z_hint). Throws DomainError unless the density
// integrates to one within 1e-6 and NonConvergence if the error estimate
// exceeds pol.quad_tol.
CapacityEstimate capacity_quadrature(const Integrand& density, double scale, double z_hint, const NumericsPolicy& pol);

// NOMA terms c11, c12, c2 from the min-link densities.
std::vector<CapacityTerm> noma_terms_quadrature(const SystemConfig& cfg, const NumericsPolicy& pol);

// OMA terms from their defining integrals over (0, 1 / L_rd), in bits/s/Hz:
// Upsilon*J2, Psi*J3, Psi*Upsilon*J4 with the printed 2F1 integrands, and
// S2, S4, tail from the convolution law of the sum.
std::vector<CapacityTerm> oma_terms_quadrature(const SystemConfig& cfg, const NumericsPolicy& pol);

}  // namespace fsnoma
