#pragma once

#include <string>

#include "fsnoma/sweep.hpp"

namespace fsnoma {

// Resolved run configuration. YAML layout (every key optional):
//
//   system:
//     snr_db: 20
//     a2: 0.01
//     shadowing_ratio: 0        # > 0: m axes also set ms = C m + 1
//     links: {sr: {m: 5, ms: 16}, rd: {m: 5, ms: 16}, sd: {m: 5, ms: 16}}
//   numerics:
//     cap_tol: 1.0e-5
//     quad_tol: 1.0e-8
//     series: {max_terms: 200000, rel_tol: 1.0e-10}
//     bivariate_nodes: 1601
//   monte_carlo: {samples: 1000000, seed: 1592651789, workers: 1}
//   sweep:
//     axis: snr_db              # snr_db | a2 | m_all | m_s_link | m_sr
//     link: sr                  # m_s_link only
//     values: [0, 10, 20]       # or range: {from: 0, to: 40, step: 5}
//     methods: [noma_exact, oma_exact]
//     output: out.csv
//     timing: false
//   optimize: {epsilon: 1.0e-3, grid: 32}
struct RunConfig {
  SweepSpec sweep;
  double opt_eps = 1e-3;
  int opt_grid = 32;
};

// Throws DomainError on unknown keys or malformed values, IoError when the
// file cannot be read.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

}  // namespace fsnoma
