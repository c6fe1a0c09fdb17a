#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsnoma/oracles.hpp"
#include "fsnoma/system.hpp"

namespace fsnoma {

enum class Axis { snr_db, a2, m_all, m_s_link, m_sr };
enum class EvalMethod { noma_exact, noma_asym, oma_exact, oma_asym, noma_mc, oma_mc };
enum class LinkId { sr, rd, sd };

std::string_view to_string(Axis a);
std::string_view to_string(EvalMethod m);
std::string_view to_string(LinkId l);
Axis parse_axis(std::string_view s);
EvalMethod parse_method(std::string_view s);
LinkId parse_link(std::string_view s);

// Operating point in user units (SNR in dB).
struct BasePoint {
  LinkShape sr{};
  LinkShape rd{};
  LinkShape sd{};
  double a2 = 0.01;
  double snr_db = 20.0;
  // When positive, axes that change m also set ms = C m + 1 on the touched links.
  double shadowing_ratio = 0.0;
};

struct SweepSpec {
  BasePoint base;
  NumericsPolicy pol;
  McSettings mc;
  Axis axis = Axis::snr_db;
  LinkId link = LinkId::sr;  // m_s_link only
  std::vector<double> values;
  std::vector<EvalMethod> methods;
  std::string output_path;
  bool timing = false;  // wall_ms stays 0 otherwise
};

// Throws DomainError on an empty or non-increasing value list, a2 outside
// (0, 0.5), non-finite SNR or an empty method list.
void validate(const SweepSpec& spec);

// Configuration of the system at the given axis value.
SystemConfig point_config(const SweepSpec& spec, double axis_value);
// MC seed of grid point `index`.
std::uint64_t point_seed(std::uint64_t master_seed, std::size_t index);

struct SweepRow {
  std::string axis_name;
  double axis_value = 0.0;
  std::string method;
  double capacity = 0.0;  // bits/s/Hz, NaN on error
  double error = 0.0;
  long long n_samples_or_terms = 0;
  double wall_ms = 0.0;
  std::string status;  // ok, fallback or error
};

// One row per (value, method), sorted by (axis_value, method). Grid points run
// on mc.n_workers threads; the rows do not depend on the thread count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Shortest text that reads back to the same double; NaN prints as "nan".
std::string format_number(double x);

inline constexpr const char* kCsvHeader =
    "axis_name,axis_value,method,capacity_bits_s_hz,error,n_samples_or_terms,wall_ms,status";
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(const std::string& text);
// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::string& content);

struct A2Optimum {
  double a2 = 0.0;
  CapacityEstimate c_max;
  std::vector<std::pair<double, double>> grid;  // coarse (a2, capacity) probes
};

// Maximizes c_noma_exact over a2 in [eps, 0.5 - eps]: a coarse grid of
// grid_points, then golden-section search around the best grid point.
// Evaluation errors propagate.
A2Optimum optimize_a2(const SystemConfig& cfg, const NumericsPolicy& pol, double eps = 1e-3, int grid_points = 32);

// One oracle-triangle check. Unused columns hold NaN.
struct CheckLine {
  std::string name;
  double closed = 0.0;
  double quadrature = 0.0;
  double mc = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Closed form vs quadrature per term (tolerance term_tol, bits/s/Hz) and
// closed form vs MC for each total (tolerance max(1% of closed, ci95)). The
// check list is fixed: NOMA C11, C12, C2, total_mc; OMA Upsilon*J2, Psi*J3,
// Psi*Upsilon*J4, S2, S4, tail, total, total_mc. Evaluation errors propagate.
std::vector<CheckLine> triangle_checks(const SystemConfig& cfg, const NumericsPolicy& pol, const McSettings& mc,
                                       double term_tol);
std::string format_check(const CheckLine& c);

}  // namespace fsnoma
