#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fsnoma/fading.hpp"
#include "fsnoma/specfun.hpp"

namespace fsnoma {

// Evaluation budgets shared by every analytic route.
struct NumericsPolicy {
  SeriesControl series{};                        // scalar series
  SeriesControl appell{200000, 1e-8, 1e-300};    // Appell and mixture series
  ContourControl contour{};                      // univariate Meijer G
  ContourControl bivariate{1601, 0.0, 30.0, 1e-6};  // double Mellin-Barnes
  double cap_tol = 1e-5;   // bits/s/Hz
  double quad_tol = 1e-8;  // relative tolerance of quadrature routes
};

void validate(const NumericsPolicy& pol);

// Shape of one link; the mean SNR comes from the system.
struct LinkShape {
  double m = 5.0;
  double ms = 16.0;
};

// Two-user cooperative downlink: source s, relay/near user r, far user d.
// All links have mean SNR equal to the system mean_snr (P / sigma^2, linear).
struct SystemConfig {
  LinkTriple links;
  double a1;
  double a2;
  double mean_snr;
};

// Builds a validated configuration; a1 = 1 - a2.
SystemConfig make_config(LinkShape sr, LinkShape rd, LinkShape sd, double a2, double mean_snr);
// Throws DomainError unless a1 + a2 = 1, 0 < a2 < a1 and every link carries mean_snr.
void validate(const SystemConfig& cfg);

SystemConfig with_mean_snr(const SystemConfig& cfg, double mean_snr);
SystemConfig with_a2(const SystemConfig& cfg, double a2);

double db_to_linear(double db);

enum class Method { exact, asymptotic, monte_carlo, quadrature };
std::string_view to_string(Method m);

struct CapacityTerm {
  std::string name;
  double value;  // bits/s/Hz
};

struct CapacityEstimate {
  double value = 0.0;  // bits/s/Hz
  Method method = Method::exact;
  double error = 0.0;  // absolute tolerance or 95% CI half-width
  std::vector<CapacityTerm> detail;
  long long terms = 0;     // series terms, contour nodes or samples
  std::string diagnostic;  // non-empty when a fallback route was taken
};

// Shared C with ms - 1 = C m on every link, or ConstraintError.
double shared_shadowing_ratio(const SystemConfig& cfg, double slack = 1e-9);
// Shape with ms = C m + 1.
LinkShape shape_from_ratio(double m, double C);

}  // namespace fsnoma
