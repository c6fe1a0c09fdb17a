#include "fsnoma/system.hpp"

#include <cmath>

#include "fsnoma/errors.hpp"

namespace fsnoma {

void validate(const NumericsPolicy& pol) {
  validate(pol.series);
  validate(pol.appell);
  validate(pol.contour);
  validate(pol.bivariate);
  if (!(pol.cap_tol > 0.0) || !(pol.quad_tol > 0.0))
    throw DomainError("NumericsPolicy: tolerances must be positive");
  if (!(pol.cap_tol > pol.quad_tol)) throw DomainError("NumericsPolicy: cap_tol must exceed quad_tol");
}

SystemConfig make_config(LinkShape sr, LinkShape rd, LinkShape sd, double a2, double mean_snr) {
  SystemConfig cfg{{FadingLink(sr.m, sr.ms, mean_snr), FadingLink(rd.m, rd.ms, mean_snr),
                    FadingLink(sd.m, sd.ms, mean_snr)},
                   1.0 - a2,
                   a2,
                   mean_snr};
  validate(cfg);
  return cfg;
}

void validate(const SystemConfig& cfg) {
  if (!(cfg.mean_snr > 0.0) || !std::isfinite(cfg.mean_snr))
    throw DomainError("SystemConfig: mean SNR must be > 0");
  if (!(cfg.a2 > 0.0) || !(cfg.a2 < cfg.a1)) throw DomainError("SystemConfig: require 0 < a2 < a1");
  if (std::abs(cfg.a1 + cfg.a2 - 1.0) > 1e-12) throw DomainError("SystemConfig: a1 + a2 must equal 1");
  for (const FadingLink* l : {&cfg.links.sr, &cfg.links.rd, &cfg.links.sd})
    if (std::abs(l->mean_snr() - cfg.mean_snr) > 1e-12 * cfg.mean_snr)
      throw DomainError("SystemConfig: every link must carry the system mean SNR");
}

SystemConfig with_mean_snr(const SystemConfig& cfg, double mean_snr) {
  const auto shape = [](const FadingLink& l) { return LinkShape{l.m(), l.ms()}; };
  return make_config(shape(cfg.links.sr), shape(cfg.links.rd), shape(cfg.links.sd), cfg.a2, mean_snr);
}

SystemConfig with_a2(const SystemConfig& cfg, double a2) {
  SystemConfig out = cfg;
  out.a2 = a2;
  out.a1 = 1.0 - a2;
  validate(out);
  return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact:
      return "exact";
    case Method::asymptotic:
      return "asymptotic";
    case Method::monte_carlo:
      return "monte_carlo";
    case Method::quadrature:
      return "quadrature";
  }
  return "unknown";
}

double shared_shadowing_ratio(const SystemConfig& cfg, double slack) {
  const double C = (cfg.links.sr.ms() - 1.0) / cfg.links.sr.m();
  for (const FadingLink* l : {&cfg.links.rd, &cfg.links.sd})
    if (std::abs(l->ms() - 1.0 - C * l->m()) > slack * std::max(1.0, l->ms()))
      throw ConstraintError("links do not share ms - 1 = C m");
  return C;
}

LinkShape shape_from_ratio(double m, double C) { return {m, C * m + 1.0}; }

}  // namespace fsnoma
