#include "fsnoma/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "fsnoma/capacity_noma.hpp"
#include "fsnoma/capacity_oma.hpp"
#include "fsnoma/errors.hpp"

namespace fsnoma {

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<E, const char*> (&table)[N], const char* what) {
  for (const auto& [e, name] : table)
    if (s == name) return e;
  throw DomainError(std::string("unknown ") + what + ": " + std::string(s));
}

template <class E, std::size_t N>
std::string_view name_of(E e, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [x, name] : table)
    if (x == e) return name;
  return "?";
}

constexpr std::pair<Axis, const char*> kAxes[] = {
    {Axis::snr_db, "snr_db"}, {Axis::a2, "a2"}, {Axis::m_all, "m_all"}, {Axis::m_s_link, "m_s_link"}, {Axis::m_sr, "m_sr"}};
constexpr std::pair<EvalMethod, const char*> kMethods[] = {
    {EvalMethod::noma_exact, "noma_exact"}, {EvalMethod::noma_asym, "noma_asym"}, {EvalMethod::oma_exact, "oma_exact"},
    {EvalMethod::oma_asym, "oma_asym"},     {EvalMethod::noma_mc, "noma_mc"},     {EvalMethod::oma_mc, "oma_mc"}};
constexpr std::pair<LinkId, const char*> kLinks[] = {{LinkId::sr, "sr"}, {LinkId::rd, "rd"}, {LinkId::sd, "sd"}};


std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw DomainError("csv: bad number '" + s + "'");
  return v;
}

SweepRow evaluate(const SweepSpec& spec, std::size_t index, EvalMethod method, int mc_workers) {
  SweepRow row;
  row.axis_name = std::string(to_string(spec.axis));
  row.axis_value = spec.values[index];
  row.method = std::string(to_string(method));
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SystemConfig cfg = point_config(spec, row.axis_value);
    const bool mc = method == EvalMethod::noma_mc || method == EvalMethod::oma_mc;
    if (mc) {
      const McSettings s{spec.mc.n_samples, point_seed(spec.mc.master_seed, index), mc_workers};
      const McResult r = method == EvalMethod::noma_mc ? simulate_noma(cfg, s) : simulate_oma(cfg, s);
      row.capacity = r.mean;
      row.error = r.ci95;
      row.n_samples_or_terms = r.n_samples;
      row.status = "ok";
    } else {
      CapacityEstimate e;
      switch (method) {
        case EvalMethod::noma_exact:
          e = c_noma_exact(cfg, spec.pol);
          break;
        case EvalMethod::noma_asym:
          e = c_noma_asymptotic(cfg, spec.pol);
          break;
        case EvalMethod::oma_exact:
          e = c_oma_exact(cfg, spec.pol);
          break;
        default:
          e = c_oma_asymptotic(cfg, spec.pol);
          break;
      }
      row.capacity = e.value;
      row.error = e.error;
      row.n_samples_or_terms = e.terms;
      row.status = e.diagnostic.empty() ? "ok" : "fallback";
    }
  } catch (const Error&) {
    row.capacity = std::numeric_limits<double>::quiet_NaN();
    row.error = std::numeric_limits<double>::quiet_NaN();
    row.status = "error";
  }
  if (spec.timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string_view to_string(Axis a) { return name_of(a, kAxes); }
std::string_view to_string(EvalMethod m) { return name_of(m, kMethods); }
std::string_view to_string(LinkId l) { return name_of(l, kLinks); }
Axis parse_axis(std::string_view s) { return parse_enum(s, kAxes, "axis"); }
EvalMethod parse_method(std::string_view s) { return parse_enum(s, kMethods, "method"); }
LinkId parse_link(std::string_view s) { return parse_enum(s, kLinks, "link"); }

void validate(const SweepSpec& spec) {
  validate(spec.pol);
  validate(spec.mc);
  if (spec.values.empty()) throw DomainError("sweep: value list is empty");
  if (spec.methods.empty()) throw DomainError("sweep: method list is empty");
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double v = spec.values[i];
    if (!std::isfinite(v)) throw DomainError("sweep: axis values must be finite");
    if (i > 0 && !(v > spec.values[i - 1])) throw DomainError("sweep: axis values must be strictly increasing");
    if (spec.axis == Axis::a2 && !(v > 0.0 && v < 0.5)) throw DomainError("sweep: a2 values must lie in (0, 0.5)");
  }
  if (!std::isfinite(spec.base.snr_db)) throw DomainError("sweep: snr_db must be finite");
  if (!(spec.base.a2 > 0.0 && spec.base.a2 < 0.5)) throw DomainError("sweep: a2 must lie in (0, 0.5)");
  if (spec.base.shadowing_ratio < 0.0) throw DomainError("sweep: shadowing_ratio must be >= 0");
}

SystemConfig point_config(const SweepSpec& spec, double x) {
  BasePoint p = spec.base;
  const double C = p.shadowing_ratio;
  auto set_m = [&](LinkShape& s) {
    s.m = x;
    if (C > 0.0) s.ms = C * x + 1.0;
  };
  switch (spec.axis) {
    case Axis::snr_db:
      p.snr_db = x;
      break;
    case Axis::a2:
      p.a2 = x;
      break;
    case Axis::m_all:
      set_m(p.sr);
      set_m(p.rd);
      set_m(p.sd);
      break;
    case Axis::m_s_link:
      (spec.link == LinkId::sr ? p.sr : spec.link == LinkId::rd ? p.rd : p.sd).ms = x;
      break;
    case Axis::m_sr:
      set_m(p.sr);
      break;
  }
  return make_config(p.sr, p.rd, p.sd, p.a2, db_to_linear(p.snr_db));
}

std::uint64_t point_seed(std::uint64_t master_seed, std::size_t index) {
  return mix64(master_seed ^ mix64(static_cast<std::uint64_t>(index) + 0x632be59bd9b4e019ULL));
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate(spec);
  const std::size_t n_methods = spec.methods.size();
  const std::size_t n_tasks = spec.values.size() * n_methods;
  std::vector<SweepRow> rows(n_tasks);
  const int pool = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.mc.n_workers), n_tasks));
  const int mc_workers = pool > 1 ? 1 : spec.mc.n_workers;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++)
      rows[t] = evaluate(spec, t / n_methods, spec.methods[t % n_methods], mc_workers);
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < pool; ++w) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.axis_value != b.axis_value ? a.axis_value < b.axis_value : a.method < b.method;
  });
  return rows;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.axis_name + "," + format_number(r.axis_value) + "," + r.method + "," + format_number(r.capacity) + "," +
           format_number(r.error) + "," + std::to_string(r.n_samples_or_terms) + "," + format_number(r.wall_ms) +
           "," + r.status + "\n";
  }
  return out;
}

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != split(kCsvHeader, ','))
    throw DomainError("csv: header does not match the sweep schema");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw DomainError("csv: expected 8 fields");
    SweepRow r;
    r.axis_name = f[0];
    r.axis_value = parse_double(f[1]);
    r.method = f[2];
    r.capacity = parse_double(f[3]);
    r.error = parse_double(f[4]);
    r.n_samples_or_terms = std::stoll(f[5]);
    r.wall_ms = parse_double(f[6]);
    r.status = f[7];
    rows.push_back(r);
  }
  return rows;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto " + path);
  }
}

A2Optimum optimize_a2(const SystemConfig& cfg, const NumericsPolicy& pol, double eps, int grid_points) {
  if (!(eps > 0.0 && eps < 0.25)) throw DomainError("optimize_a2: eps must lie in (0, 0.25)");
  if (grid_points < 3) throw DomainError("optimize_a2: at least 3 grid points");
  const CapacityEstimate c11 = c11_exact(cfg, pol);
  A2Optimum best;
  best.c_max.value = -std::numeric_limits<double>::infinity();
  auto eval = [&](double a2) {
    CapacityEstimate e = c_noma_exact(c11, with_a2(cfg, a2), pol);
    const double v = e.value;
    if (v > best.c_max.value) {
      best.a2 = a2;
      best.c_max = std::move(e);
    }
    return v;
  };
  const double lo = eps, hi = 0.5 - eps, step = (hi - lo) / (grid_points - 1);
  int k_best = 0;
  for (int k = 0; k < grid_points; ++k) {
    const double a2 = k + 1 == grid_points ? hi : lo + k * step;
    const double v = eval(a2);
    best.grid.emplace_back(a2, v);
    if (v > best.grid[static_cast<std::size_t>(k_best)].second) k_best = k;
  }
  double a = best.grid[static_cast<std::size_t>(std::max(k_best - 1, 0))].first;
  double b = best.grid[static_cast<std::size_t>(std::min(k_best + 1, grid_points - 1))].first;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 80 && b - a > 1e-7; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = eval(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = eval(x1);
    }
  }
  return best;
}

std::vector<CheckLine> triangle_checks(const SystemConfig& cfg, const NumericsPolicy& pol, const McSettings& mc,
                                       double term_tol) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<CheckLine> out;
  auto term = [](const std::vector<CapacityTerm>& ts, const std::string& name) {
    for (const auto& t : ts)
      if (t.name == name) return t.value;
    throw DomainError("missing term " + name);
  };
  auto vs_quad = [&](std::string name, double closed, double quad) {
    out.push_back({std::move(name), closed, quad, nan, term_tol, std::abs(closed - quad) <= term_tol});
  };
  auto vs_mc = [&](std::string name, double closed, double quad, const McResult& r) {
    const double tol = std::max(0.01 * std::abs(closed), r.ci95);
    out.push_back({std::move(name), closed, quad, r.mean, tol, std::abs(closed - r.mean) <= tol});
  };

  const CapacityEstimate noma = c_noma_exact(cfg, pol);
  const auto nq = noma_terms_quadrature(cfg, pol);
  for (const char* t : {"C11", "C12", "C2"}) vs_quad(std::string("noma.") + t, term(noma.detail, t), term(nq, t));
  const double noma_quad = term(nq, "C11") - term(nq, "C12") + term(nq, "C2");
  vs_mc("noma.total_mc", noma.value, noma_quad, simulate_noma(cfg, mc));

  const CapacityEstimate oma = c_oma_exact(cfg, pol);
  const auto oq = oma_terms_quadrature(cfg, pol);
  for (const char* t : {"Upsilon*J2", "Psi*J3", "Psi*Upsilon*J4", "S2", "S4", "tail"})
    vs_quad(std::string("oma.") + t, term(oma.detail, t), term(oq, t));
  const double oma_quad = oma_log1p_quadrature(cfg, pol.quad_tol) / (2.0 * std::log(2.0));
  vs_quad("oma.total", oma.value, oma_quad);
  vs_mc("oma.total_mc", oma.value, oma_quad, simulate_oma(cfg, mc));
  return out;
}

std::string format_check(const CheckLine& c) {
  return c.name + "," + format_number(c.closed) + "," + format_number(c.quadrature) + "," + format_number(c.mc) + "," +
         format_number(c.tolerance) + "," + (c.pass ? "PASS" : "FAIL");
}

}  // namespace fsnoma
