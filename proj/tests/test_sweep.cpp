#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fsnoma/capacity_noma.hpp"
#include "fsnoma/capacity_oma.hpp"
#include "fsnoma/config.hpp"
#include "fsnoma/errors.hpp"
#include "fsnoma/sweep.hpp"

using namespace fsnoma;

namespace {

std::string recipe(const std::string& name) { return std::string(FSNOMA_RECIPES_DIR) + "/" + name; }

SweepSpec small_spec() {
  SweepSpec s;
  s.axis = Axis::a2;
  s.values = {0.05, 0.1, 0.2, 0.3, 0.4};
  s.methods = {EvalMethod::oma_exact, EvalMethod::noma_mc};
  s.mc.n_samples = 5000;
  return s;
}

// Capacity column for one method, in axis order.
std::vector<double> column(const std::vector<SweepRow>& rows, const std::string& method) {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.method == method) out.push_back(r.capacity);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Sweep, OneRowPerValueAndMethodSorted) {
  const auto rows = run_sweep(small_spec());
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    EXPECT_TRUE(a.axis_value < b.axis_value || (a.axis_value == b.axis_value && a.method < b.method));
  }
  for (const auto& r : rows) {
    EXPECT_EQ(r.axis_name, "a2");
    EXPECT_EQ(r.status, "ok");
    EXPECT_EQ(r.wall_ms, 0.0);
  }
}

TEST(Sweep, ByteIdenticalAcrossRunsAndWorkerCounts) {
  SweepSpec s = small_spec();
  const std::string a = to_csv(run_sweep(s));
  EXPECT_EQ(a, to_csv(run_sweep(s)));
  s.mc.n_workers = 4;
  EXPECT_EQ(a, to_csv(run_sweep(s)));
}

TEST(Sweep, CsvRoundTripIsLossless) {
  SweepSpec s = small_spec();
  s.timing = true;
  const auto rows = run_sweep(s);
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  const auto back = parse_csv(text);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].axis_value, rows[i].axis_value);
    EXPECT_EQ(back[i].capacity, rows[i].capacity);
    EXPECT_EQ(back[i].error, rows[i].error);
    EXPECT_EQ(back[i].wall_ms, rows[i].wall_ms);
    EXPECT_EQ(back[i].n_samples_or_terms, rows[i].n_samples_or_terms);
    EXPECT_EQ(back[i].method, rows[i].method);
  }
  EXPECT_EQ(to_csv(back), text);
  EXPECT_THROW(parse_csv("a,b\n"), DomainError);
}

TEST(Sweep, PointErrorsStayInRow) {
  SweepSpec s;
  s.axis = Axis::m_s_link;
  s.link = LinkId::sd;
  s.values = {4, 8};
  s.methods = {EvalMethod::noma_exact, EvalMethod::oma_exact};
  s.base = {{2, 4}, {2, 4}, {2, 4}, 0.1, 20.0, 0.0};
  const auto rows = run_sweep(s);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_EQ(rows[1].status, "ok");  // sd = rd at ms = 4
  EXPECT_EQ(rows[2].status, "ok");
  EXPECT_EQ(rows[3].method, "oma_exact");
  EXPECT_EQ(rows[3].status, "error");
  EXPECT_TRUE(std::isnan(rows[3].capacity));
  EXPECT_NE(to_csv(rows).find(",nan,"), std::string::npos);
}

TEST(Sweep, RejectsInvalidSpecs) {
  SweepSpec s = small_spec();
  s.values = {0.1, 0.1};
  EXPECT_THROW(run_sweep(s), DomainError);
  s.values = {0.1, 0.6};
  EXPECT_THROW(run_sweep(s), DomainError);
  s.values = {};
  EXPECT_THROW(run_sweep(s), DomainError);
  s = small_spec();
  s.methods.clear();
  EXPECT_THROW(run_sweep(s), DomainError);
  s = small_spec();
  s.axis = Axis::snr_db;
  s.values = {0.0, INFINITY};
  EXPECT_THROW(run_sweep(s), DomainError);
}

TEST(Sweep, AxesMapToConfigurations) {
  SweepSpec s;
  s.base.shadowing_ratio = 3.0;
  s.axis = Axis::m_sr;
  auto c = point_config(s, 2.0);
  EXPECT_EQ(c.links.sr.m(), 2.0);
  EXPECT_EQ(c.links.sr.ms(), 7.0);
  EXPECT_EQ(c.links.rd.m(), 5.0);
  s.axis = Axis::m_all;
  c = point_config(s, 1.0);
  EXPECT_EQ(c.links.sd.ms(), 4.0);
  s.axis = Axis::snr_db;
  EXPECT_NEAR(point_config(s, 30.0).mean_snr, 1000.0, 1e-9);
  s.axis = Axis::m_s_link;
  s.link = LinkId::rd;
  EXPECT_EQ(point_config(s, 9.0).links.rd.ms(), 9.0);
  EXPECT_NE(point_seed(1, 0), point_seed(1, 1));
  EXPECT_NE(point_seed(1, 0), point_seed(2, 0));
}

TEST(Sweep, AtomicWriteLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "fsnoma_sweep_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  write_file_atomic(path, "x\n");
  write_file_atomic(path, "y\n");
  EXPECT_EQ(read_file(path), "y\n");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THROW(write_file_atomic((dir / "missing" / "out.csv").string(), "z"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Recipes, AllParse) {
  for (const auto& e : std::filesystem::directory_iterator(FSNOMA_RECIPES_DIR)) {
    const auto rc = load_config(e.path().string());
    EXPECT_FALSE(rc.sweep.values.empty()) << e.path();
  }
}

TEST(Recipes, Fig2ShapeHolds) {
  auto rc = load_config(recipe("fig2.yaml"));
  rc.sweep.methods = {EvalMethod::noma_exact, EvalMethod::oma_exact};
  const auto rows = run_sweep(rc.sweep);
  const auto noma = column(rows, "noma_exact"), oma = column(rows, "oma_exact");
  ASSERT_EQ(rc.sweep.values.front(), 0.0);
  ASSERT_EQ(rc.sweep.values.back(), 40.0);
  EXPECT_GT(noma.back(), oma.back());
  EXPECT_GE(oma.front(), noma.front());
}

TEST(Recipes, Fig5CapacityNondecreasingInShadowing) {
  for (const char* name : {"fig5_sr.yaml", "fig5_rd.yaml", "fig5_sd.yaml"}) {
    auto rc = load_config(recipe(name));
    std::vector<EvalMethod> exact;
    for (auto m : rc.sweep.methods)
      if (m != EvalMethod::noma_mc && m != EvalMethod::oma_mc) exact.push_back(m);
    rc.sweep.methods = exact;
    const auto rows = run_sweep(rc.sweep);
    for (auto m : exact) {
      const auto c = column(rows, std::string(to_string(m)));
      for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GE(c[i], c[i - 1] - 1e-9) << name << " " << to_string(m);
    }
    for (const auto& r : rows) EXPECT_NE(r.status, "error") << name;
  }
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  EXPECT_THROW(parse_config("system: {snr: 3}"), DomainError);
  EXPECT_THROW(parse_config("sweep: {axis: pressure}"), DomainError);
  EXPECT_THROW(parse_config("monte_carlo: {samples: many}"), DomainError);
  EXPECT_THROW(parse_config("sweep: {values: [1], range: {from: 0, to: 1, step: 1}}"), DomainError);
  EXPECT_THROW(load_config("/nonexistent/spec.yaml"), IoError);
}

TEST(Config, DumpReadsBackToTheSameSpec) {
  const auto rc = load_config(recipe("fig5_rd.yaml"));
  const auto back = parse_config(dump_config(rc));
  EXPECT_EQ(dump_config(back), dump_config(rc));
  EXPECT_EQ(back.sweep.values, rc.sweep.values);
  EXPECT_EQ(back.sweep.link, LinkId::rd);
  EXPECT_EQ(back.sweep.mc.master_seed, rc.sweep.mc.master_seed);
}

TEST(Config, RangeValuesAreExactDecimals) {
  const auto rc = parse_config("sweep: {axis: a2, range: {from: 0.01, to: 0.49, step: 0.01}, methods: [noma_exact]}");
  ASSERT_EQ(rc.sweep.values.size(), 49u);
  EXPECT_EQ(rc.sweep.values[2], 0.03);
  EXPECT_EQ(rc.sweep.values.back(), 0.49);
}

TEST(Optimize, InteriorMaximumAt25dB) {
  const NumericsPolicy pol;
  const auto cfg = make_config({5, 16}, {5, 16}, {5, 16}, 0.01, db_to_linear(25));
  const auto opt = optimize_a2(cfg, pol);
  EXPECT_GT(opt.a2, 1e-3);
  EXPECT_LT(opt.a2, 0.5 - 1e-3);
  double grid_max = -INFINITY;
  for (const auto& [a2, c] : opt.grid) grid_max = std::max(grid_max, c);
  EXPECT_EQ(opt.grid.size(), 32u);
  EXPECT_GE(opt.c_max.value, grid_max);
  EXPECT_GE(opt.c_max.value, c_noma_exact(cfg, pol).value);
  EXPECT_EQ(opt.c_max.value, c_noma_exact(with_a2(cfg, opt.a2), pol).value);
}

TEST(Optimize, ReusedC11GivesTheSameCapacity) {
  const NumericsPolicy pol;
  const auto cfg = make_config({2, 7}, {5, 16}, {5, 16}, 0.2, db_to_linear(20));
  const auto c11 = c11_exact(cfg, pol);
  EXPECT_EQ(c_noma_exact(c11, cfg, pol).value, c_noma_exact(cfg, pol).value);
}

TEST(Validate, TriangleChecksPassAtDefaults) {
  const NumericsPolicy pol;
  const auto cfg = make_config({5, 16}, {5, 16}, {5, 16}, 0.01, db_to_linear(20));
  const auto checks = triangle_checks(cfg, pol, McSettings{200000, 99, 1}, pol.cap_tol);
  ASSERT_EQ(checks.size(), 12u);
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << format_check(c);
  const auto strict = triangle_checks(cfg, pol, McSettings{20000, 99, 1}, 1e-15);
  ASSERT_EQ(strict.size(), 12u);
  EXPECT_TRUE(std::any_of(strict.begin(), strict.end(), [](const CheckLine& c) { return !c.pass; }));
}
