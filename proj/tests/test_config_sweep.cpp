#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hemtsq/config.hpp"
#include "hemtsq/pipeline.hpp"
#include "hemtsq/sweep.hpp"
#include "hemtsq/verify/analytic.hpp"

using namespace hemtsq;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hemtsq_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.parameter = "g_m";
  spec.start = 0.025;
  spec.stop = 0.04;
  spec.points = 4;
  spec.threads = 1;
  return spec;
}

void expect_same_coefficients(const DerivedCoefficients& a, const DerivedCoefficients& b) {
  EXPECT_EQ(a.aggregates.C_A, b.aggregates.C_A);
  EXPECT_EQ(a.dc.C_N, b.dc.C_N);
  EXPECT_EQ(a.dc.g_m2N, b.dc.g_m2N);
  EXPECT_EQ(a.linear.g22, b.linear.g22);
  EXPECT_EQ(a.linear.I_p2, b.linear.I_p2);
  EXPECT_EQ(a.modes.omega2, b.modes.omega2);
  EXPECT_EQ(a.cubic.as_array(), b.cubic.as_array());
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const auto cfg = parse_config_string("");
  EXPECT_EQ(cfg.transistor.g_m, 45e-3);
  EXPECT_EQ(cfg.transistor.g_m2, 0.2);
  EXPECT_EQ(cfg.transistor.g_m3, 1.2);
  EXPECT_EQ(cfg.transistor.C_gs, 69e-15);
  EXPECT_EQ(cfg.transistor.R_gd, 35.0);
  EXPECT_EQ(cfg.source.C_f, 20e-15);
  EXPECT_EQ(cfg.source.V_RF, 1e-6);
  EXPECT_EQ(cfg.oscillators.kappa_ratio, 1e-3);
  EXPECT_EQ(cfg.source.T, 5.0);
}

TEST(Config, CommentsAndWhitespace) {
  const auto cfg = parse_config_string("# header\n\n  g_m = 0.03   # trailing\nV_RF=2e-6\r\n");
  EXPECT_EQ(cfg.transistor.g_m, 0.03);
  EXPECT_EQ(cfg.source.V_RF, 2e-6);
}

TEST(Config, NonlinearityOff) {
  const auto cfg = parse_config_string("g_m2 = 0\ng_m3 = 0\n");
  const auto st = prepare_operating_state(cfg);
  EXPECT_EQ(st.coeffs.dc.g_m2N, 0.0);
  EXPECT_EQ(st.squeeze.zeta2, Complex{});
  EXPECT_EQ(st.squeeze.zeta_t1, Complex{});
  EXPECT_EQ(st.squeeze.zeta_t2, Complex{});
  // the single-mode term keeps the linear -g22/2 contribution
  EXPECT_EQ(st.squeeze.zeta1, Complex(-0.5 * st.coeffs.linear.g22, 0.0));
}

TEST(Config, NegativeCapacitanceNamesField) {
  try {
    parse_config_string("C_gs = -1e-15\n");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "C_gs");
  }
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config_string("g_m = 0.04\nwhatever = 1\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "whatever");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, NonNumericValueReportsLine) {
  try {
    parse_config_string("\n\ng_m = fast\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "g_m");
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, MalformedAndDuplicateLines) {
  EXPECT_THROW(parse_config_string("g_m 0.04\n"), ValidationError);
  EXPECT_THROW(parse_config_string("g_m = 0.04\ng_m = 0.05\n"), ValidationError);
  EXPECT_THROW(parse_config_string("cutoff_max = 12.5\n"), ValidationError);
  EXPECT_THROW(parse_config_string("t0_settling = 2\n"), ValidationError);
  EXPECT_THROW(parse_config_string("T = 0\n"), ValidationError);
}

TEST(Config, RoundTripPreservesCoefficients) {
  CircuitConfig cfg;
  cfg.transistor.g_m = 0.0371;
  cfg.source.C_f = 23.3e-15;
  cfg.oscillators.kappa_ratio = 2.2e-3;
  cfg.numerics.cutoff_max = 35;
  std::ostringstream out;
  write_config(out, cfg);
  const auto back = parse_config_string(out.str());
  expect_same_coefficients(compute_coefficients(cfg), compute_coefficients(back));
  EXPECT_EQ(back.numerics.cutoff_max, 35);
  std::ostringstream again;
  write_config(again, back);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Config, EchoWithPrefixReloads) {
  std::ostringstream out;
  write_config(out, CircuitConfig{}, "# ");
  // a prefixed echo is all comments, so it loads as the defaults
  expect_same_coefficients(compute_coefficients(parse_config_string(out.str())), compute_coefficients(CircuitConfig{}));
}

TEST(Config, LoadFromFileAndEnvironment) {
  const std::string path = temp_path("env.cfg");
  {
    std::ofstream f(path);
    f << "g_m = 0.051\n";
  }
  EXPECT_EQ(load_config(path).transistor.g_m, 0.051);
  setenv("HEMTSQ_CONFIG", path.c_str(), 1);
  EXPECT_EQ(resolve_config(std::nullopt).transistor.g_m, 0.051);
  unsetenv("HEMTSQ_CONFIG");
  EXPECT_EQ(resolve_config(std::nullopt).transistor.g_m, 45e-3);
  EXPECT_THROW(load_config(temp_path("missing.cfg")), ValidationError);
  std::remove(path.c_str());
}

TEST(Config, EveryKeyIsListedOnce) {
  std::set<std::string> names;
  for (const auto& k : config_keys()) EXPECT_TRUE(names.insert(k.name).second) << k.name;
  EXPECT_TRUE(names.count("g_m"));
  EXPECT_TRUE(names.count("kappa_ratio"));
  EXPECT_TRUE(names.count("cutoff_max"));
}

TEST(Sweep, SpecValidation) {
  SweepSpec spec = small_spec();
  spec.parameter = "L1";
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = small_spec();
  spec.points = 1;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = small_spec();
  spec.stop = spec.start;
  EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(Sweep, GridEndpointsAreExact) {
  SweepSpec spec;
  spec.start = 0.005;
  spec.stop = 0.15;
  spec.points = 60;
  EXPECT_EQ(spec.value(0), 0.005);
  EXPECT_EQ(spec.value(59), 0.15);
}

TEST(Sweep, KappaIsRatio) {
  CircuitConfig cfg;
  cfg.oscillators.kappa1 = 5e6;
  apply_sweep_value(cfg, "kappa", 2e-3);
  EXPECT_EQ(cfg.oscillators.kappa_ratio, 2e-3);
  EXPECT_EQ(cfg.oscillators.kappa1, 0.0);
  const auto st = prepare_operating_state(cfg);
  EXPECT_NEAR(st.kappa2, 2e-3 * st.coeffs.modes.omega2, 1e-6);
}

TEST(Sweep, RowsInParameterOrderAndDeterministic) {
  SweepSpec spec = small_spec();
  const auto a = run_sweep(spec);
  spec.threads = 3;
  const auto b = run_sweep(spec);
  ASSERT_EQ(a.size(), 4u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].param, spec.value(int(i)));
    EXPECT_EQ(a[i].param, b[i].param);
    EXPECT_EQ(std::memcmp(&a[i].var_y2, &b[i].var_y2, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a[i].g2_paper, &b[i].g2_paper, sizeof(double)), 0);
    EXPECT_EQ(a[i].warnings, b[i].warnings);
  }
}

TEST(Sweep, PointIndependence) {
  const SweepSpec spec = small_spec();
  const auto rows = run_sweep(spec);
  for (int i = spec.points - 1; i >= 0; --i) {
    const auto r = evaluate_sweep_point(spec, i);
    EXPECT_EQ(r.var_x2, rows[size_t(i)].var_x2);
    EXPECT_EQ(r.n_mean, rows[size_t(i)].n_mean);
  }
}

TEST(Sweep, WithoutNonlinearityOnlyLinearSqueezeRemains) {
  // g_m2 = g_m3 = 0 leaves zeta1 = -g22/2, a real single-mode squeeze;
  // every row must be the displaced squeezed vacuum with xi = 2 zeta1 t0.
  // Without C_N mode 2 moves far up and |zeta1| t0 would be ~4-9 at the
  // automatic window, so the window is pinned to keep the state truncatable.
  SweepSpec spec = small_spec();
  spec.fixed.transistor.g_m2 = 0.0;
  spec.fixed.transistor.g_m3 = 0.0;
  spec.fixed.t0 = 1e-9;
  const auto rows = run_sweep(spec);
  for (size_t i = 0; i < rows.size(); ++i) {
    CircuitConfig cfg = spec.fixed;
    cfg.transistor.g_m = rows[i].param;
    const auto st = prepare_operating_state(cfg);
    const verify::GaussianMode g{2.0 * st.squeeze.zeta1 * st.t0, st.fields.A2};
    EXPECT_TRUE(rows[i].converged) << rows[i].param;
    EXPECT_NEAR(rows[i].var_x2, g.variance(0.0), 1e-6);
    EXPECT_NEAR(rows[i].var_y2, g.variance(constants::pi / 2), 1e-6);
    EXPECT_NEAR(rows[i].g2_paper, g.g2_paper(), 1e-5);
    EXPECT_EQ(rows[i].zeta2_mag, 0.0);
  }
}

TEST(Sweep, ErrorsStayInTheRow) {
  // a t0 override beyond 1/kappa is rejected at every point, but the sweep
  // still returns one flagged row per point
  SweepSpec spec = small_spec();
  spec.fixed.t0 = 1.0;
  const auto rows = run_sweep(spec);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.converged);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings.front().find("t0"), std::string::npos);
    EXPECT_TRUE(std::isnan(r.var_y2));
  }
}

TEST(Csv, HeaderAndLineCount) {
  std::vector<SweepRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[size_t(i)].param = 0.01 * (i + 1);
    rows[size_t(i)].var_x2 = 0.25;
    rows[size_t(i)].converged = true;
  }
  std::ostringstream out;
  emit_csv(rows, out);
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
  EXPECT_EQ(s.substr(0, s.find('\n')), "param,var_x2,var_y2,g2_paper,g2_standard,n_mean,zeta1_mag,zeta2_mag,epr,converged");
  EXPECT_NE(s.find("1.000000000e-02,2.500000000e-01,"), std::string::npos);
}

TEST(Csv, WarningRowIsMarkedButKept) {
  std::vector<SweepRow> rows(1);
  rows[0].param = 0.05;
  rows[0].var_y2 = 0.2;
  rows[0].warnings = {"observables not converged at cutoff 40"};
  std::ostringstream out;
  emit_csv(rows, out);
  const std::string line = out.str().substr(out.str().find('\n') + 1);
  EXPECT_NE(line.find("2.000000000e-01"), std::string::npos);
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "false\n");
}

TEST(Csv, IdenticalRunsAreByteIdentical) {
  const SweepSpec spec = small_spec();
  const std::string a = temp_path("a.csv"), b = temp_path("b.csv");
  emit_csv(run_sweep(spec), a);
  emit_csv(run_sweep(spec), b);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Csv, EmptyAndUnwritable) {
  std::ostringstream out;
  EXPECT_THROW(emit_csv({}, out), ValidationError);
  std::vector<SweepRow> rows(1);
  EXPECT_THROW(emit_csv(rows, std::string("/nonexistent-dir/x.csv")), ValidationError);
}

TEST(Csv, PanelCompanion) {
  std::vector<SweepRow> rows(2);
  rows[0].param = 0.01;
  rows[0].g2_paper = 0.8;
  rows[1].param = 0.02;
  rows[1].g2_paper = 1.2;
  std::ostringstream out;
  emit_panel_csv(rows, "g2_paper", out);
  EXPECT_EQ(out.str(), "param,g2_paper\n1.000000000e-02,8.000000000e-01\n2.000000000e-02,1.200000000e+00\n");
  EXPECT_THROW(emit_panel_csv(rows, "bogus", out), ValidationError);
}

TEST(Csv, AntibunchingWidthCountsSteps) {
  std::vector<SweepRow> rows(5);
  const double g2[5] = {1.2, 0.9, 0.8, 1.1, 0.95};
  for (int i = 0; i < 5; ++i) {
    rows[size_t(i)].param = 0.01 * i;
    rows[size_t(i)].g2_paper = g2[i];
  }
  EXPECT_NEAR(antibunching_width(rows), 0.03, 1e-15);
}
