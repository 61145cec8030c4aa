// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hemtsq/hemtsq.hpp"
#include "hemtsq/selfcheck.hpp"
#include "hemtsq/verify/analytic.hpp"

using namespace hemtsq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string printf_str(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string printf_str(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

/// H = i (r/t0) (a^2 - a+^2)/2 on mode 2 only.
HamiltonianSet squeeze_generator(double r, double t0, Cutoffs cut) {
  HamiltonianSet h;
  const FockOperator a = embed(annihilation(cut.mode2), 2, cut.mode1);
  const FockOperator ad = a.adjoint();
  h.total = Complex(0.0, 0.5 * r / t0) * (a * a - ad * ad);
  h.linear = h.total;
  h.nonlinear = zero_operator(cut.mode1, cut.mode2);
  return h;
}

// 1. pure squeeze generator evolved through the full propagator
Outcome squeeze_variance() {
  const auto start = std::chrono::steady_clock::now();
  const double t0 = 7e-8;
  double worst = 0.0;
  for (double r : {0.1, 0.5, 1.0}) {
    EvolutionConfig ec;
    ec.t0 = t0;
    const auto psi = evolve(squeeze_generator(r, t0, {2, 80}), ec).state;
    const double v = minimum_quadrature(mode_moments(psi, 2)).variance;
    worst = std::max(worst, std::abs(v - std::exp(-2.0 * r) / 4.0));
  }
  const double s = seconds_since(start);
  return {worst < 1e-6 && s < 5.0, printf_str("cutoff 80, max |var - e^-2r/4| = %.2e, %.2f s", worst, s)};
}

// 2. Hamiltonian linear in the ladder operators: bare modes plus circuit drives
Outcome coherent_baseline() {
  const auto start = std::chrono::steady_clock::now();
  const auto st = prepare_operating_state(CircuitConfig{});
  double var_dev = 0.0, g2_dev = 0.0, n_min = 1e300;
  for (double scale : {1.0, 10.0}) {
    LinearTerms L;
    L.omega1 = st.linear.omega1;
    L.omega2 = st.linear.omega2;
    L.drive1 = scale * st.linear.drive1;
    L.drive2 = scale * st.linear.drive2;
    const Cutoffs cut = scale == 1.0 ? Cutoffs{8, 10} : Cutoffs{12, 18};
    HamiltonianSet h;
    h.total = build_linear(L, cut);
    EvolutionConfig ec;
    ec.t0 = st.t0;
    const auto psi = evolve(h, ec).state;
    for (int mode : {1, 2}) {
      const auto rep = observe(psi, mode);
      var_dev = std::max({var_dev, std::abs(rep.var_x - 0.25), std::abs(rep.var_y - 0.25)});
      g2_dev = std::max({g2_dev, std::abs(rep.g2 - 1.0), std::abs(rep.g2_standard - 1.0)});
      n_min = std::min(n_min, rep.n_mean);
    }
  }
  // for reference: the full quadratic part of the circuit Hamiltonian is not coherent
  HamiltonianSet hl;
  hl.total = build_linear(st.linear, {8, 10});
  EvolutionConfig ec;
  ec.t0 = st.t0;
  const auto rep = observe(evolve(hl, ec).state, 2);
  const double s = seconds_since(start);
  return {var_dev < 1e-6 && g2_dev < 1e-4 && s < 10.0,
          printf_str("max |var - 0.25| = %.2e, max |g2 - 1| = %.2e, min <n> = %.2e, %.2f s "
                     "(with kc/k12/k22 couplings: mode-2 |var_min - 0.25| = %.2e)",
                     var_dev, g2_dev, n_min, s, std::abs(rep.var_min - 0.25))};
}

// 3. two-mode squeeze with real total (zeta_t1 + zeta_t2) t0 = r
Outcome two_mode_squeeze() {
  const double t0 = 9e-8;
  double n_err = 0.0, epr_err = 0.0, mapped_err = 0.0;
  std::string sample;
  for (double r : {0.1, 0.25, 0.5}) {
    SqueezeParams sp;
    sp.zeta_t1 = r / t0;
    const auto psi = apply_two_mode_squeeze(sp, t0, vacuum(30, 30)).state;
    const double n = photon_stats(psi, 1).n_mean;
    const double e = epr_variance(psi);
    n_err = std::max(n_err, std::abs(n - std::pow(std::sinh(r), 2)));
    epr_err = std::max(epr_err, std::abs(e - std::exp(-2.0 * r)));
    if (r == 0.5) sample = printf_str("r=0.5: <n> %.5f vs %.5f, EPR %.5f vs %.5f", n, std::pow(std::sinh(r), 2), e,
                                      std::exp(-2.0 * r));
    // same operator, strength and sign chosen so the exponent equals -r (a1 a2 - h.c.)
    sp.zeta_t1 = -2.0 * r / t0;
    const auto q = apply_two_mode_squeeze(sp, t0, vacuum(30, 30)).state;
    mapped_err = std::max({mapped_err, std::abs(photon_stats(q, 1).n_mean - std::pow(std::sinh(r), 2)),
                           std::abs(epr_variance(q) - std::exp(-2.0 * r))});
  }
  return {n_err < 1e-5 && epr_err < 1e-4,
          printf_str("max |<n> - sinh^2 r| = %.2e, max |EPR - e^-2r| = %.2e; %s; with (zeta_t1+zeta_t2) t0 = -2r the "
                     "oracle error is %.2e",
                     n_err, epr_err, sample.c_str(), mapped_err)};
}

// 4. invariant suite
Outcome invariants() {
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_selfcheck();
  const double s = seconds_since(start);
  bool ok = s < 60.0;
  std::string failed;
  for (const auto& r : results) {
    std::printf("    %s %s: %s (%.2f s)\n", r.passed ? "ok  " : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    if (!r.passed) {
      ok = false;
      failed += " " + r.name;
    }
  }
  return {ok, printf_str("%zu checks, %.2f s%s%s", results.size(), s, failed.empty() ? "" : ", failed:", failed.c_str())};
}

// 5. coefficient anchor
Outcome coefficient_anchor() {
  const auto c = compute_coefficients(CircuitConfig{});
  const double g_err = std::abs(c.dc.g_m2N - 0.677) / 0.677;
  const double cn_err = std::abs(c.dc.C_N - 3.3e-12) / 3.3e-12;
  return {g_err <= 1e-15 && cn_err <= 0.05,
          printf_str("g_m2N = %.15g A/V^2 (rel %.1e), C_N = %.4g pF (rel %.3f)", c.dc.g_m2N, g_err, c.dc.C_N * 1e12,
                     cn_err)};
}

std::vector<SweepRow> gm_sweep(const CircuitConfig& fixed) {
  SweepSpec spec;
  spec.parameter = "g_m";
  spec.start = 0.005;
  spec.stop = 0.15;
  spec.points = 60;
  spec.fixed = fixed;
  spec.path = EvolutionPath::squeeze;
  return run_sweep(spec);
}

// antibunching width restricted to rows that reached convergence
double converged_width(const std::vector<SweepRow>& rows) {
  const double step = (rows.back().param - rows.front().param) / double(rows.size() - 1);
  double w = 0.0;
  for (const auto& r : rows)
    if (r.converged && r.g2_paper < 1.0) w += step;
  return w;
}

int flagged(const std::vector<SweepRow>& rows) {
  int n = 0;
  for (const auto& r : rows) n += r.converged ? 0 : 1;
  return n;
}

// 6. variance dip and antibunching in a g_m sweep
Outcome gm_sweep_trend() {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = gm_sweep(CircuitConfig{});
  const double s = seconds_since(start);
  size_t best = 0;
  for (size_t i = 0; i < rows.size(); ++i)
    if (!(rows[i].var_y2 >= rows[best].var_y2)) best = i;
  const bool a = rows[best].var_y2 < 0.25 && rows[best].param >= 0.020 && rows[best].param <= 0.070;
  const bool b = rows.front().var_y2 > 0.25 && rows.back().var_y2 > 0.25;
  bool c = false;
  if (rows[best].var_y2 < 0.25) {
    size_t lo = best, hi = best;
    while (lo > 0 && rows[lo - 1].var_y2 < 0.25) --lo;
    while (hi + 1 < rows.size() && rows[hi + 1].var_y2 < 0.25) ++hi;
    for (size_t i = lo; i <= hi; ++i) c = c || rows[i].g2_paper < 1.0;
  }
  // the same reading on converged rows only
  size_t cbest = rows.size();
  double g2_lo = 1e300, g2_hi = -1e300, dip_lo = 1e300, dip_hi = -1e300;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].converged) continue;
    if (cbest == rows.size() || rows[i].var_y2 < rows[cbest].var_y2) cbest = i;
    if (rows[i].g2_paper < 1.0) g2_lo = std::min(g2_lo, rows[i].param), g2_hi = std::max(g2_hi, rows[i].param);
    if (rows[i].var_y2 < 0.25) dip_lo = std::min(dip_lo, rows[i].param), dip_hi = std::max(dip_hi, rows[i].param);
  }
  std::string conv = "no converged rows";
  if (cbest < rows.size())
    conv = printf_str("converged rows only: min var_y2 = %.4g at %.1f mS, var_y2 < 0.25 on [%.1f, %.1f] mS, "
                      "g2_paper < 1 on [%.1f, %.1f] mS",
                      rows[cbest].var_y2, rows[cbest].param * 1e3, dip_lo * 1e3, dip_hi * 1e3, g2_lo * 1e3,
                      g2_hi * 1e3);
  return {a && b && c && s < 300.0,
          printf_str("(a) %s min var_y2 = %.4g at g_m = %.1f mS; (b) %s ends %.4g / %.4g; (c) %s; %d/60 rows flagged; "
                     "%.1f s; %s",
                     a ? "ok" : "no", rows[best].var_y2, rows[best].param * 1e3, b ? "ok" : "no", rows.front().var_y2,
                     rows.back().var_y2, c ? "ok" : "no", flagged(rows), s, conv.c_str())};
}

// 7. antibunching window widths between pairs of sweeps
Outcome window_trends() {
  const auto start = std::chrono::steady_clock::now();
  struct Pair {
    const char* name;
    std::function<void(CircuitConfig&)> low, high;
    bool high_wider;
  };
  const std::vector<Pair> pairs = {
      {"g_m3 0.6 -> 1.2", [](CircuitConfig& c) { c.transistor.g_m3 = 0.6; },
       [](CircuitConfig& c) { c.transistor.g_m3 = 1.2; }, true},
      {"kappa/omega 1e-3 -> 2e-3", [](CircuitConfig& c) { c.oscillators.kappa_ratio = 1e-3; },
       [](CircuitConfig& c) { c.oscillators.kappa_ratio = 2e-3; }, false},
      {"C_f 20 -> 40 fF", [](CircuitConfig& c) { c.source.C_f = 20e-15; },
       [](CircuitConfig& c) { c.source.C_f = 40e-15; }, true},
      {"V_RF 1 -> 2 uV", [](CircuitConfig& c) { c.source.V_RF = 1e-6; },
       [](CircuitConfig& c) { c.source.V_RF = 2e-6; }, true},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const auto& p : pairs) {
    CircuitConfig lo, hi;
    p.low(lo);
    p.high(hi);
    const auto rl = gm_sweep(lo);
    const auto rh = gm_sweep(hi);
    const double wl = antibunching_width(rl), wh = antibunching_width(rh);
    const bool good = p.high_wider ? wh > wl : wh < wl;
    ok = ok && good;
    detail << (good ? "" : "[x] ") << p.name << ": " << wl * 1e3 << " -> " << wh * 1e3 << " mS (converged rows only "
           << converged_width(rl) * 1e3 << " -> " << converged_width(rh) * 1e3 << " mS; flagged " << flagged(rl) << "/"
           << flagged(rh) << "); ";
  }
  detail << printf_str("%.1f s", seconds_since(start));
  return {ok, detail.str()};
}

// 8. classical step response of the output network
Outcome step_response_check() {
  const CircuitConfig cfg;
  const auto tf = build_transfer_function(compute_coefficients(cfg), cfg.transistor, cfg.oscillators, cfg.source,
                                          cfg.r0, cfg.R_damp);
  const auto a = step_response(tf, 200e-9, 1e-11);
  const auto b = step_response_ode(tf, 200e-9, 1e-11);
  double peak = 0.0, diff = 0.0;
  for (size_t i = 0; i < a.y.size(); ++i) {
    peak = std::max(peak, std::abs(a.y[i]));
    diff = std::max(diff, std::abs(a.y[i] - b.y[i]));
  }
  const bool agree = peak > 0.0 && diff < 1e-6 * peak;
  const std::string agreement = printf_str("analytic vs ODE %.2e of peak", peak > 0 ? diff / peak : 0.0);
  try {
    const double ts = settling_time(tf);
    const bool in_band = ts >= 40e-9 && ts <= 160e-9;
    return {in_band && agree, printf_str("settling %.4g ns; %s", ts * 1e9, agreement.c_str())};
  } catch (const NoSettlingError& e) {
    std::ostringstream roots;
    for (const auto& r : e.roots()) roots << ' ' << r;
    return {false, std::string(e.what()) + "; poles" + roots.str() + "; " + agreement};
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 squeeze variance oracle", squeeze_variance},
      {"2 coherent baseline", coherent_baseline},
      {"3 two-mode squeeze oracle", two_mode_squeeze},
      {"4 invariant suite", invariants},
      {"5 coefficient anchor", coefficient_anchor},
      {"6 g_m sweep trend", gm_sweep_trend},
      {"7 antibunching window trends", window_trends},
      {"8 step response settling", step_response_check},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
