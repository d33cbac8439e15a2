// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "srcdelay/app/commands.hpp"
#include "srcdelay/steady_state.hpp"

using namespace srcdelay;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

NetworkConfig reference_config() {
  NetworkConfig cfg;
  cfg.n = 100;
  cfg.m = 8;
  cfg.delta = 0.0;
  cfg.q = 0.4;
  cfg.lambda = 0.001;
  cfg.f = 2;
  cfg.M = 7;
  return cfg;
}

void contact_monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = reference_config();
  const auto p = contact_probabilities(cfg);
  const auto fr = single_slot_event_frequencies(cfg, 1000000, 2024);
  const double secs = seconds_since(t0);
  const double z0 = (fr.p0 - p.p0) / fr.se0;
  const double z1 = (fr.p1 - p.p1) / fr.se1;
  report(1, std::abs(z0) <= 3.0 && std::abs(z1) <= 3.0 && secs <= 60.0,
         fmt("p0 %.6f vs %.6f (z=%.2f), p1 %.6f vs %.6f (z=%.2f), %.1fs", fr.p0, p.p0, z0, fr.p1, p.p1, z1, secs));
}

void exact_rationals() {
  NetworkConfig cfg;
  cfg.n = 2;
  cfg.m = 4;
  cfg.delta = 0.0;
  cfg.q = 0.5;
  const auto p = contact_probabilities(cfg);
  const double e0 = std::abs(p.p0 - 17.0 / 512.0);
  const double e1 = std::abs(p.p1 - 7.0 / 512.0);
  report(2, e0 <= 1e-15 && e1 <= 1e-15, fmt("|p0-17/512|=%.2e |p1-7/512|=%.2e", e0, e1));
}

void solver_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (int M : {3, 5, 7})
    for (int f : {1, 2, 3})
      for (double lambda : {0.001, 0.005})
        for (double q : {0.2, 0.6}) {
          NetworkConfig cfg = reference_config();
          cfg.M = M;
          cfg.f = f;
          cfg.lambda = lambda;
          cfg.q = q;
          const auto a = solve_pi_omega(cfg);
          const auto b = solve_pi_omega_dense(cfg);
          worst = std::max(worst, (a.values - b.values).cwiseAbs().maxCoeff());
          ++points;
        }
  const double secs = seconds_since(t0);
  report(3, worst <= 1e-10 && secs <= 10.0, fmt("%d configs, max |diff| %.2e, %.3fs", points, worst, secs));
}

void phase_type_consistency() {
  const auto rep = phase_type(reference_config());
  const auto horizon = adaptive_horizon(rep);
  long double mass = 0, first = 0, second = 0;
  RowVector v = rep.pi_minus;
  for (std::int64_t u = 1; u <= horizon; ++u) {
    const long double pu = v.dot(rep.c_plus.transpose());
    mass += pu;
    first += pu * u;
    second += pu * u * u;
    v = v * rep.T;
  }
  const double m = mean(rep);
  const double var = variance(rep);
  const double rm = std::abs(static_cast<double>(first) - m) / m;
  const double rv = std::abs(static_cast<double>(second - first * first) - var) / var;
  const double missing = 1.0 - static_cast<double>(mass);
  report(4, rm <= 1e-6 && rv <= 1e-6 && missing <= 1e-9,
         fmt("mean %.6f (rel %.1e), variance %.4f (rel %.1e), mass deficit %.1e at u=%lld", m, rm, var, rv,
             missing, static_cast<long long>(horizon)));
}

void geometric_case() {
  double worst_mean = 0.0;
  double worst_var = 0.0;
  for (int n : {20, 100, 300})
    for (double q : {0.2, 0.4, 0.8})
      for (double lambda : {0.001, 0.01}) {
        NetworkConfig cfg = reference_config();
        cfg.n = n;
        cfg.q = q;
        cfg.lambda = lambda;
        cfg.M = 1;
        cfg.f = 1;
        const auto p = contact_probabilities(cfg);
        const auto rep = phase_type(cfg);
        const double s = p.p0 + p.p1;
        worst_mean = std::max(worst_mean, std::abs(mean(rep) * s - 1.0));
        worst_var = std::max(worst_var, std::abs(variance(rep) * s * s / p.p2 - 1.0));
      }
  report(5, worst_mean <= 1e-14 && worst_var <= 1e-14,
         fmt("max relative error: mean %.1e, variance %.1e", worst_mean, worst_var));
}

void delay_law_agreement(int n) {
  const auto t0 = std::chrono::steady_clock::now();
  NetworkConfig cfg = reference_config();
  cfg.n = n;
  const auto rep = phase_type(cfg);
  const double per_slot = acceptance_probability(cfg, solve_pi_omega(cfg)) * n;
  SimulationOptions opts;
  opts.warmup = app::default_warmup(cfg);
  opts.slots = opts.warmup + static_cast<std::int64_t>(30000.0 / per_slot);
  opts.seed = 5;
  const auto emp = run_replicas(cfg, opts);
  const auto c = compare(rep, emp.samples);
  const double secs = seconds_since(t0);
  const double z = c.mean_delta / c.empirical.mean_se;
  report(6, c.passed && c.empirical.count >= 10000 && secs <= 300.0,
         fmt("n=%d: %zu samples, KS %.4f (<= 0.02), mean %.2f vs %.2f (z=%.2f), %.1fs", n, c.empirical.count,
             c.ks_distance, c.empirical.mean, c.analytic_mean, z, secs));
}

// Grid argmax of the delay standard deviation over lambda for each M.
std::vector<double> sigma_peaks(double delta) {
  std::vector<double> peaks;
  for (int M : {3, 5, 7}) {
    double best = -1.0;
    double where = 0.0;
    for (int k = 1; k <= 10; ++k) {
      NetworkConfig cfg;
      cfg.n = 200;
      cfg.m = 16;
      cfg.q = 0.6;
      cfg.f = 3;
      cfg.delta = delta;
      cfg.M = M;
      cfg.lambda = 0.0005 * k;
      const double sd = std::sqrt(variance(phase_type(cfg)));
      if (sd > best) {
        best = sd;
        where = cfg.lambda;
      }
    }
    peaks.push_back(where);
  }
  return peaks;
}

void sigma_peak_location() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  for (double delta : {0.0, 1.0}) {
    const auto peaks = sigma_peaks(delta);
    const bool same = peaks[0] == peaks[1] && peaks[1] == peaks[2];
    const bool at_target = same && std::abs(peaks[0] - 0.0025) < 1e-12;
    detail += fmt("delta=%g argmax M=3,5,7: %.4f %.4f %.4f; ", delta, peaks[0], peaks[1], peaks[2]);
    if (at_target) {
      pass = true;
      break;
    }
  }
  const double secs = seconds_since(t0);
  report(7, pass && secs <= 10.0, detail + fmt("%.2fs", secs));
}

void dispatch_monotonicity() {
  bool pass = true;
  std::string where;
  for (int f : {1, 2, 4}) {
    double prev_mean = INFINITY;
    double prev_sd = INFINITY;
    for (int k = 1; k <= 9; ++k) {
      NetworkConfig cfg;
      cfg.n = 300;
      cfg.m = 16;
      cfg.M = 7;
      cfg.lambda = 0.002;
      cfg.f = f;
      cfg.q = 0.1 * k;
      const auto rep = phase_type(cfg);
      const double m = mean(rep);
      const double sd = std::sqrt(variance(rep));
      if (!(m < prev_mean && sd < prev_sd)) {
        pass = false;
        where += fmt(" f=%d q=%.1f", f, cfg.q);
      }
      prev_mean = m;
      prev_sd = sd;
    }
  }
  report(8, pass, pass ? "mean and std_dev strictly decrease in q for f=1,2,4" : "not monotone at" + where);
}

void occupancy() {
  const auto t0 = std::chrono::steady_clock::now();
  NetworkConfig cfg;
  cfg.n = 20;
  cfg.m = 4;
  cfg.M = 3;
  cfg.f = 2;
  cfg.q = 0.5;
  cfg.lambda = 0.01;
  cfg.delta = 0.0;
  const auto pi = solve_pi_omega(cfg);
  const auto occ = queue_occupancy(cfg, 1000000, app::default_warmup(cfg), 99);
  double tv = 0.0;
  for (std::size_t i = 0; i < occ.size(); ++i) tv += std::abs(occ[i] - pi.values(static_cast<Eigen::Index>(i)));
  tv *= 0.5;
  report(9, tv <= 0.01, fmt("total variation %.5f over 10^6 slots x %d nodes, %.1fs", tv, cfg.n, seconds_since(t0)));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / "srcdelay_acceptance";
  fs::remove_all(root);
  std::vector<std::string> outputs;
  for (const char* name : {"a", "b"}) {
    app::RunSpec spec;
    spec.mode = app::Mode::simulate;
    spec.config = reference_config();
    spec.simulation.slots = 100000;
    spec.simulation.seed = 1234;
    spec.simulation.replicas = 2;
    spec.output = root / name;
    spec.samples_csv = root / name / "samples.csv";
    app::cmd_simulate(spec);
    outputs.push_back(slurp(root / name / "simulate_cdf.csv") + slurp(root / name / "simulate_summary.json") +
                      slurp(root / name / "samples.csv"));
  }
  report(10, outputs[0] == outputs[1] && !outputs[0].empty(),
         fmt("two runs, seed 1234: %zu bytes each, identical=%s", outputs[0].size(),
             outputs[0] == outputs[1] ? "yes" : "no"));
}

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, contact_monte_carlo);
  guarded(2, exact_rationals);
  guarded(3, solver_equivalence);
  guarded(4, phase_type_consistency);
  guarded(5, geometric_case);
  guarded(6, [] { delay_law_agreement(100); });
  guarded(6, [] { delay_law_agreement(200); });
  guarded(7, sigma_peak_location);
  guarded(8, dispatch_monotonicity);
  guarded(9, occupancy);
  guarded(10, determinism);
  std::printf("%d failing\n", failures);
  return failures == 0 ? 0 : 1;
}
