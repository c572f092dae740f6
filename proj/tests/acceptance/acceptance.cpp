// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "freshnet/age_optimizer.hpp"
#include "freshnet/experiments.hpp"
#include "freshnet/queue_calculus.hpp"
#include "freshnet/slot_simulator.hpp"
#include "freshnet/spp_policy.hpp"
#include "freshnet/verify.hpp"

using namespace freshnet;

namespace {

// Tolerances and budgets.
constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kNetworks = 20;
constexpr std::size_t kMaxLinks = 8;
constexpr std::uint64_t kNetSlots = 1'000'000;
constexpr std::size_t kNetReps = 10;
constexpr double kHalfWidths = 2.0;        // C1
constexpr double kMaxRelHalfWidth = 0.01;  // C1
constexpr double kNetSeconds = 120.0;      // C1
constexpr double kCertGap = 1e-8;          // C4, relative to Omega
constexpr double kKLinkRel = 1e-6;         // C4
constexpr double kGridStep = 1e-6;         // C4
constexpr std::uint64_t kQueueSlots = 10'000'000;
constexpr double kQueueRel = 0.01;      // C5
constexpr double kQueueSeconds = 300.0;  // C5
constexpr double kAlphaTol = 1e-9;       // C6
constexpr double kSigmaTol = 1e-10;      // C6
constexpr double kSweepSeconds = 600.0;  // C11

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- shared network simulations (criteria 1-3) ------------------------------

struct NetRun {
  std::string scheduler;
  bool stationary = false;
  ReplicatedMetrics m;
};

std::vector<NetRun> g_runs;
double g_runs_seconds = 0.0;

void simulate_networks() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  const char* kinds[] = {"stationary", "uniform", "round-robin", "distributed"};
  for (std::size_t i = 0; i < kNetworks; ++i) {
    const auto nf = random_network(rng, kMaxLinks);
    const auto opt = solve_general(nf.net, nf.family).policy;
    std::string spec = kinds[i % 4];
    if (spec == "distributed") spec += ":" + fmt(0.2 + 0.4 * uniform01(rng), 3);
    const auto sched = make_scheduler(spec, nf.net, nf.family, opt);
    RunConfig cfg;
    cfg.horizon = kNetSlots;
    const std::vector<SourceSpec> sources(nf.net.size(), SourceSpec::active());
    g_runs.push_back({spec, sched->stationary(),
                      replicate(nf.net, nf.family, *sched, sources, cfg, kNetReps, kSeed + 1000 * i)});
  }
  g_runs_seconds = seconds_since(t0);
}

Outcome c1_frequency_identity() {
  Outcome o;
  double worst = 0.0, worst_rel_hw = 0.0;
  for (const auto& r : g_runs) {
    const double peak = r.m.weighted_peak.mean;
    const double diff = std::abs(peak - r.m.frequency_peak.mean);
    const double hw = r.m.weighted_peak.half_width;
    worst = std::max(worst, hw > 0.0 ? diff / (kHalfWidths * hw) : (diff > 1e-12 ? 1e300 : 0.0));
    worst_rel_hw = std::max(worst_rel_hw, hw / peak);
    if (diff > kHalfWidths * hw + 1e-12 || hw / peak > kMaxRelHalfWidth) o.passed = false;
  }
  if (g_runs_seconds > kNetSeconds) o.passed = false;
  o.detail = std::to_string(g_runs.size()) + " networks, worst |A^p - sum w/(gamma f_hat)| / 2hw = " + fmt(worst, 3) +
             ", worst hw/A^p = " + fmt(worst_rel_hw, 3) + ", " + fmt(g_runs_seconds, 3) + " s";
  return o;
}

Outcome c2_stationary_equal_ages() {
  Outcome o;
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& r : g_runs) {
    if (!r.stationary) continue;
    ++count;
    const double diff = std::abs(r.m.weighted_average.mean - r.m.weighted_peak.mean);
    const double ci = r.m.weighted_average.half_width + r.m.weighted_peak.half_width;
    worst = std::max(worst, diff / ci);
    if (diff > ci) o.passed = false;
  }
  o.detail = std::to_string(count) + " stationary runs, worst |A^ave - A^p| / CI = " + fmt(worst, 3);
  return o;
}

Outcome c3_peak_average_bound() {
  Outcome o;
  double worst = -1e300;
  for (const auto& r : g_runs) {
    const double excess = r.m.weighted_peak.mean - (2.0 * r.m.weighted_average.mean - 1.0);
    const double slack = r.m.weighted_peak.half_width + 2.0 * r.m.weighted_average.half_width;
    worst = std::max(worst, excess - slack);
    if (excess > slack) o.passed = false;
  }
  o.detail = std::to_string(g_runs.size()) + " runs, max A^p - (2A^ave - 1) - CI = " + fmt(worst, 4);
  return o;
}

// --- optimiser ---------------------------------------------------------------

Outcome c4_certificate() {
  Outcome o;
  std::mt19937_64 rng(kSeed + 4);
  double worst_gap = 0.0, worst_k = 0.0, worst_grid = 0.0;
  std::size_t klink = 0;
  for (int i = 0; i < 200; ++i) {
    const auto nf = random_network(rng, kMaxLinks);
    const auto sol = solve_general(nf.net, nf.family);
    const double rel = sol.certificate.gap / sol.certificate.omega;
    worst_gap = std::max(worst_gap, rel);
    if (!(rel <= kCertGap) || sol.status != SolveStatus::converged) o.passed = false;
    if (nf.family.kind() == FamilyKind::k_link) {
      ++klink;
      const auto k = solve_klink(nf.net, nf.family.max_active());
      const double d = std::abs(sol.peak_age - k.peak_age) / k.peak_age;
      worst_k = std::max(worst_k, d);
      if (d > kKLinkRel) o.passed = false;
    }
  }
  // Two links that cannot share a slot: a / f + b / (1 - f) on a fine grid.
  for (int i = 0; i < 10; ++i) {
    const double w0 = 0.2 + uniform01(rng), w1 = 0.2 + uniform01(rng);
    const double g0 = 0.1 + 0.9 * uniform01(rng), g1 = 0.1 + 0.9 * uniform01(rng);
    const NetworkSpec net({w0, w1}, {g0, g1});
    const double a = net.weight(0) / g0, b = net.weight(1) / g1;
    double grid = 1e300;
    for (double f = kGridStep; f < 1.0; f += kGridStep) grid = std::min(grid, a / f + b / (1.0 - f));
    const auto sol = solve_general(net, ActivationSetFamily::explicit_sets(2, {{0}, {1}}));
    const double d = (sol.peak_age - grid) / grid;
    worst_grid = std::max(worst_grid, std::abs(d));
    if (d > 1e-9 || d < -kKLinkRel) o.passed = false;
  }
  o.detail = "200 instances: worst gap/Omega = " + fmt(worst_gap, 3) + "; " + std::to_string(klink) +
             " K-link: worst rel diff = " + fmt(worst_k, 3) + "; 2-link grid: worst rel diff = " + fmt(worst_grid, 3);
  return o;
}

// --- queues ------------------------------------------------------------------

struct QueuePoint {
  bool periodic = false;
  double mu = 0.0;
  double rho = 0.0;
  int period = 0;
};

Outcome c5_queue_formulas() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<QueuePoint> points;
  // mu = gamma f is split as gamma = sqrt(mu), f = sqrt(mu) so both enter
  for (double mu : {0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (double rho : {0.1, 0.3, 0.5, 0.7}) {
      points.push_back({false, mu, rho, 0});
      int d = static_cast<int>(std::lround(1.0 / (rho * mu)));
      while (d * mu <= 1.0) ++d;
      points.push_back({true, mu, 1.0 / (d * mu), d});
    }
  }
  auto simulate = [](const QueuePoint& p, std::uint64_t seed) {
    const double s = std::sqrt(p.mu);
    const NetworkSpec net({1.0}, {s});
    const auto fam = ActivationSetFamily::k_link(1, 1);
    const auto sched = stationary_scheduler({{{0}}, {s}, {s}});
    RunConfig cfg;
    cfg.horizon = kQueueSlots;
    cfg.seed = seed;
    const auto src = p.periodic ? SourceSpec::periodic(p.period) : SourceSpec::bernoulli(p.rho * p.mu);
    const auto m = run(net, fam, *sched, {src}, cfg);
    const AgePair th = p.periodic ? dber1_age(s, s, p.period) : berber1_age(s, s, p.rho);
    return std::make_pair(m.links[0].peak / th.peak - 1.0, m.links[0].average / th.average - 1.0);
  };
  std::vector<std::future<std::pair<double, double>>> jobs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, simulate, points[i], kSeed + 5 + i));
  }
  Outcome o;
  double worst_ber = 0.0, worst_per = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [dp, da] = jobs[i].get();
    const double w = std::max(std::abs(dp), std::abs(da));
    (points[i].periodic ? worst_per : worst_ber) = std::max(points[i].periodic ? worst_per : worst_ber, w);
    if (w > kQueueRel) o.passed = false;
  }
  const double secs = seconds_since(t0);
  if (secs > kQueueSeconds) o.passed = false;
  o.detail = "20 + 20 points at 1e7 slots: worst rel err Ber/Ber/1 = " + fmt(worst_ber, 3) +
             ", D/Ber/1 = " + fmt(worst_per, 3) + ", " + fmt(secs, 3) + " s";
  return o;
}

Outcome c6_fixed_points() {
  Outcome o;
  double worst_alpha = 0.0, worst_sigma = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double mu = i / 20.0;
    for (int j = 1; j < 20; ++j) {
      const double lambda = mu * j / 20.0;
      const double closed = (mu - lambda) / (1.0 - lambda);
      const double e = std::abs(alpha_star(ArrivalProcess::bernoulli(lambda), mu) - closed);
      worst_alpha = std::max(worst_alpha, e);
      const double period = 1.0 / (mu * j / 20.0);
      const double s = dber1_sigma(mu, period);
      const double res = std::abs(s - 1.0 + std::pow(1.0 - mu * s, period));
      worst_sigma = std::max(worst_sigma, res);
    }
  }
  for (int j = 1; j < 100; ++j) {
    const double rho = j / 100.0;
    const double s = sigma_hat(rho);
    worst_sigma = std::max(worst_sigma, std::abs(s - 1.0 + std::exp(-s / rho)));
  }
  o.passed = worst_alpha <= kAlphaTol && worst_sigma <= kSigmaTol;
  o.detail = "max |alpha* - (mu-lambda)/(1-lambda)| = " + fmt(worst_alpha, 3) + ", max sigma residual = " +
             fmt(worst_sigma, 3);
  return o;
}

struct Target {
  RhoKind kind;
  double value;
  double tol;
};

Outcome check_targets(const std::vector<Target>& targets, const std::function<double(RhoKind)>& get) {
  Outcome o;
  for (const auto& t : targets) {
    const double v = get(t.kind);
    const bool ok = std::abs(v - t.value) <= t.tol;
    o.passed = o.passed && ok;
    o.detail += std::string(o.detail.empty() ? "" : ", ") + to_string(t.kind) + " = " + fmt(v) + " (" +
                fmt(t.value) + " +- " + fmt(t.tol) + (ok ? ")" : ", off)");
  }
  return o;
}

Outcome c7_occupancies() {
  return check_targets({{RhoKind::bernoulli_peak, 0.5, 1e-9},
                        {RhoKind::bernoulli_average, 0.53, 0.01},
                        {RhoKind::periodic_peak, 0.594, 0.005},
                        {RhoKind::periodic_average, 0.515, 0.005}},
                       optimal_rho);
}

Outcome c8_occupancy_gaps() {
  Outcome o;
  const RhoKind kinds[] = {RhoKind::bernoulli_peak, RhoKind::bernoulli_average, RhoKind::periodic_peak,
                           RhoKind::periodic_average};
  for (RhoKind k : kinds) {
    double worst = 0.0;
    for (int i = 1; i <= 99; ++i) worst = std::max(worst, delta_gap(k, i / 100.0));
    double limit = 1.0;
    if (k == RhoKind::periodic_peak) limit = 0.7;
    if (k == RhoKind::periodic_average) limit = 0.6;
    const bool ok = k == RhoKind::bernoulli_peak || k == RhoKind::bernoulli_average ? worst <= limit : worst < limit;
    o.passed = o.passed && ok;
    o.detail += std::string(o.detail.empty() ? "max Delta: " : ", ") + to_string(k) + " = " + fmt(worst, 4) +
                (ok ? "" : " (over " + fmt(limit) + ")");
  }
  return o;
}

Outcome c9_factors() {
  const auto t = factor_bounds();
  return check_targets({{RhoKind::bernoulli_peak, 4.0, 1e-9},
                        {RhoKind::bernoulli_average, 7.0, 0.2},
                        {RhoKind::periodic_peak, 2.15, 0.05},
                        {RhoKind::periodic_average, 4.51, 0.05}},
                       [&](RhoKind k) { return t[k]; });
}

// --- separation policy -------------------------------------------------------

struct OracleInstance {
  std::string name;
  NetworkSpec net;
  ActivationSetFamily family;
};

std::vector<OracleInstance> oracle_instances() {
  std::vector<OracleInstance> out;
  out.push_back({"1 perfect link", NetworkSpec({1.0}, {1.0}), ActivationSetFamily::explicit_sets(1, {{0}})});
  out.push_back({"1 lossy link", NetworkSpec({1.0}, {0.4}), ActivationSetFamily::explicit_sets(1, {{0}})});
  out.push_back({"2 symmetric K=1", NetworkSpec({1.0, 1.0}, {1.0, 1.0}), ActivationSetFamily::k_link(2, 1)});
  out.push_back({"2 asymmetric K=1", NetworkSpec({1.0, 3.0}, {0.9, 0.3}), ActivationSetFamily::k_link(2, 1)});
  out.push_back({"3 links K=1", NetworkSpec({1.0, 2.0, 0.5}, {0.8, 0.5, 0.2}), ActivationSetFamily::k_link(3, 1)});
  out.push_back({"3 links K=2", NetworkSpec({1.0, 2.0, 0.5}, {0.8, 0.5, 0.2}), ActivationSetFamily::k_link(3, 2)});
  out.push_back({"3-edge path", NetworkSpec({1.0, 1.0, 1.0}, {0.9, 0.6, 0.3}),
                 ActivationSetFamily::single_hop({{0, 1}, {1, 2}, {2, 3}})});
  out.push_back({"3 links explicit", NetworkSpec({0.5, 1.0, 1.5}, {0.7, 0.7, 0.4}),
                 ActivationSetFamily::explicit_sets(3, {{0, 1}, {1, 2}, {0}})});
  std::mt19937_64 rng(kSeed + 10);
  for (int i = 0; i < 6; ++i) {
    const std::size_t n = 1 + i % 3;
    std::vector<double> w(n), g(n);
    for (auto& v : w) v = 0.2 + 1.8 * uniform01(rng);
    for (auto& v : g) v = 0.1 + 0.9 * uniform01(rng);
    const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    out.push_back({"random " + std::to_string(n) + " links K=" + std::to_string(k), NetworkSpec(w, g),
                   ActivationSetFamily::k_link(n, k)});
  }
  return out;
}

Outcome c10_additive_gap() {
  Outcome o;
  const auto instances = oracle_instances();
  std::vector<std::future<std::pair<double, std::string>>> jobs;
  for (const auto& inst : instances) {
    for (ArrivalKind a : {ArrivalKind::bernoulli, ArrivalKind::periodic}) {
      for (Metric m : {Metric::peak, Metric::average}) {
        jobs.push_back(std::async(std::launch::async, [&inst, a, m] {
          const auto cfg = build_spp(inst.net, inst.family, a, m);
          const auto r = additive_gap_check(cfg, inst.net, inst.family);
          return std::make_pair(r.gap, inst.name + " / " + to_string(rho_kind(a, m)));
        }));
      }
    }
  }
  double worst = -1e300;
  std::string where;
  for (auto& j : jobs) {
    const auto [gap, name] = j.get();
    if (gap > worst) worst = gap, where = name;
    if (gap > 1.0) o.passed = false;
  }
  o.detail = std::to_string(jobs.size()) + " instance/kind pairs, max SPP - oracle = " + fmt(worst, 4) + " (" + where +
             ")";
  return o;
}

Outcome from_checks(const std::vector<CheckResult>& checks) {
  Outcome o;
  for (const auto& c : checks) {
    o.passed = o.passed && c.passed;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + (c.passed ? "" : "FAILED ") + c.name + ": " + c.detail;
  }
  return o;
}

Outcome c11_theta_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  ThetaSweepSpec spec;  // N = 50, gamma_good = 0.9, K in {1, 10}, 1e6 slots x 10 reps
  spec.seed = kSeed;
  auto o = from_checks(check_fig3_4(experiment_fig3_4(spec)));
  const double secs = seconds_since(t0);
  if (secs > kSweepSeconds) o.passed = false;
  o.detail += "; " + fmt(secs, 4) + " s";
  return o;
}

Outcome c12_buffered() {
  const auto rows = experiment_fig6();
  auto o = from_checks(check_fig6(rows));
  double max_gap = 0.0, lo = 1e300, hi = 0.0;
  for (const auto& r : rows) {
    max_gap = std::max(max_gap, r.gap());
    lo = std::min(lo, r.ratio());
    hi = std::max(hi, r.ratio());
  }
  o.detail = "max gap = " + fmt(max_gap, 4) + ", ratio in [" + fmt(lo, 4) + ", " + fmt(hi, 4) + "]; " + o.detail;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "peak age equals sum w/(gamma f_hat) under any scheduler", c1_frequency_identity},
      {2, "stationary schedulers: average age equals peak age", c2_stationary_equal_ages},
      {3, "peak age <= 2 average age - 1", c3_peak_average_bound},
      {4, "optimality certificate, water-filling and grid agreement", c4_certificate},
      {5, "Ber/Ber/1 and D/Ber/1 formulas against simulation", c5_queue_formulas},
      {6, "fixed points alpha* and sigma*", c6_fixed_points},
      {7, "universal occupancies", c7_occupancies},
      {8, "occupancy gap Delta", c8_occupancy_gaps},
      {9, "multiplicative factors", c9_factors},
      {10, "separation policy within one slot of the joint optimum", c10_additive_gap},
      {11, "theta sweep: optimal lowest, round robin = uniform, monotone", c11_theta_sweep},
      {12, "buffered sources against K", c12_buffered},
  };
  simulate_networks();
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  C" << c.id << "  " << c.name << "  [" << o.detail << "]  ("
              << fmt(seconds_since(t0), 3) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
