#include "freshnet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "freshnet/age_optimizer.hpp"
#include "freshnet/experiments.hpp"
#include "freshnet/feasibility.hpp"
#include "freshnet/queue_calculus.hpp"
#include "freshnet/slot_simulator.hpp"
#include "freshnet/spp_policy.hpp"

namespace freshnet {

namespace {

double draw(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

}  // namespace

NetworkFile random_network(std::mt19937_64& rng, std::size_t max_links) {
  const std::size_t n = 2 + draw_index(rng, max_links - 1);
  std::vector<double> w(n), g(n);
  for (auto& v : w) v = draw(rng, 0.2, 2.0);
  for (auto& v : g) v = draw(rng, 0.1, 1.0);
  NetworkSpec net(w, g);
  switch (draw_index(rng, 3)) {
    case 0:
      return {net, ActivationSetFamily::k_link(n, 1 + draw_index(rng, n))};
    case 1: {
      std::vector<ActivationSet> sets;
      const std::size_t count = 2 + draw_index(rng, 5);
      std::vector<char> covered(n, 0);
      for (std::size_t i = 0; i < count; ++i) {
        ActivationSet m;
        for (std::size_t e = 0; e < n; ++e) {
          if (uniform01(rng) < 0.4) m.push_back(e);
        }
        if (m.empty()) m.push_back(draw_index(rng, n));
        for (LinkId e : m) covered[e] = 1;
        sets.push_back(std::move(m));
      }
      for (std::size_t e = 0; e < n; ++e) {
        if (!covered[e]) sets.push_back({e});
      }
      return {net, ActivationSetFamily::explicit_sets(n, std::move(sets))};
    }
    default: {
      const std::size_t nodes = 3 + draw_index(rng, n);
      std::vector<GraphEdge> edges;
      for (std::size_t e = 0; e < n; ++e) {
        const std::size_t u = draw_index(rng, nodes);
        std::size_t v = draw_index(rng, nodes - 1);
        if (v >= u) ++v;
        edges.push_back({u, v});
      }
      return {net, ActivationSetFamily::single_hop(std::move(edges))};
    }
  }
}

namespace {

using CheckFn = std::function<std::string(bool&)>;

CheckResult run_check(const std::string& name, const CheckFn& fn) {
  CheckResult r{name, false, ""};
  try {
    bool ok = true;
    r.detail = fn(ok);
    r.passed = ok;
  } catch (const std::exception& ex) {
    r.detail = std::string("exception: ") + ex.what();
  }
  return r;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

struct SimCase {
  std::string scheduler;
  ReplicatedMetrics metrics;
};

std::vector<SimCase> simulate_random(std::uint64_t seed) {
  std::mt19937_64 rng = make_stream(seed, StreamPurpose::scheduler, 99);
  const char* kinds[] = {"stationary", "distributed", "round-robin", "uniform"};
  std::vector<SimCase> out;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto nf = random_network(rng, 6);
    const auto opt = solve_general(nf.net, nf.family).policy;
    std::string spec = kinds[i % 4];
    if (spec == "distributed") spec += ":" + fmt(draw(rng, 0.2, 0.6));
    const auto sched = make_scheduler(spec, nf.net, nf.family, opt);
    const std::vector<SourceSpec> sources(nf.net.size(), SourceSpec::active());
    out.push_back({spec, replicate(nf.net, nf.family, *sched, sources, {200'000, -1, 0}, 8, seed + 100 * i)});
  }
  return out;
}

}  // namespace

std::vector<CheckResult> verify_all(std::uint64_t seed) {
  std::vector<CheckResult> results;
  const auto sims = simulate_random(seed);

  results.push_back(run_check("peak age equals sum w/(gamma f_hat) for any policy", [&](bool& ok) {
    double worst = 0.0;
    for (const auto& s : sims) {
      const double diff = std::abs(s.metrics.weighted_peak.mean - s.metrics.frequency_peak.mean);
      const double allowed = 2.0 * s.metrics.weighted_peak.half_width;
      worst = std::max(worst, diff / allowed);
      if (diff > allowed) ok = false;
    }
    return "worst |diff| / 2hw = " + fmt(worst);
  }));

  results.push_back(run_check("stationary policies: average age equals peak age", [&](bool& ok) {
    double worst = 0.0;
    for (const auto& s : sims) {
      if (s.scheduler.rfind("round-robin", 0) == 0) continue;
      const auto& m = s.metrics;
      const double diff = std::abs(m.weighted_average.mean - m.weighted_peak.mean);
      const double allowed = m.weighted_average.half_width + m.weighted_peak.half_width;
      worst = std::max(worst, diff / allowed);
      if (diff > allowed) ok = false;
    }
    return "worst |ave - peak| / CI = " + fmt(worst);
  }));

  results.push_back(run_check("peak <= 2 average - 1 for every policy", [&](bool& ok) {
    double worst = -1e300;
    for (const auto& s : sims) {
      const auto& m = s.metrics;
      const double slack = 2.0 * m.weighted_average.half_width + m.weighted_peak.half_width;
      const double excess = m.weighted_peak.mean - (2.0 * m.weighted_average.mean - 1.0);
      worst = std::max(worst, excess);
      if (excess > slack) ok = false;
    }
    return "max peak - (2 ave - 1) = " + fmt(worst);
  }));

  results.push_back(run_check("optimality certificate on random instances", [&](bool& ok) {
    std::mt19937_64 rng = make_stream(seed, StreamPurpose::scheduler, 7);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto nf = random_network(rng, 8);
      const auto sol = solve_general(nf.net, nf.family);
      const double rel = sol.certificate.gap / sol.certificate.omega;
      worst = std::max(worst, rel);
      if (sol.status != SolveStatus::converged || !sol.certificate.optimal() || rel > 1e-8) ok = false;
    }
    return "worst gap / Omega = " + fmt(worst);
  }));

  results.push_back(run_check("negative control: perturbed policy fails the certificate", [&](bool& ok) {
    const NetworkSpec net({1.0, 2.0, 3.0}, {0.9, 0.5, 0.3});
    const auto family = ActivationSetFamily::k_link(3, 1);
    auto policy = solve_general(net, family).policy;
    policy.x[0] += 0.05;
    policy.x[1] -= 0.05;
    const auto cert = certify(policy, net, family);
    ok = !cert.optimal();
    return "perturbed gap = " + fmt(cert.gap);
  }));

  results.push_back(run_check("general solver agrees with water-filling on K-link families", [&](bool& ok) {
    std::mt19937_64 rng = make_stream(seed, StreamPurpose::scheduler, 8);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const std::size_t n = 2 + draw_index(rng, 7);
      std::vector<double> w(n), g(n);
      for (auto& v : w) v = draw(rng, 0.2, 2.0);
      for (auto& v : g) v = draw(rng, 0.1, 1.0);
      const NetworkSpec net(w, g);
      const std::size_t k = 1 + draw_index(rng, n);
      const double a = solve_general(net, ActivationSetFamily::k_link(n, k)).peak_age;
      const double b = solve_klink(net, k).peak_age;
      worst = std::max(worst, std::abs(a - b) / b);
    }
    ok = worst <= 1e-6;
    return "worst relative difference = " + fmt(worst);
  }));

  results.push_back(run_check("achievable-frequency LP", [&](bool& ok) {
    const auto family = ActivationSetFamily::k_link(3, 1);
    const FrequencyVector inside{0.3, 0.3, 0.3};
    const FrequencyVector outside{0.5, 0.5, 0.2};
    const auto a = check_feasible(inside, family);
    const auto b = check_feasible(outside, family);
    double dot = 0.0;
    for (std::size_t e = 0; e < 3; ++e) dot += b.normal.empty() ? 0.0 : b.normal[e] * outside[e];
    ok = a.feasible && !b.feasible && dot > b.bound;
    return "separation margin = " + fmt(dot - b.bound);
  }));

  results.push_back(run_check("G/Ber/1 fixed point equals (mu - lambda)/(1 - lambda)", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
      for (int j = 1; j < i; ++j) {
        const double mu = 0.1 * i, lambda = 0.1 * j;
        const double a = alpha_star(ArrivalProcess::bernoulli(lambda), mu);
        worst = std::max(worst, std::abs(a - (mu - lambda) / (1.0 - lambda)));
      }
    }
    ok = worst <= 1e-9;
    return "worst error = " + fmt(worst);
  }));

  results.push_back(run_check("Ber/Ber/1 closed form equals the G/Ber/1 route", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
      for (int j = 1; j <= 9; ++j) {
        const double mu = 0.1 * i, rho = 0.1 * j;
        const AgePair a = berber1_age(mu, 1.0, rho);
        const AgePair b = gber1_age(ArrivalProcess::bernoulli(rho * mu), mu);
        worst = std::max({worst, std::abs(a.peak - b.peak) / a.peak, std::abs(a.average - b.average) / a.average});
      }
    }
    ok = worst <= 1e-9;
    return "worst relative difference = " + fmt(worst);
  }));

  results.push_back(run_check("D/Ber/1 fixed point residual", [&](bool& ok) {
    double worst = 0.0;
    for (int d = 2; d <= 20; ++d) {
      for (int i = 1; i <= 10; ++i) {
        const double mu = 0.1 * i;
        if (d * mu <= 1.0) continue;
        const double s = dber1_sigma(mu, d);
        worst = std::max(worst, std::abs(s - 1.0 + std::pow(1.0 - mu * s, d)));
      }
    }
    ok = worst <= 1e-10;
    return "worst residual = " + fmt(worst);
  }));

  results.push_back(run_check("continuous-time bounds dominate discrete ages", [&](bool& ok) {
    int violations = 0;
    for (int i = 1; i <= 10; ++i) {
      for (int j = 1; j <= 19; ++j) {
        const double mu = 0.1 * i, rho = 0.05 * j;
        const auto b = berber1_age(mu, 1.0, rho), m = mm1_bound(mu, rho);
        const auto d = dber1_age_at_rho(mu, rho), dm = dm1_bound(mu, rho);
        const double eps = 1e-9 * m.peak;
        if (b.peak > m.peak + eps || b.average > m.average + eps || d.peak > dm.peak + eps ||
            d.average > dm.average + eps) {
          ++violations;
        }
        if (b.peak > 2.0 * b.average - 1.0 + eps || d.peak > 2.0 * d.average - 1.0 + eps) ++violations;
      }
    }
    ok = violations == 0;
    return std::to_string(violations) + " violations";
  }));

  results.push_back(run_check("universal occupancies", [&](bool& ok) {
    const double v[4] = {optimal_rho(RhoKind::bernoulli_peak), optimal_rho(RhoKind::bernoulli_average),
                         optimal_rho(RhoKind::periodic_peak), optimal_rho(RhoKind::periodic_average)};
    ok = v[0] == 0.5 && std::abs(v[1] - 0.53) <= 0.01 && std::abs(v[2] - 0.594) <= 0.005 &&
         std::abs(v[3] - 0.515) <= 0.005;
    return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]) + " " + fmt(v[3]);
  }));

  results.push_back(run_check("occupancy gap within one slot", [&](bool& ok) {
    double worst[4] = {0, 0, 0, 0};
    for (int k = 0; k < 4; ++k) {
      for (int i = 1; i <= 99; ++i) worst[k] = std::max(worst[k], delta_gap(static_cast<RhoKind>(k), 0.01 * i));
    }
    ok = worst[0] <= 1.0 && worst[1] <= 1.0 && worst[2] < 0.7 && worst[3] < 0.6;
    return fmt(worst[0]) + " " + fmt(worst[1]) + " " + fmt(worst[2]) + " " + fmt(worst[3]);
  }));

  results.push_back(run_check("optimality factors 4, 7, 2.15, 4.51", [&](bool& ok) {
    const auto t = factor_bounds();
    ok = t.bernoulli_peak == 4.0 && std::abs(t.bernoulli_average - 7.0) <= 0.2 &&
         std::abs(t.periodic_peak - 2.15) <= 0.05 && std::abs(t.periodic_average - 4.51) <= 0.05;
    return fmt(t.bernoulli_peak) + " " + fmt(t.bernoulli_average) + " " + fmt(t.periodic_peak) + " " +
           fmt(t.periodic_average);
  }));

  results.push_back(run_check("separation policy within one slot of the joint optimum", [&](bool& ok) {
    const NetworkSpec net({1.0, 2.0}, {0.9, 0.4});
    const auto family = ActivationSetFamily::k_link(2, 1);
    double worst = -1e300;
    for (auto a : {ArrivalKind::bernoulli, ArrivalKind::periodic}) {
      for (auto m : {Metric::peak, Metric::average}) {
        const auto cfg = build_spp(net, family, a, m);
        const auto report = additive_gap_check(cfg, net, family);
        worst = std::max(worst, report.gap);
        if (!report.within_one()) ok = false;
      }
    }
    return "worst gap = " + fmt(worst);
  }));

  results.push_back(run_check("buffered optimum is about four times the active optimum", [&](bool& ok) {
    const auto rows = experiment_fig6(buffered_cases(), 1, 10);
    double lo = 1e300, hi = 0.0, gap = 0.0;
    for (const auto& r : rows) {
      lo = std::min(lo, r.ratio());
      hi = std::max(hi, r.ratio());
      gap = std::max(gap, r.gap());
    }
    ok = lo >= 3.0 && hi <= 5.0 && gap <= 1.0;
    return "ratio in [" + fmt(lo) + ", " + fmt(hi) + "], max gap " + fmt(gap);
  }));

  return results;
}

void print_matrix(std::ostream& out, const std::vector<CheckResult>& results) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name << "  "
        << r.detail << '\n';
  }
  const auto passed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
  out << passed << '/' << results.size() << " checks passed\n";
}

}  // namespace freshnet
