#include "freshnet/spp_policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "freshnet/error.hpp"
#include "freshnet/numeric.hpp"

namespace freshnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int stable_period(double rho_bar, double mu) {
  long d = std::lround(1.0 / (rho_bar * mu));
  if (d < 1) d = 1;
  while (static_cast<double>(d) * mu <= 1.0) ++d;
  return static_cast<int>(d);
}

// Buffered Bernoulli age as (1/mu) a(rho) - b(rho); continuous at mu = 1.
double coeff_a(Metric metric, double rho) {
  if (metric == Metric::peak) return 1.0 / rho + 1.0 / (1.0 - rho);
  return 1.0 + 1.0 / rho + rho * rho / (1.0 - rho);
}

double coeff_b(Metric metric, double rho) {
  const double r = rho / (1.0 - rho);
  return metric == Metric::peak ? r : rho * r;
}

double bernoulli_buffered_age(Metric metric, double mu, double rho) {
  return coeff_a(metric, rho) / mu - coeff_b(metric, rho);
}

double best_rho(Metric metric, double mu) {
  return numeric::golden_section([&](double r) { return bernoulli_buffered_age(metric, mu, r); }, 1e-9,
                                 1.0 - 1e-9, 1e-13)
      .x;
}

std::size_t compositions(std::size_t total, std::size_t parts, std::size_t limit) {
  // C(total + parts - 1, parts - 1), saturating above limit
  const std::size_t c = binomial(total + parts - 1, parts - 1);
  return c > limit ? limit + 1 : c;
}

struct GridOptimum {
  double value = kInf;
  FrequencyVector f;
};

// Minimises sum_e w_e best(e, f_e) over f = M x with x on a grid of the
// simplex of maximal sets. Idle mass is never useful because every per-link
// best age decreases in f_e, so only full compositions are enumerated. The
// coarse pass memoises per-link values by integer count; the refinement
// pass walks a finer grid around the incumbent.
GridOptimum grid_optimum(const NetworkSpec& net, const ActivationSetFamily& family,
                         const std::function<double(std::size_t, double)>& link_best,
                         const OracleOptions& options) {
  const std::size_t n = net.size();
  if (n > options.max_links) {
    throw Error(Errc::oracle_budget_exceeded, std::to_string(n) + " links exceed the oracle limit");
  }
  const auto maximal = maximal_sets(family);
  const auto& sets = maximal.listed_sets();
  const std::size_t k = sets.size();
  const std::size_t r = options.resolution;
  if (compositions(r, k, options.max_points) > options.max_points) {
    throw Error(Errc::oracle_budget_exceeded, "frequency grid too large");
  }
  const std::size_t fine = r * options.refine;

  // table[e][c] = w_e * best age at f_e = c / scale
  auto make_table = [&](std::size_t scale) {
    std::vector<std::vector<double>> t(n, std::vector<double>(scale + 1, std::nan("")));
    return t;
  };
  auto lookup = [&](std::vector<std::vector<double>>& t, std::size_t e, std::size_t c, std::size_t scale) {
    double& v = t[e][c];
    if (std::isnan(v)) {
      v = c == 0 ? kInf : net.weight(e) * link_best(e, static_cast<double>(c) / static_cast<double>(scale));
    }
    return v;
  };

  auto coarse = make_table(r);
  std::vector<std::size_t> counts(k, 0);
  std::vector<std::size_t> best_counts;
  double best = kInf;
  std::vector<std::size_t> per_link(n, 0);

  auto evaluate = [&](std::vector<std::vector<double>>& t, std::size_t scale) {
    std::fill(per_link.begin(), per_link.end(), 0);
    for (std::size_t m = 0; m < k; ++m) {
      for (LinkId e : sets[m]) per_link[e] += counts[m];
    }
    double v = 0.0;
    for (std::size_t e = 0; e < n && v < kInf; ++e) v += lookup(t, e, per_link[e], scale);
    return v;
  };

  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t m, std::size_t left) {
    if (m + 1 == k) {
      counts[m] = left;
      const double v = evaluate(coarse, r);
      if (v < best) {
        best = v;
        best_counts = counts;
      }
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[m] = c;
      walk(m + 1, left - c);
    }
  };
  walk(0, r);
  if (best_counts.empty()) throw Error(Errc::uncovered_link, "no grid point serves every link");

  if (options.refine > 1) {
    auto table = make_table(fine);
    const auto centre = best_counts;
    const long span = static_cast<long>(options.refine);
    std::function<void(std::size_t, long)> local = [&](std::size_t m, long used) {
      if (m + 1 == k) {
        const long last = static_cast<long>(fine) - used;
        if (last < 0) return;
        if (std::abs(last - static_cast<long>(centre[m] * options.refine)) > span) return;
        counts[m] = static_cast<std::size_t>(last);
        const double v = evaluate(table, fine);
        if (v < best) {
          best = v;
          best_counts = counts;
        }
        return;
      }
      const long c0 = static_cast<long>(centre[m] * options.refine);
      for (long c = std::max(0L, c0 - span); c <= c0 + span; ++c) {
        counts[m] = static_cast<std::size_t>(c);
        local(m + 1, used + c);
      }
    };
    const double coarse_best = best;
    local(0, 0);
    if (best < coarse_best) {
      GridOptimum g{best, FrequencyVector(n, 0.0)};
      for (std::size_t m = 0; m < k; ++m) {
        for (LinkId e : sets[m]) g.f[e] += static_cast<double>(best_counts[m]) / static_cast<double>(fine);
      }
      return g;
    }
    best_counts = centre;
  }
  GridOptimum g{best, FrequencyVector(n, 0.0)};
  for (std::size_t m = 0; m < k; ++m) {
    for (LinkId e : sets[m]) g.f[e] += static_cast<double>(best_counts[m]) / static_cast<double>(r);
  }
  return g;
}

}  // namespace

SppConfig build_spp(const NetworkSpec& net, SchedulePolicy schedule, ArrivalKind arrivals, Metric metric) {
  const std::size_t n = net.size();
  refresh_frequencies(schedule, n);
  SppConfig cfg;
  cfg.arrival_kind = arrivals;
  cfg.metric = metric;
  cfg.rho_bar = optimal_rho(rho_kind(arrivals, metric));
  cfg.mu.resize(n);
  cfg.rates.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    if (!(schedule.f[e] > 0.0)) {
      throw Error(Errc::unbounded_age, "link " + std::to_string(e) + " is never scheduled");
    }
    cfg.mu[e] = std::min(1.0, net.gamma(e) * schedule.f[e]);
    if (arrivals == ArrivalKind::bernoulli) {
      cfg.rates[e] = cfg.rho_bar * cfg.mu[e];
    } else {
      cfg.periods.push_back(stable_period(cfg.rho_bar, cfg.mu[e]));
      cfg.rates[e] = 1.0 / cfg.periods.back();
    }
  }
  cfg.schedule = std::move(schedule);
  return cfg;
}

SppConfig build_spp(const NetworkSpec& net, const ActivationSetFamily& family, ArrivalKind arrivals,
                    Metric metric, const SolveOptions& options) {
  if (family.kind() == FamilyKind::k_link) {
    const auto sol = solve_klink(net, family.max_active());
    return build_spp(net, klink_policy(sol.f), arrivals, metric);
  }
  return build_spp(net, solve_general(net, family, options).policy, arrivals, metric);
}

std::vector<double> spp_link_ages(const SppConfig& cfg) {
  std::vector<double> ages(cfg.mu.size());
  for (std::size_t e = 0; e < ages.size(); ++e) {
    const AgePair a = cfg.arrival_kind == ArrivalKind::bernoulli ? berber1_age(cfg.mu[e], 1.0, cfg.rho_bar)
                                                                  : dber1_age(cfg.mu[e], 1.0, cfg.periods[e]);
    ages[e] = cfg.metric == Metric::peak ? a.peak : a.average;
  }
  return ages;
}

double spp_analytic_age(const SppConfig& cfg, const NetworkSpec& net) {
  const auto ages = spp_link_ages(cfg);
  double total = 0.0;
  for (std::size_t e = 0; e < ages.size(); ++e) total += net.weight(e) * ages[e];
  return total;
}

double oracle_link_age(RhoKind kind, double mu, const OracleOptions& options) {
  if (!(mu > 0.0)) return kInf;
  mu = std::min(mu, 1.0);
  const bool peak = kind == RhoKind::bernoulli_peak || kind == RhoKind::periodic_peak;
  if (kind == RhoKind::periodic_peak || kind == RhoKind::periodic_average) {
    double best = kInf;
    const int first = static_cast<int>(std::floor(1.0 / mu)) + 1;
    for (int d = first; 1.0 / (d * mu) >= 0.01; ++d) {
      const AgePair a = dber1_age(mu, 1.0, d);
      best = std::min(best, peak ? a.peak : a.average);
    }
    return best;
  }
  const Metric metric = peak ? Metric::peak : Metric::average;
  const double r = static_cast<double>(options.resolution);
  std::size_t arg = 0;
  double best = kInf;
  for (std::size_t i = 0; i < options.resolution; ++i) {
    const double v = bernoulli_buffered_age(metric, mu, (static_cast<double>(i) + 0.5) / r);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  const double centre = (static_cast<double>(arg) + 0.5) / r;
  const double step = 1.0 / (r * static_cast<double>(std::max<std::size_t>(options.refine, 1)));
  const long span = static_cast<long>(options.refine);
  for (long j = -span; j <= span; ++j) {
    const double rho = centre + static_cast<double>(j) * step;
    if (rho <= 0.0 || rho >= 1.0) continue;
    best = std::min(best, bernoulli_buffered_age(metric, mu, rho));
  }
  return best;
}

GapReport additive_gap_check(const SppConfig& cfg, const NetworkSpec& net, const ActivationSetFamily& family,
                             const OracleOptions& options) {
  const RhoKind kind = rho_kind(cfg.arrival_kind, cfg.metric);
  // per-link values depend only on gamma_e * f_e; memoise by service rate
  std::vector<std::pair<double, double>> memo;
  auto link_best = [&](std::size_t e, double f) {
    const double mu = net.gamma(e) * f;
    for (const auto& [m, v] : memo) {
      if (m == mu) return v;
    }
    const double v = oracle_link_age(kind, mu, options);
    memo.emplace_back(mu, v);
    return v;
  };
  const auto grid = grid_optimum(net, family, link_best, options);
  GapReport report;
  report.spp_value = spp_analytic_age(cfg, net);
  report.oracle_optimum = grid.value;
  report.oracle_f = grid.f;
  report.gap = report.spp_value - report.oracle_optimum;
  return report;
}

FactorReport multiplicative_bound_report(const SppConfig& cfg, const NetworkSpec& net) {
  FactorReport r;
  r.factor = factor_bounds()[rho_kind(cfg.arrival_kind, cfg.metric)];
  r.spp_value = spp_analytic_age(cfg, net);
  r.implied_lower_bound = r.spp_value / r.factor;
  return r;
}

nlohmann::json to_json(const SppConfig& cfg, const NetworkSpec& net, const std::optional<GapReport>& gap) {
  const auto factor = multiplicative_bound_report(cfg, net);
  nlohmann::json j;
  j["metric"] = cfg.metric == Metric::peak ? "peak" : "ave";
  j["arrivals"] = cfg.arrival_kind == ArrivalKind::bernoulli ? "bernoulli" : "periodic";
  j["rho_bar"] = cfg.rho_bar;
  j["frequencies"] = cfg.schedule.f;
  j["rates"] = cfg.rates;
  if (!cfg.periods.empty()) j["periods"] = cfg.periods;
  j["analytic_age"] = factor.spp_value;
  j["factor"] = factor.factor;
  j["implied_lower_bound"] = factor.implied_lower_bound;
  if (gap) {
    j["oracle_optimum"] = gap->oracle_optimum;
    j["additive_gap"] = gap->gap;
  }
  return j;
}

BufferedOptimum buffered_optimum(const NetworkSpec& net, const ActivationSetFamily& family, Metric metric,
                                 double tol, std::size_t max_rounds) {
  const std::size_t n = net.size();
  BufferedOptimum best;
  best.rho.assign(n, optimal_rho(rho_kind(ArrivalKind::bernoulli, metric)));

  auto frequency_step = [&](const std::vector<double>& rho) {
    std::vector<double> coeff(n);
    for (std::size_t e = 0; e < n; ++e) coeff[e] = net.weight(e) * coeff_a(metric, rho[e]) / net.gamma(e);
    if (family.kind() == FamilyKind::k_link) return water_fill(coeff, family.max_active());
    const NetworkSpec scaled(coeff, std::vector<double>(n, 1.0));
    return solve_general(scaled, family).policy.f;
  };
  auto objective = [&](const FrequencyVector& f, const std::vector<double>& rho) {
    double s = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      s += net.weight(e) * bernoulli_buffered_age(metric, std::min(1.0, net.gamma(e) * f[e]), rho[e]);
    }
    return s;
  };

  double previous = kInf;
  for (best.rounds = 0; best.rounds < max_rounds; ++best.rounds) {
    best.f = frequency_step(best.rho);
    for (std::size_t e = 0; e < n; ++e) best.rho[e] = best_rho(metric, std::min(1.0, net.gamma(e) * best.f[e]));
    best.age = objective(best.f, best.rho);
    if (previous - best.age <= tol * best.age) break;
    previous = best.age;
  }

  if (n <= 3) {
    OracleOptions opts;
    auto link_best = [&](std::size_t e, double f) {
      const double mu = std::min(1.0, net.gamma(e) * f);
      return bernoulli_buffered_age(metric, mu, best_rho(metric, mu));
    };
    const auto grid = grid_optimum(net, family, link_best, opts);
    if (grid.value < best.age) {
      best.age = grid.value;
      best.f = grid.f;
      for (std::size_t e = 0; e < n; ++e) best.rho[e] = best_rho(metric, std::min(1.0, net.gamma(e) * grid.f[e]));
    }
  }
  return best;
}

}  // namespace freshnet
