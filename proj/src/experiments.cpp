#include "freshnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "freshnet/age_optimizer.hpp"
#include "freshnet/error.hpp"
#include "freshnet/network_io.hpp"
#include "freshnet/numeric.hpp"
#include "freshnet/spp_policy.hpp"

namespace freshnet {

std::vector<QueueCurveRow> experiment_fig2(double mu, std::vector<double> rhos) {
  if (rhos.empty()) {
    for (int i = 1; i <= 19; ++i) rhos.push_back(0.05 * i);
  }
  std::vector<QueueCurveRow> rows;
  for (double rho : rhos) {
    rows.push_back({rho, berber1_age(mu, 1.0, rho), mm1_bound(mu, rho), dber1_age_at_rho(mu, rho),
                    dm1_bound(mu, rho)});
  }
  return rows;
}

void write_csv(std::ostream& out, double mu, const std::vector<QueueCurveRow>& rows) {
  out << "mu,rho,berber_peak,berber_ave,mm1_peak,mm1_ave,dber_peak,dber_ave,dm1_peak,dm1_ave\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << mu << ',' << r.rho << ',' << r.berber.peak << ',' << r.berber.average << ',' << r.mm1.peak << ','
        << r.mm1.average << ',' << r.dber.peak << ',' << r.dber.average << ',' << r.dm1.peak << ','
        << r.dm1.average << '\n';
  }
}

namespace {

double min_over_rho(RhoKind kind, double mu) {
  return numeric::scan_then_golden([&](double r) { return queue_age(kind, mu, r); }, 1e-4, 1.0 - 1e-4, 400,
                                   1e-12)
      .value;
}

QueueTableRow table_row(ArrivalKind arrivals, const std::string& axis, double mu, double x, double rho_peak,
                        double rho_ave) {
  const bool bern = arrivals == ArrivalKind::bernoulli;
  const RhoKind kp = rho_kind(arrivals, Metric::peak);
  const RhoKind ka = rho_kind(arrivals, Metric::average);
  QueueTableRow row;
  row.kind = bern ? "bernoulli" : "periodic";
  row.axis = axis;
  row.mu = mu;
  row.x = x;
  row.peak_dt = queue_age(kp, mu, rho_peak);
  row.ave_dt = queue_age(ka, mu, rho_ave);
  row.peak_ct_bound = (bern ? mm1_bound(mu, rho_peak) : dm1_bound(mu, rho_peak)).peak;
  row.ave_ct_bound = (bern ? mm1_bound(mu, rho_ave) : dm1_bound(mu, rho_ave)).average;
  row.delta_peak = row.peak_dt - min_over_rho(kp, mu);
  row.delta_ave = row.ave_dt - min_over_rho(ka, mu);
  return row;
}

}  // namespace

std::vector<QueueTableRow> queue_table(const std::string& axis, double mu) {
  std::vector<QueueTableRow> rows;
  for (ArrivalKind arrivals : {ArrivalKind::bernoulli, ArrivalKind::periodic}) {
    if (axis == "rho") {
      for (int i = 1; i <= 19; ++i) {
        const double rho = 0.05 * i;
        rows.push_back(table_row(arrivals, axis, mu, rho, rho, rho));
      }
    } else if (axis == "mu") {
      const double rp = optimal_rho(rho_kind(arrivals, Metric::peak));
      const double ra = optimal_rho(rho_kind(arrivals, Metric::average));
      for (int i = 1; i <= 99; ++i) {
        const double m = 0.01 * i;
        rows.push_back(table_row(arrivals, axis, m, m, rp, ra));
      }
    } else {
      throw Error(Errc::invalid_argument, "axis must be rho or mu");
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<QueueTableRow>& rows) {
  out << "kind,axis,mu,x,peak_dt,ave_dt,peak_ct_bound,ave_ct_bound,delta_peak,delta_ave\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.kind << ',' << r.axis << ',' << r.mu << ',' << r.x << ',' << r.peak_dt << ',' << r.ave_dt << ','
        << r.peak_ct_bound << ',' << r.ave_ct_bound << ',' << r.delta_peak << ',' << r.delta_ave << '\n';
  }
}

ThetaSweepSpec ThetaSweepSpec::from_json(const nlohmann::json& j) {
  ThetaSweepSpec s;
  try {
    s.links = j.value("N", s.links);
    if (j.contains("K")) {
      s.max_active = j["K"].is_array() ? j["K"].get<std::vector<std::size_t>>()
                                       : std::vector<std::size_t>{j["K"].get<std::size_t>()};
    }
    s.gamma_good = j.value("gamma_good", s.gamma_good);
    if (j.contains("gamma_bad")) {
      s.gamma_bad = j["gamma_bad"].is_array() ? j["gamma_bad"].get<std::vector<double>>()
                                              : std::vector<double>{j["gamma_bad"].get<double>()};
    }
    s.thetas = j.value("theta", s.thetas);
    s.horizon = j.value("horizon", s.horizon);
    s.warmup = j.value("warmup", s.warmup);
    s.reps = j.value("reps", s.reps);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::parse_error, ex.what());
  }
  for (double t : s.thetas) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::parse_error, "theta must be in [0, 1]");
  }
  return s;
}

std::vector<ThetaSweepRow> experiment_fig3_4(const ThetaSweepSpec& spec) {
  std::vector<ThetaSweepRow> rows;
  const std::vector<SourceSpec> sources(spec.links, SourceSpec::active());
  const RunConfig config{spec.horizon, spec.warmup, spec.seed};
  for (std::size_t k : spec.max_active) {
    const auto family = ActivationSetFamily::k_link(spec.links, k);
    for (double bad : spec.gamma_bad) {
      for (double theta : spec.thetas) {
        const auto n_bad = static_cast<std::size_t>(std::lround(theta * static_cast<double>(spec.links)));
        const NetworkSpec net(std::vector<double>(spec.links, 1.0),
                              good_bad_channels(spec.links, spec.gamma_good, bad, n_bad));
        const auto sol = solve_klink(net, k);
        const std::size_t period = (spec.links + k - 1) / k;
        const double uniform_f = std::min(1.0, static_cast<double>(k) / static_cast<double>(spec.links));
        const struct {
          const char* name;
          SchedulerPtr scheduler;
          double analytic;
        } policies[] = {
            {"optimal", stationary_scheduler(klink_policy(sol.f)), sol.peak_age},
            {"uniform", uniform_scheduler(family), peak_age_of(FrequencyVector(spec.links, uniform_f), net)},
            {"round-robin", round_robin_klink(net, k),
             peak_age_of(FrequencyVector(spec.links, 1.0 / static_cast<double>(period)), net)},
        };
        for (const auto& p : policies) {
          const auto m = replicate(net, family, *p.scheduler, sources, config, spec.reps, spec.seed);
          rows.push_back({k, bad, theta, p.name, m.weighted_peak, m.weighted_average, p.analytic});
        }
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ThetaSweepRow>& rows) {
  out << "K,gamma_bad,theta,policy,peak,peak_hw,ave,ave_hw,analytic_peak\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.max_active << ',' << r.gamma_bad << ',' << r.theta << ',' << r.policy << ',' << r.peak.mean << ','
        << r.peak.half_width << ',' << r.average.mean << ',' << r.average.half_width << ',' << r.analytic_peak
        << '\n';
  }
}

std::vector<BufferedCase> buffered_cases() {
  return {
      {"case1", 50, good_bad_channels(50, 0.9, 0.1, 7)},
      {"case2", 10, good_bad_channels(10, 0.9, 0.1, 7)},
      {"case3", 50, std::vector<double>(50, 1.0)},
  };
}

std::vector<BufferedRow> experiment_fig6(const std::vector<BufferedCase>& cases, std::size_t k_min,
                                         std::size_t k_max) {
  std::vector<BufferedRow> rows;
  for (const auto& c : cases) {
    const NetworkSpec net(std::vector<double>(c.links, 1.0), c.gamma);
    for (std::size_t k = k_min; k <= std::min(k_max, c.links); ++k) {
      const auto family = ActivationSetFamily::k_link(c.links, k);
      const auto active = solve_klink(net, k);
      const auto spp = build_spp(net, klink_policy(active.f), ArrivalKind::bernoulli, Metric::peak);
      const auto opt = buffered_optimum(net, family, Metric::peak);
      rows.push_back({c.name, c.links, k, spp_analytic_age(spp, net), opt.age, active.peak_age});
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BufferedRow>& rows) {
  out << "case,N,K,spp_peak,buffered_optimum,active_optimum,gap,ratio\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.case_name << ',' << r.links << ',' << r.max_active << ',' << r.spp_peak << ',' << r.buffered_optimum
        << ',' << r.active_optimum << ',' << r.gap() << ',' << r.ratio() << '\n';
  }
}

}  // namespace freshnet

namespace freshnet {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::vector<CheckResult> check_fig2(const std::vector<QueueCurveRow>& rows) {
  CheckResult below{"discrete ages below continuous-time bounds", true, ""};
  CheckResult growing{"bernoulli bound gap grows with occupancy", true, ""};
  double previous = -1.0;
  for (const auto& r : rows) {
    if (!(r.berber.peak < r.mm1.peak && r.berber.average < r.mm1.average)) below.passed = false;
    if (r.dber.peak > r.dm1.peak * (1.0 + 1e-12) || r.dber.average > r.dm1.average * (1.0 + 1e-12)) {
      below.passed = false;
    }
    const double gap = r.mm1.peak - r.berber.peak;
    if (gap <= previous) growing.passed = false;
    previous = gap;
  }
  growing.detail = "final peak gap " + num(previous);
  return {below, growing};
}

std::vector<CheckResult> check_fig3_4(const std::vector<ThetaSweepRow>& rows) {
  CheckResult minimum{"optimal policy has the lowest peak age", true, ""};
  CheckResult equal{"round robin and uniform have equal peak age", true, ""};
  CheckResult monotone{"ages non-decreasing in theta", true, ""};
  auto find = [&](std::size_t k, double bad, double theta, const std::string& policy) -> const ThetaSweepRow* {
    for (const auto& r : rows) {
      if (r.max_active == k && r.gamma_bad == bad && r.theta == theta && r.policy == policy) return &r;
    }
    return nullptr;
  };
  double worst_min = -1e300, worst_eq = 0.0, worst_mono = -1e300;
  for (const auto& r : rows) {
    if (r.policy != "optimal") continue;
    const auto* uni = find(r.max_active, r.gamma_bad, r.theta, "uniform");
    const auto* rr = find(r.max_active, r.gamma_bad, r.theta, "round-robin");
    if (!uni || !rr) continue;
    for (const auto* other : {uni, rr}) {
      const double excess = r.peak.mean - other->peak.mean - (r.peak.half_width + other->peak.half_width);
      worst_min = std::max(worst_min, excess);
      if (excess > 0.0) minimum.passed = false;
    }
    const double ratio = std::abs(rr->peak.mean - uni->peak.mean) / (rr->peak.half_width + uni->peak.half_width);
    worst_eq = std::max(worst_eq, ratio);
    if (ratio > 1.0) equal.passed = false;
  }
  for (const auto& r : rows) {
    const ThetaSweepRow* next = nullptr;
    for (const auto& s : rows) {
      if (s.max_active == r.max_active && s.gamma_bad == r.gamma_bad && s.policy == r.policy && s.theta > r.theta &&
          (!next || s.theta < next->theta)) {
        next = &s;
      }
    }
    if (!next) continue;
    const double drop_p = r.peak.mean - next->peak.mean - (r.peak.half_width + next->peak.half_width);
    const double drop_a =
        r.average.mean - next->average.mean - (r.average.half_width + next->average.half_width);
    worst_mono = std::max({worst_mono, drop_p, drop_a});
    if (drop_p > 0.0 || drop_a > 0.0) monotone.passed = false;
  }
  minimum.detail = "worst excess over others " + num(worst_min);
  equal.detail = "worst |rr - uniform| / CI " + num(worst_eq);
  monotone.detail = "worst decrease beyond CI " + num(worst_mono);
  return {minimum, equal, monotone};
}

std::vector<CheckResult> check_fig6(const std::vector<BufferedRow>& rows) {
  CheckResult within{"separation policy within one slot of the buffered optimum", true, ""};
  CheckResult ratio{"buffered optimum between 3 and 5 times the active optimum", true, ""};
  CheckResult shrink{"gap shrinks as K decreases", true, ""};
  double max_gap = 0.0, lo = 1e300, hi = 0.0, worst_drop = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    max_gap = std::max(max_gap, r.gap());
    if (r.gap() > 1.0) within.passed = false;
    lo = std::min(lo, r.ratio());
    hi = std::max(hi, r.ratio());
    if (r.ratio() < 3.0 || r.ratio() > 5.0) ratio.passed = false;
    if (i > 0 && rows[i - 1].case_name == r.case_name) {
      const double drop = rows[i - 1].gap() - r.gap();
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-9) shrink.passed = false;
    }
  }
  shrink.detail = "largest decrease with growing K " + num(worst_drop);
  within.detail = "max gap " + num(max_gap);
  ratio.detail = "ratio range [" + num(lo) + ", " + num(hi) + "]";
  return {within, ratio, shrink};
}

}  // namespace freshnet
