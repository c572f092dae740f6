// freshnet: scheduling and rate control for information freshness.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "freshnet/age_optimizer.hpp"
#include "freshnet/error.hpp"
#include "freshnet/experiments.hpp"
#include "freshnet/network_io.hpp"
#include "freshnet/queue_calculus.hpp"
#include "freshnet/slot_simulator.hpp"
#include "freshnet/spp_policy.hpp"
#include "freshnet/verify.hpp"

using namespace freshnet;
using nlohmann::json;

namespace {

// Writes to the named file, or stdout for "" and "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::invalid_argument, "cannot write " + path);
  write(out);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

ArrivalKind parse_arrivals(const std::string& s) {
  if (s == "bernoulli") return ArrivalKind::bernoulli;
  if (s == "periodic") return ArrivalKind::periodic;
  throw Error(Errc::invalid_argument, "arrivals must be bernoulli or periodic");
}

Metric parse_metric(const std::string& s) {
  if (s == "peak") return Metric::peak;
  if (s == "ave" || s == "average") return Metric::average;
  throw Error(Errc::invalid_argument, "metric must be peak or ave");
}

SchedulePolicy optimal_policy(const NetworkFile& nf) {
  if (nf.family.kind() == FamilyKind::k_link) {
    return klink_policy(solve_klink(nf.net, nf.family.max_active()).f);
  }
  return solve_general(nf.net, nf.family).policy;
}

// active | bernoulli:l[,l...] | periodic:D[,D...] | spp:<arrivals>[:<metric>]
std::vector<SourceSpec> parse_sources(const std::string& spec, const NetworkFile& nf, const SchedulePolicy& policy) {
  const std::size_t n = nf.net.size();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "active") return std::vector<SourceSpec>(n, SourceSpec::active());
  if (kind == "spp") {
    const auto c2 = rest.find(':');
    const auto arrivals = parse_arrivals(rest.substr(0, c2));
    const auto metric = c2 == std::string::npos ? Metric::peak : parse_metric(rest.substr(c2 + 1));
    const auto cfg = build_spp(nf.net, policy, arrivals, metric);
    std::vector<SourceSpec> out;
    for (std::size_t e = 0; e < n; ++e) {
      out.push_back(arrivals == ArrivalKind::bernoulli ? SourceSpec::bernoulli(cfg.rates[e])
                                                       : SourceSpec::periodic(cfg.periods[e]));
    }
    return out;
  }
  auto values = parse_list(rest);
  if (values.size() == 1) values.assign(n, values[0]);
  if (values.size() != n) throw Error(Errc::invalid_argument, "need one source parameter per link");
  std::vector<SourceSpec> out;
  for (double v : values) {
    if (kind == "bernoulli") {
      out.push_back(SourceSpec::bernoulli(v));
    } else if (kind == "periodic") {
      out.push_back(SourceSpec::periodic(static_cast<int>(v)));
    } else {
      throw Error(Errc::invalid_argument, "unknown source kind '" + kind + "'");
    }
  }
  return out;
}

bool report(const std::vector<CheckResult>& checks) {
  print_matrix(std::cerr, checks);
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string out_file(const std::string& dir, const std::string& name) {
  if (dir.empty()) return "";
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freshnet: age-of-information scheduling, queueing and simulation"};
  app.require_subcommand(1);

  std::string net_path, out_path, config_path;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "peak-age optimal stationary schedule");
  double tol = 1e-8;
  std::string method = "auto";
  solve->add_option("--net", net_path, "network JSON")->required();
  solve->add_option("--tol", tol, "relative optimality tolerance");
  solve->add_option("--method", method, "auto | general | klink");
  solve->add_option("--out", out_path, "output JSON (default stdout)");

  auto* queue = app.add_subcommand("queue", "single-queue age tables");
  std::string axis = "rho";
  double mu = 0.8;
  queue->add_option("--axis", axis, "rho | mu | curves");
  queue->add_option("--mu", mu, "service rate for occupancy sweeps");
  queue->add_option("--out", out_path, "output CSV (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "slot-level simulation");
  std::string scheduler = "stationary", sources = "active";
  std::uint64_t slots = 1'000'000;
  std::int64_t warmup = -1;
  std::size_t reps = 10, threads = 0;
  simulate->add_option("--net", net_path, "network JSON")->required();
  simulate->add_option("--scheduler", scheduler, "stationary | uniform | round-robin | distributed:p[,p...]");
  simulate->add_option("--sources", sources, "active | bernoulli:l[,...] | periodic:D[,...] | spp:<arrivals>[:<metric>]");
  simulate->add_option("--slots", slots, "horizon in slots");
  simulate->add_option("--warmup", warmup, "discarded slots (default: a tenth of the horizon)");
  simulate->add_option("--reps", reps, "replications");
  simulate->add_option("--seed", seed, "base seed");
  simulate->add_option("--threads", threads, "worker threads (0 = all cores)");
  simulate->add_option("--out", out_path, "output CSV (default stdout)");

  auto* spp = app.add_subcommand("spp", "separation policy for buffered sources");
  std::string arrivals = "bernoulli", metric = "peak";
  bool oracle = false;
  spp->add_option("--net", net_path, "network JSON")->required();
  spp->add_option("--arrivals", arrivals, "bernoulli | periodic");
  spp->add_option("--metric", metric, "peak | ave");
  spp->add_flag("--oracle", oracle, "compare with the brute-force joint optimum (small networks)");
  spp->add_option("--out", out_path, "output JSON (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "reproduce a numerical study");
  std::string name;
  std::size_t k_min = 1, k_max = 10;
  experiment->add_option("name", name, "fig2 | queue | fig3 | fig4 | fig3_4 | fig6")->required();
  experiment->add_option("--config", config_path, "JSON overrides for the theta sweep");
  experiment->add_option("--out", out_path, "output directory (default stdout)");
  experiment->add_option("--seed", seed, "base seed");
  experiment->add_option("--mu", mu, "service rate for fig2");
  experiment->add_option("--k-min", k_min, "smallest K for fig6");
  experiment->add_option("--k-max", k_max, "largest K for fig6");

  auto* verify = app.add_subcommand("verify", "run the self-check matrix");
  verify->add_option("--seed", seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto nf = load_network(net_path);
      SchedulePolicy policy;
      OptimalityCertificate cert;
      double peak = 0.0;
      json extra;
      if (method == "klink" || (method == "auto" && nf.family.kind() == FamilyKind::k_link)) {
        if (nf.family.kind() != FamilyKind::k_link) throw Error(Errc::invalid_argument, "klink needs a k-link family");
        const auto sol = solve_klink(nf.net, nf.family.max_active());
        policy = klink_policy(sol.f);
        cert = certify(policy, nf.net, nf.family, tol);
        peak = sol.peak_age;
        extra = {{"method", "water-filling"}, {"multiplier", sol.multiplier}};
      } else {
        SolveOptions opts;
        opts.tol = tol;
        const auto sol = solve_general(nf.net, nf.family, opts);
        policy = sol.policy;
        cert = sol.certificate;
        peak = sol.peak_age;
        extra = {{"method", "conditional-gradient"},
                 {"iterations", sol.iterations},
                 {"converged", sol.status == SolveStatus::converged}};
      }
      const bool ok = cert.optimal() && extra.value("converged", true);
      json x = json::array();
      for (std::size_t i = 0; i < policy.sets.size(); ++i) {
        if (policy.x[i] > 0.0) x.push_back({{"set", policy.sets[i]}, {"p", policy.x[i]}});
      }
      json j = {{"x", x},
                {"f", policy.f},
                {"omega", cert.omega},
                {"gap", cert.gap},
                {"peak_age", peak},
                {"conditions",
                 {{"c1", cert.conditions.support_equalised},
                  {"c2", cert.conditions.off_support_bounded},
                  {"c3", cert.conditions.on_simplex}}}};
      j.update(extra);
      emit(out_path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      return ok ? 0 : 1;
    }

    if (*queue) {
      if (axis == "curves") {
        const auto rows = experiment_fig2(mu);
        emit(out_path, [&](std::ostream& os) { write_csv(os, mu, rows); });
        return 0;
      }
      const auto rows = queue_table(axis, mu);
      emit(out_path, [&](std::ostream& os) { write_csv(os, rows); });
      return 0;
    }

    if (*simulate) {
      const auto nf = load_network(net_path);
      const auto policy = optimal_policy(nf);
      const auto sched = make_scheduler(scheduler, nf.net, nf.family, policy);
      const auto src = parse_sources(sources, nf, policy);
      const auto m = replicate(nf.net, nf.family, *sched, src, {slots, warmup, seed}, reps, seed, threads);
      emit(out_path, [&](std::ostream& os) { write_csv(os, m, nf.net); });
      std::cerr << "weighted peak " << m.weighted_peak.mean << " +- " << m.weighted_peak.half_width
                << ", weighted average " << m.weighted_average.mean << " +- " << m.weighted_average.half_width
                << ", sum w/(gamma f_hat) " << m.frequency_peak.mean << '\n';
      bool stable = true;
      for (const auto& r : m.runs) {
        for (std::size_t e = 0; e < r.links.size(); ++e) {
          if (r.links[e].unstable) stable = false;
        }
      }
      if (!stable) std::cerr << "warning: some buffered link has occupancy >= 1\n";
      return 0;
    }

    if (*spp) {
      const auto nf = load_network(net_path);
      const auto cfg = build_spp(nf.net, optimal_policy(nf), parse_arrivals(arrivals), parse_metric(metric));
      std::optional<GapReport> gap;
      if (oracle) gap = additive_gap_check(cfg, nf.net, nf.family);
      emit(out_path, [&](std::ostream& os) { os << to_json(cfg, nf.net, gap).dump(2) << '\n'; });
      return !gap || gap->within_one() ? 0 : 1;
    }

    if (*experiment) {
      if (name == "fig2") {
        const auto rows = experiment_fig2(mu);
        emit(out_file(out_path, "fig2.csv"), [&](std::ostream& os) { write_csv(os, mu, rows); });
        return report(check_fig2(rows)) ? 0 : 1;
      }
      if (name == "queue") {
        const auto rows = queue_table("mu", mu);
        emit(out_file(out_path, "queue_mu.csv"), [&](std::ostream& os) { write_csv(os, rows); });
        return 0;
      }
      if (name == "fig3" || name == "fig4" || name == "fig3_4") {
        ThetaSweepSpec spec;
        if (!config_path.empty()) {
          std::ifstream in(config_path);
          if (!in) throw Error(Errc::parse_error, "cannot open " + config_path);
          spec = ThetaSweepSpec::from_json(json::parse(in));
        }
        if (name == "fig3") spec.max_active = {1};
        if (name == "fig4") spec.max_active = {10};
        if (experiment->count("--seed")) spec.seed = seed;
        const auto rows = experiment_fig3_4(spec);
        emit(out_file(out_path, name + ".csv"), [&](std::ostream& os) { write_csv(os, rows); });
        return report(check_fig3_4(rows)) ? 0 : 1;
      }
      if (name == "fig6") {
        const auto rows = experiment_fig6(buffered_cases(), k_min, k_max);
        emit(out_file(out_path, "fig6.csv"), [&](std::ostream& os) { write_csv(os, rows); });
        return report(check_fig6(rows)) ? 0 : 1;
      }
      throw Error(Errc::invalid_argument, "unknown experiment '" + name + "'");
    }

    if (*verify) {
      const auto results = verify_all(seed);
      print_matrix(std::cout, results);
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
