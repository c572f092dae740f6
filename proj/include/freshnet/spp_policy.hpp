#pragma once

// Separation policy for buffered sources: schedule as if the sources were
// active, then set every link's generation rate so that its queue runs at the
// same occupancy rho_bar.

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "freshnet/age_optimizer.hpp"
#include "freshnet/net_model.hpp"
#include "freshnet/queue_calculus.hpp"
#include "freshnet/types.hpp"

namespace freshnet {

struct SppConfig {
  ArrivalKind arrival_kind = ArrivalKind::bernoulli;
  Metric metric = Metric::peak;
  SchedulePolicy schedule;
  double rho_bar = 0.5;
  /// Service rate gamma_e f_e of every link.
  std::vector<double> mu;
  /// Bernoulli generation rates (bernoulli) or 1/D_e (periodic).
  std::vector<double> rates;
  /// Periods D_e; empty for bernoulli.
  std::vector<int> periods;
};

/// The schedule comes from solve_klink for K-link families and from
/// solve_general otherwise.
SppConfig build_spp(const NetworkSpec& net, const ActivationSetFamily& family, ArrivalKind arrivals,
                    Metric metric, const SolveOptions& options = {});

/// Same, for a schedule computed elsewhere.
SppConfig build_spp(const NetworkSpec& net, SchedulePolicy schedule, ArrivalKind arrivals, Metric metric);

/// Per-link analytic age under the configuration (peak or average per cfg).
std::vector<double> spp_link_ages(const SppConfig& cfg);
double spp_analytic_age(const SppConfig& cfg, const NetworkSpec& net);

struct OracleOptions {
  std::size_t resolution = 200;  // grid points per unit of x and rho
  std::size_t refine = 10;       // refinement factor around the incumbent
  std::size_t max_links = 4;
  std::size_t max_points = 50'000'000;
};

struct GapReport {
  double spp_value = 0.0;
  double oracle_optimum = 0.0;
  double gap = 0.0;  // spp_value - oracle_optimum
  std::vector<double> oracle_f;
  bool within_one() const { return gap <= 1.0; }
};

/// Brute-force joint optimum of the buffered objective over activation
/// frequencies (grid on the simplex of maximal sets) and per-link rates
/// (grid on rho, or integer periods), compared with the SPP value.
GapReport additive_gap_check(const SppConfig& cfg, const NetworkSpec& net,
                             const ActivationSetFamily& family, const OracleOptions& options = {});

/// Best age of one link at service rate mu over the oracle's rate grid.
double oracle_link_age(RhoKind kind, double mu, const OracleOptions& options = {});

struct FactorReport {
  double factor = 0.0;
  double spp_value = 0.0;
  double implied_lower_bound = 0.0;  // on the optimum over all policies
};

FactorReport multiplicative_bound_report(const SppConfig& cfg, const NetworkSpec& net);

nlohmann::json to_json(const SppConfig& cfg, const NetworkSpec& net,
                       const std::optional<GapReport>& gap = std::nullopt);

/// Optimum of the buffered peak/average age with Bernoulli arrivals over
/// frequencies and per-link occupancies, by alternating minimisation; for at
/// most three links a grid search is also run and the better value kept.
struct BufferedOptimum {
  double age = 0.0;
  FrequencyVector f;
  std::vector<double> rho;
  std::size_t rounds = 0;
};

BufferedOptimum buffered_optimum(const NetworkSpec& net, const ActivationSetFamily& family, Metric metric,
                                 double tol = 1e-12, std::size_t max_rounds = 500);

}  // namespace freshnet
