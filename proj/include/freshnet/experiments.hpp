#pragma once

// Experiment drivers. Each returns plain rows and has a CSV writer; every
// result is a pure function of its spec and seed.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "freshnet/queue_calculus.hpp"
#include "freshnet/slot_simulator.hpp"

namespace freshnet {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// --- single-queue tables ---------------------------------------------------

struct QueueCurveRow {
  double rho = 0.0;
  AgePair berber;  // discrete, bernoulli arrivals
  AgePair mm1;     // continuous-time bound
  AgePair dber;    // discrete, periodic arrivals (real-valued period)
  AgePair dm1;     // continuous-time bound
};

/// Ages against occupancy at a fixed service rate.
std::vector<QueueCurveRow> experiment_fig2(double mu = 0.8, std::vector<double> rhos = {});
void write_csv(std::ostream& out, double mu, const std::vector<QueueCurveRow>& rows);
/// Discrete Bernoulli curves strictly below their bound with a gap growing
/// in rho; periodic curves never above theirs.
std::vector<CheckResult> check_fig2(const std::vector<QueueCurveRow>& rows);

struct QueueTableRow {
  std::string kind;  // bernoulli | periodic
  std::string axis;  // rho | mu
  double mu = 0.0;
  double x = 0.0;
  double peak_dt = 0.0;
  double ave_dt = 0.0;
  double peak_ct_bound = 0.0;
  double ave_ct_bound = 0.0;
  /// Age here minus the smallest age over all occupancies at the same mu.
  double delta_peak = 0.0;
  double delta_ave = 0.0;
};

/// axis "rho": occupancy sweep at fixed mu. axis "mu": service-rate sweep at
/// the universal occupancies, where the delta columns are the gaps to the
/// per-mu optimum.
std::vector<QueueTableRow> queue_table(const std::string& axis, double mu = 0.8);
void write_csv(std::ostream& out, const std::vector<QueueTableRow>& rows);

// --- active-source network sweep -------------------------------------------

struct ThetaSweepSpec {
  std::size_t links = 50;
  std::vector<std::size_t> max_active{1, 10};
  double gamma_good = 0.9;
  std::vector<double> gamma_bad{0.1, 0.2};
  std::vector<double> thetas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::uint64_t horizon = 1'000'000;
  std::int64_t warmup = -1;
  std::size_t reps = 10;
  std::uint64_t seed = 1;

  static ThetaSweepSpec from_json(const nlohmann::json& j);
};

struct ThetaSweepRow {
  std::size_t max_active = 0;
  double gamma_bad = 0.0;
  double theta = 0.0;
  std::string policy;  // optimal | uniform | round-robin
  Estimate peak;
  Estimate average;
  /// sum_e w_e / (gamma_e f_e) for the policy's nominal frequencies.
  double analytic_peak = 0.0;
};

std::vector<ThetaSweepRow> experiment_fig3_4(const ThetaSweepSpec& spec);
void write_csv(std::ostream& out, const std::vector<ThetaSweepRow>& rows);
/// Optimal policy lowest in peak age, round robin equal to uniform, ages
/// non-decreasing in theta. Comparisons allow the sum of both half-widths.
std::vector<CheckResult> check_fig3_4(const std::vector<ThetaSweepRow>& rows);

// --- buffered sources against K ----------------------------------------------

struct BufferedCase {
  std::string name;
  std::size_t links = 0;
  std::vector<double> gamma;
};

/// The three standard cases: 50 links with 7 bad, 10 links with 7 bad, and
/// 50 perfect links.
std::vector<BufferedCase> buffered_cases();

struct BufferedRow {
  std::string case_name;
  std::size_t links = 0;
  std::size_t max_active = 0;
  double spp_peak = 0.0;
  double buffered_optimum = 0.0;
  double active_optimum = 0.0;
  double gap() const { return spp_peak - buffered_optimum; }
  double ratio() const { return buffered_optimum / active_optimum; }
};

std::vector<BufferedRow> experiment_fig6(const std::vector<BufferedCase>& cases = buffered_cases(),
                                         std::size_t k_min = 1, std::size_t k_max = 10);
void write_csv(std::ostream& out, const std::vector<BufferedRow>& rows);
/// Separation policy within one slot of the optimum, buffered/active ratio
/// in [3, 5], gap non-decreasing in K.
std::vector<CheckResult> check_fig6(const std::vector<BufferedRow>& rows);

}  // namespace freshnet
