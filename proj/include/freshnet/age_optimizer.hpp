#pragma once

// Peak-age optimal stationary scheduling for active sources.

#include <cstddef>
#include <span>
#include <vector>

#include "freshnet/net_model.hpp"
#include "freshnet/types.hpp"

namespace freshnet {

/// Stationary centralised policy: activate sets[i] with probability x[i] in
/// every slot, independently. Any mass left over (1 - sum x) idles the slot.
struct SchedulePolicy {
  std::vector<ActivationSet> sets;
  std::vector<double> x;
  FrequencyVector f;
};

/// Recomputes policy.f from the sets and probabilities.
void refresh_frequencies(SchedulePolicy& policy, std::size_t num_links);

struct CertificateConditions {
  bool support_equalised = false;  // every x_m > tol has Omega_m = Omega
  bool off_support_bounded = false;  // every other Omega_m <= Omega
  bool on_simplex = false;  // sum x = 1, x >= 0
};

struct OptimalityCertificate {
  std::vector<double> omega_weights;
  double omega = 0.0;
  /// max_m Omega_m - sum_m x_m Omega_m; +inf when some covered link has f = 0.
  double gap = 0.0;
  bool unbounded = false;
  CertificateConditions conditions;

  bool optimal() const {
    return conditions.support_equalised && conditions.off_support_bounded && conditions.on_simplex;
  }
};

/// sum_e w_e / (gamma_e f_e). Throws unbounded-age for a zero frequency.
double peak_age_of(std::span<const double> f, const NetworkSpec& net);

struct SolveOptions {
  double tol = 1e-8;  // relative to Omega
  std::size_t max_iter = 100000;
  std::size_t cap = kDefaultSetCap;
};

enum class SolveStatus { converged, max_iter_exceeded };

struct SolveResult {
  SchedulePolicy policy;
  OptimalityCertificate certificate;
  double peak_age = 0.0;
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
  /// Objective value after every iteration (first entry is the start point).
  std::vector<double> objective_trace;
};

/// Minimises the weighted peak age over distributions on the family's maximal
/// sets with a pairwise conditional-gradient method. Throws uncovered-link if
/// some link belongs to no set.
SolveResult solve_general(const NetworkSpec& net, const ActivationSetFamily& family,
                          const SolveOptions& options = {});

struct KLinkSolution {
  FrequencyVector f;
  double peak_age = 0.0;
  double multiplier = 0.0;
};

/// Water-filling solution when at most K links may be active per slot.
KLinkSolution solve_klink(const NetworkSpec& net, std::size_t max_active, double tol = 1e-15);

/// Water-filling over arbitrary positive coefficients: minimise
/// sum_e c_e / f_e subject to sum f <= K, 0 < f <= 1.
FrequencyVector water_fill(std::span<const double> coeff, std::size_t max_active,
                           double* multiplier = nullptr, double tol = 1e-15);

/// Realises a frequency vector with f_e <= 1 as a distribution over sets of
/// size at most ceil(sum f) by systematic sampling; at most |E|+1 sets.
SchedulePolicy klink_policy(std::span<const double> f);

/// Checks the equal-Omega optimality conditions. Condition 2 is evaluated
/// over every maximal set of the family, not only the policy's sets.
OptimalityCertificate certify(const SchedulePolicy& policy, const NetworkSpec& net,
                              const ActivationSetFamily& family, double tol = 1e-8);
/// Same, treating the policy's own sets as the family.
OptimalityCertificate certify(const SchedulePolicy& policy, const NetworkSpec& net, double tol = 1e-8);

/// Peak and average age of a link that succeeds independently with
/// probability p in every slot.
AgePair stationary_age_analytic(double p);

}  // namespace freshnet
