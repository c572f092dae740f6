#pragma once

// Slot-by-slot simulation of a single-hop network. In every slot the
// scheduler emits an activation set; if the set is feasible each of its links
// draws its channel and, on success, delivers the freshest packet it has
// (active source) or the head of its FIFO queue (buffered source).
//
// Buffered packets generated in slot t join the queue at the end of slot t,
// so the earliest delivery is in slot t + 1 and the age just after it is 1.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "freshnet/age_optimizer.hpp"
#include "freshnet/net_model.hpp"

namespace freshnet {

/// Random streams are keyed by (seed, purpose, link) so that adding a link or
/// a scheduler draw never shifts another stream.
enum class StreamPurpose : std::uint32_t { scheduler = 0, channel = 1, arrivals = 2 };

std::mt19937_64 make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t link = 0);

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

class Scheduler {
 public:
  static constexpr std::size_t kAdHoc = static_cast<std::size_t>(-1);

  virtual ~Scheduler() = default;
  /// Fills `out` with the set for slot t. Returns an index into a fixed list
  /// of sets (so feasibility can be cached) or kAdHoc.
  virtual std::size_t next(std::uint64_t t, std::mt19937_64& rng, ActivationSet& out) const = 0;
  virtual std::string name() const = 0;
  /// True when the emitted distribution does not depend on t.
  virtual bool stationary() const = 0;
};

using SchedulerPtr = std::shared_ptr<const Scheduler>;

/// Samples sets[i] with probability x[i]; the remaining mass idles.
SchedulerPtr stationary_scheduler(const SchedulePolicy& policy);
/// Every link attempts independently with probability p_e.
SchedulerPtr distributed_scheduler(std::vector<double> p);
/// Cycles through the groups, one per slot.
SchedulerPtr round_robin_scheduler(std::vector<ActivationSet> groups);
/// Groups of K links sorted by channel quality, worst first; period ceil(N/K).
SchedulerPtr round_robin_klink(const NetworkSpec& net, std::size_t max_active);
/// Uniform over the family's maximal sets. K-link families are sampled
/// directly without enumerating the subsets.
SchedulerPtr uniform_scheduler(const ActivationSetFamily& family);

/// Parses "stationary", "uniform", "round-robin", "distributed:p" or
/// "distributed:p0,p1,..." given the optimised policy for "stationary".
SchedulerPtr make_scheduler(const std::string& spec, const NetworkSpec& net, const ActivationSetFamily& family,
                            const SchedulePolicy& optimal);

enum class SourceKind { active, bernoulli, periodic };

struct SourceSpec {
  SourceKind kind = SourceKind::active;
  double lambda = 0.0;
  int period = 1;
  int phase = 0;

  static SourceSpec active() { return {}; }
  static SourceSpec bernoulli(double lambda);
  static SourceSpec periodic(int period, int phase = 0);
};

struct RunConfig {
  std::uint64_t horizon = 1'000'000;
  /// Slots discarded at the start; defaults to a tenth of the horizon.
  std::int64_t warmup = -1;
  std::uint64_t seed = 1;

  std::uint64_t effective_warmup() const {
    return warmup < 0 ? horizon / 10 : static_cast<std::uint64_t>(warmup);
  }
};

struct LinkMetrics {
  double f_hat = 0.0;
  double peak = 0.0;
  double average = 0.0;
  double q_mean = 0.0;
  std::uint64_t activations = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t arrivals = 0;
  /// Buffered link whose arrival rate reached its service rate.
  bool unstable = false;
};

struct RunMetrics {
  std::vector<LinkMetrics> links;
  double weighted_peak = 0.0;
  double weighted_average = 0.0;
  /// sum_e w_e / (gamma_e f_hat_e)
  double frequency_peak = 0.0;
  std::uint64_t measured_slots = 0;
  std::uint64_t infeasible_slots = 0;
};

RunMetrics run(const NetworkSpec& net, const ActivationSetFamily& family, const Scheduler& scheduler,
               const std::vector<SourceSpec>& sources, const RunConfig& config);

FrequencyVector measure_frequencies(const RunMetrics& metrics);

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal approximation across replications
};

Estimate estimate(const std::vector<double>& samples);

struct LinkEstimate {
  Estimate f_hat, peak, average, q_mean;
};

struct ReplicatedMetrics {
  std::vector<RunMetrics> runs;
  std::vector<LinkEstimate> links;
  Estimate weighted_peak;
  Estimate weighted_average;
  Estimate frequency_peak;
};

/// Runs seeds base_seed, base_seed + 1, ... and summarises. Replications run
/// on up to `threads` threads (0 = hardware concurrency); the result does not
/// depend on the thread count.
ReplicatedMetrics replicate(const NetworkSpec& net, const ActivationSetFamily& family, const Scheduler& scheduler,
                            const std::vector<SourceSpec>& sources, RunConfig config, std::size_t reps,
                            std::uint64_t base_seed, std::size_t threads = 0);

/// Columns rep, link, f_hat, peak, ave, q_mean; link "weighted" rows carry
/// the weighted metrics.
void write_csv(std::ostream& out, const ReplicatedMetrics& metrics, const NetworkSpec& net);

}  // namespace freshnet
