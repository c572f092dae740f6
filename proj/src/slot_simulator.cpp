#include "freshnet/slot_simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "freshnet/error.hpp"

namespace freshnet {

std::mt19937_64 make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t link) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(link),
                    static_cast<std::uint32_t>(link >> 32)};
  return std::mt19937_64(seq);
}

namespace {

// Walker/Vose alias table.
class AliasTable {
 public:
  explicit AliasTable(std::vector<double> p) : prob_(p.size()), alias_(p.size()) {
    const std::size_t k = p.size();
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
      p[i] *= static_cast<double>(k) / total;
      (p[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = p[s];
      alias_[s] = l;
      p[l] -= 1.0 - p[s];
      if (p[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) prob_[i] = 1.0, alias_[i] = i;
    for (std::size_t i : small) prob_[i] = 1.0, alias_[i] = i;
  }

  std::size_t sample(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * static_cast<double>(prob_.size());
    const auto i = std::min(static_cast<std::size_t>(u), prob_.size() - 1);
    return (u - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

class StationaryScheduler final : public Scheduler {
 public:
  explicit StationaryScheduler(const SchedulePolicy& policy) : sets_(policy.sets), table_(weights(policy)) {
    sets_.emplace_back();  // idle outcome
  }

  std::size_t next(std::uint64_t, std::mt19937_64& rng, ActivationSet& out) const override {
    const std::size_t i = table_.sample(rng);
    out = sets_[i];
    return i;
  }
  std::string name() const override { return "stationary"; }
  bool stationary() const override { return true; }

 private:
  static std::vector<double> weights(const SchedulePolicy& policy) {
    if (policy.sets.size() != policy.x.size()) throw Error(Errc::invalid_argument, "policy sets and x differ in size");
    std::vector<double> w;
    double total = 0.0;
    for (double x : policy.x) {
      if (x < 0.0) throw Error(Errc::invalid_argument, "negative set probability");
      w.push_back(x);
      total += x;
    }
    if (total > 1.0 + 1e-9) throw Error(Errc::invalid_argument, "set probabilities sum above one");
    w.push_back(std::max(0.0, 1.0 - total));
    return w;
  }

  std::vector<ActivationSet> sets_;
  AliasTable table_;
};

class DistributedScheduler final : public Scheduler {
 public:
  explicit DistributedScheduler(std::vector<double> p) : p_(std::move(p)) {
    for (double v : p_) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::invalid_argument, "attempt probability outside [0, 1]");
    }
  }

  std::size_t next(std::uint64_t, std::mt19937_64& rng, ActivationSet& out) const override {
    out.clear();
    for (std::size_t e = 0; e < p_.size(); ++e) {
      if (uniform01(rng) < p_[e]) out.push_back(e);
    }
    return kAdHoc;
  }
  std::string name() const override { return "distributed"; }
  bool stationary() const override { return true; }

 private:
  std::vector<double> p_;
};

class RoundRobinScheduler final : public Scheduler {
 public:
  explicit RoundRobinScheduler(std::vector<ActivationSet> groups) : groups_(std::move(groups)) {
    if (groups_.empty()) throw Error(Errc::invalid_argument, "round robin needs at least one group");
    for (auto& g : groups_) std::sort(g.begin(), g.end());
  }

  std::size_t next(std::uint64_t t, std::mt19937_64&, ActivationSet& out) const override {
    const std::size_t i = static_cast<std::size_t>(t % groups_.size());
    out = groups_[i];
    return i;
  }
  std::string name() const override { return "round-robin"; }
  bool stationary() const override { return false; }

 private:
  std::vector<ActivationSet> groups_;
};

class UniformKLinkScheduler final : public Scheduler {
 public:
  UniformKLinkScheduler(std::size_t n, std::size_t k) : n_(n), k_(std::min(k, n)) {}

  // Floyd's algorithm: k distinct draws without a scratch permutation.
  std::size_t next(std::uint64_t, std::mt19937_64& rng, ActivationSet& out) const override {
    out.clear();
    for (std::size_t j = n_ - k_; j < n_; ++j) {
      const auto r = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(j + 1));
      const std::size_t pick = std::min(r, j);
      if (std::find(out.begin(), out.end(), pick) == out.end()) {
        out.push_back(pick);
      } else {
        out.push_back(j);
      }
    }
    std::sort(out.begin(), out.end());
    return kAdHoc;
  }
  std::string name() const override { return "uniform"; }
  bool stationary() const override { return true; }

 private:
  std::size_t n_;
  std::size_t k_;
};

class UniformListScheduler final : public Scheduler {
 public:
  explicit UniformListScheduler(std::vector<ActivationSet> sets) : sets_(std::move(sets)) {
    if (sets_.empty()) throw Error(Errc::invalid_argument, "family has no sets");
  }

  std::size_t next(std::uint64_t, std::mt19937_64& rng, ActivationSet& out) const override {
    const auto i = std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(sets_.size())),
                            sets_.size() - 1);
    out = sets_[i];
    return i;
  }
  std::string name() const override { return "uniform"; }
  bool stationary() const override { return true; }

 private:
  std::vector<ActivationSet> sets_;
};

std::uint64_t geometric_gap(std::mt19937_64& rng, double lambda) {
  if (lambda >= 1.0) return 1;
  const double u = uniform01(rng);
  const double k = std::floor(std::log1p(-u) / std::log1p(-lambda));
  if (!(k < 1e18)) return std::numeric_limits<std::uint64_t>::max() / 4;
  return 1 + static_cast<std::uint64_t>(k);
}

// Sum of the age over slots [lo, hi] of a segment that starts at slot u
// with age a, clipped to the window.
std::uint64_t segment_sum(std::uint64_t u, std::uint64_t a, std::uint64_t lo, std::uint64_t hi) {
  lo = std::max(lo, u);
  if (lo > hi) return 0;
  const std::uint64_t cnt = hi - lo + 1;
  return cnt * (a + lo - u) + cnt * (cnt - 1) / 2;
}

std::uint64_t overlap(std::uint64_t lo, std::uint64_t hi, std::uint64_t wlo, std::uint64_t whi) {
  lo = std::max(lo, wlo);
  hi = std::min(hi, whi);
  return lo > hi ? 0 : hi - lo + 1;
}

struct LinkState {
  std::uint64_t seg_start = 0;
  std::uint64_t seg_age = 1;
  std::uint64_t age_sum = 0;
  std::uint64_t peak_sum = 0;
  std::uint64_t peaks = 0;
  std::uint64_t activations = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t queue_sum = 0;
  std::uint64_t next_arrival = 0;
  std::deque<std::uint64_t> fifo;
};

}  // namespace

SchedulerPtr stationary_scheduler(const SchedulePolicy& policy) {
  return std::make_shared<StationaryScheduler>(policy);
}

SchedulerPtr distributed_scheduler(std::vector<double> p) {
  return std::make_shared<DistributedScheduler>(std::move(p));
}

SchedulerPtr round_robin_scheduler(std::vector<ActivationSet> groups) {
  return std::make_shared<RoundRobinScheduler>(std::move(groups));
}

SchedulerPtr round_robin_klink(const NetworkSpec& net, std::size_t max_active) {
  if (max_active == 0) throw Error(Errc::invalid_argument, "K must be at least 1");
  std::vector<LinkId> order(net.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](LinkId a, LinkId b) { return net.gamma(a) < net.gamma(b); });
  std::vector<ActivationSet> groups;
  for (std::size_t i = 0; i < order.size(); i += max_active) {
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                        order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + max_active)));
  }
  return round_robin_scheduler(std::move(groups));
}

SchedulerPtr uniform_scheduler(const ActivationSetFamily& family) {
  if (family.kind() == FamilyKind::k_link) {
    return std::make_shared<UniformKLinkScheduler>(family.num_links(), family.max_active());
  }
  return std::make_shared<UniformListScheduler>(maximal_sets(family).listed_sets());
}

SchedulerPtr make_scheduler(const std::string& spec, const NetworkSpec& net, const ActivationSetFamily& family,
                            const SchedulePolicy& optimal) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "stationary") return stationary_scheduler(optimal);
  if (name == "uniform") return uniform_scheduler(family);
  if (name == "round-robin") {
    const std::size_t k = family.kind() == FamilyKind::k_link ? family.max_active() : 1;
    return round_robin_klink(net, k);
  }
  if (name == "distributed") {
    std::vector<double> p;
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) p.push_back(std::stod(item));
    if (p.size() == 1) p.assign(net.size(), p[0]);
    if (p.size() != net.size()) throw Error(Errc::invalid_argument, "distributed scheduler needs one p per link");
    return distributed_scheduler(std::move(p));
  }
  throw Error(Errc::invalid_argument, "unknown scheduler '" + spec + "'");
}

SourceSpec SourceSpec::bernoulli(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error(Errc::invalid_argument, "bernoulli rate must be in (0, 1]");
  return {SourceKind::bernoulli, lambda, 1, 0};
}

SourceSpec SourceSpec::periodic(int period, int phase) {
  if (period < 1) throw Error(Errc::invalid_argument, "period must be at least 1");
  return {SourceKind::periodic, 1.0 / period, period, phase};
}

RunMetrics run(const NetworkSpec& net, const ActivationSetFamily& family, const Scheduler& scheduler,
               const std::vector<SourceSpec>& sources, const RunConfig& config) {
  const std::size_t n = net.size();
  if (sources.size() != n) throw Error(Errc::invalid_argument, "need one source per link");
  if (family.num_links() != n) throw Error(Errc::invalid_argument, "family/network size mismatch");
  const std::uint64_t horizon = config.horizon;
  const std::uint64_t warmup = config.effective_warmup();
  if (horizon == 0 || warmup >= horizon) throw Error(Errc::invalid_horizon, "horizon must exceed warmup");
  const std::uint64_t last = horizon - 1;

  auto sched_rng = make_stream(config.seed, StreamPurpose::scheduler);
  std::vector<std::mt19937_64> channel;
  std::vector<std::mt19937_64> arrival;
  std::vector<LinkState> state(n);
  for (std::size_t e = 0; e < n; ++e) {
    channel.push_back(make_stream(config.seed, StreamPurpose::channel, e));
    arrival.push_back(make_stream(config.seed, StreamPurpose::arrivals, e));
    const auto& src = sources[e];
    if (src.kind == SourceKind::bernoulli) {
      state[e].next_arrival = geometric_gap(arrival[e], src.lambda) - 1;
    } else if (src.kind == SourceKind::periodic) {
      state[e].next_arrival = static_cast<std::uint64_t>(((src.phase % src.period) + src.period) % src.period);
    }
  }

  auto advance_arrivals = [&](std::size_t e, std::uint64_t before) {
    auto& s = state[e];
    const auto& src = sources[e];
    while (s.next_arrival < before) {
      s.fifo.push_back(s.next_arrival);
      if (s.next_arrival >= warmup) ++s.arrivals;
      s.next_arrival += src.kind == SourceKind::periodic ? static_cast<std::uint64_t>(src.period)
                                                         : geometric_gap(arrival[e], src.lambda);
    }
  };

  std::vector<std::int8_t> feasible_cache;
  std::uint64_t infeasible = 0;
  ActivationSet m;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const std::size_t idx = scheduler.next(t, sched_rng, m);
    bool feasible;
    if (idx == Scheduler::kAdHoc) {
      for (LinkId e : m) {
        if (e >= n) throw Error(Errc::unknown_link, "scheduler emitted link " + std::to_string(e));
      }
      feasible = family.contains(m);
    } else {
      if (idx >= feasible_cache.size()) feasible_cache.resize(idx + 1, -1);
      if (feasible_cache[idx] < 0) {
        for (LinkId e : m) {
          if (e >= n) throw Error(Errc::unknown_link, "scheduler emitted link " + std::to_string(e));
        }
        feasible_cache[idx] = family.contains(m) ? 1 : 0;
      }
      feasible = feasible_cache[idx] != 0;
    }
    const bool measured = t >= warmup;
    if (!feasible) {
      if (measured) ++infeasible;
      continue;
    }
    for (LinkId e : m) {
      auto& s = state[e];
      if (measured) ++s.activations;
      if (!(uniform01(channel[e]) < net.gamma(e))) continue;
      std::uint64_t generated = t;
      if (sources[e].kind != SourceKind::active) {
        advance_arrivals(e, t);
        if (s.fifo.empty()) continue;
        generated = s.fifo.front();
        s.fifo.pop_front();
        s.queue_sum += overlap(generated + 1, t, warmup, last);
      }
      if (measured) {
        s.peak_sum += s.seg_age + (t - s.seg_start);
        ++s.peaks;
      }
      s.age_sum += segment_sum(s.seg_start, s.seg_age, warmup, t);
      s.seg_start = t + 1;
      s.seg_age = t - generated + 1;
    }
  }

  RunMetrics out;
  out.measured_slots = horizon - warmup;
  out.infeasible_slots = infeasible;
  out.links.resize(n);
  const double slots = static_cast<double>(out.measured_slots);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < n; ++e) {
    auto& s = state[e];
    s.age_sum += segment_sum(s.seg_start, s.seg_age, warmup, last);
    if (sources[e].kind != SourceKind::active) {
      advance_arrivals(e, last);
      for (std::uint64_t g : s.fifo) s.queue_sum += overlap(g + 1, last, warmup, last);
    }
    auto& l = out.links[e];
    l.activations = s.activations;
    l.deliveries = s.peaks;
    l.arrivals = s.arrivals;
    l.f_hat = static_cast<double>(s.activations) / slots;
    l.peak = s.peaks ? static_cast<double>(s.peak_sum) / static_cast<double>(s.peaks) : kInf;
    l.average = static_cast<double>(s.age_sum) / slots;
    l.q_mean = static_cast<double>(s.queue_sum) / slots;
    l.unstable = sources[e].kind != SourceKind::active && sources[e].lambda >= net.gamma(e) * l.f_hat;
    out.weighted_peak += net.weight(e) * l.peak;
    out.weighted_average += net.weight(e) * l.average;
    out.frequency_peak += l.f_hat > 0.0 ? net.weight(e) / (net.gamma(e) * l.f_hat) : kInf;
  }
  return out;
}

FrequencyVector measure_frequencies(const RunMetrics& metrics) {
  FrequencyVector f;
  for (const auto& l : metrics.links) f.push_back(l.f_hat);
  return f;
}

Estimate estimate(const std::vector<double>& samples) {
  Estimate est;
  if (samples.empty()) return est;
  const double n = static_cast<double>(samples.size());
  for (double v : samples) est.mean += v;
  est.mean /= n;
  if (!std::isfinite(est.mean) || samples.size() < 2) return est;
  double ss = 0.0;
  for (double v : samples) ss += (v - est.mean) * (v - est.mean);
  est.half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return est;
}

ReplicatedMetrics replicate(const NetworkSpec& net, const ActivationSetFamily& family, const Scheduler& scheduler,
                            const std::vector<SourceSpec>& sources, RunConfig config, std::size_t reps,
                            std::uint64_t base_seed, std::size_t threads) {
  if (reps == 0) throw Error(Errc::invalid_argument, "need at least one replication");
  ReplicatedMetrics out;
  out.runs.resize(reps);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, reps);

  auto one = [&](std::size_t i) {
    RunConfig c = config;
    c.seed = base_seed + i;
    out.runs[i] = run(net, family, scheduler, sources, c);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < reps; ++i) one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i; (i = next.fetch_add(1)) < reps;) one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  const std::size_t n = net.size();
  out.links.resize(n);
  std::vector<double> buf(reps);
  auto collect = [&](auto get) {
    for (std::size_t i = 0; i < reps; ++i) buf[i] = get(out.runs[i]);
    return estimate(buf);
  };
  for (std::size_t e = 0; e < n; ++e) {
    out.links[e].f_hat = collect([e](const RunMetrics& r) { return r.links[e].f_hat; });
    out.links[e].peak = collect([e](const RunMetrics& r) { return r.links[e].peak; });
    out.links[e].average = collect([e](const RunMetrics& r) { return r.links[e].average; });
    out.links[e].q_mean = collect([e](const RunMetrics& r) { return r.links[e].q_mean; });
  }
  out.weighted_peak = collect([](const RunMetrics& r) { return r.weighted_peak; });
  out.weighted_average = collect([](const RunMetrics& r) { return r.weighted_average; });
  out.frequency_peak = collect([](const RunMetrics& r) { return r.frequency_peak; });
  return out;
}

void write_csv(std::ostream& out, const ReplicatedMetrics& metrics, const NetworkSpec& net) {
  out << "rep,link,f_hat,peak,ave,q_mean\n";
  out.precision(10);
  for (std::size_t i = 0; i < metrics.runs.size(); ++i) {
    const auto& r = metrics.runs[i];
    double fw = 0.0;
    double qw = 0.0;
    for (std::size_t e = 0; e < r.links.size(); ++e) {
      const auto& l = r.links[e];
      out << i << ',' << e << ',' << l.f_hat << ',' << l.peak << ',' << l.average << ',' << l.q_mean << '\n';
      fw += net.weight(e) * l.f_hat;
      qw += net.weight(e) * l.q_mean;
    }
    out << i << ",weighted," << fw << ',' << r.weighted_peak << ',' << r.weighted_average << ',' << qw << '\n';
  }
}

}  // namespace freshnet
