#include "freshnet/age_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "freshnet/error.hpp"

namespace freshnet {

namespace {

constexpr double kFrequencyFloor = 1e-12;


double set_omega(const ActivationSet& m, std::span<const double> coeff, std::span<const double> f,
                 bool floor) {
  double s = 0.0;
  for (LinkId e : m) {
    const double fe = floor ? std::max(f[e], kFrequencyFloor) : f[e];
    if (fe <= 0.0) return std::numeric_limits<double>::infinity();
    s += coeff[e] / (fe * fe);
  }
  return s;
}

double objective(std::span<const double> coeff, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t e = 0; e < f.size(); ++e) s += coeff[e] / std::max(f[e], kFrequencyFloor);
  return s;
}

// Largest Omega_m over the whole family. For K-link families the maximum is
// attained by the K largest per-link terms, so nothing is enumerated.
double family_max_omega(const ActivationSetFamily& family, std::span<const double> coeff,
                        std::span<const double> f) {
  const std::size_t n = family.num_links();
  std::vector<double> term(n);
  for (std::size_t e = 0; e < n; ++e) {
    term[e] = f[e] > 0.0 ? coeff[e] / (f[e] * f[e]) : std::numeric_limits<double>::infinity();
  }
  if (family.kind() == FamilyKind::k_link) {
    const std::size_t k = std::min(family.max_active(), n);
    std::partial_sort(term.begin(), term.begin() + static_cast<std::ptrdiff_t>(k), term.end(),
                      std::greater<>());
    return std::accumulate(term.begin(), term.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  }
  const auto maximal = maximal_sets(family);
  double best = 0.0;
  for (const auto& m : maximal.listed_sets()) {
    double s = 0.0;
    for (LinkId e : m) s += term[e];
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

void refresh_frequencies(SchedulePolicy& policy, std::size_t num_links) {
  policy.f.assign(num_links, 0.0);
  for (std::size_t m = 0; m < policy.sets.size(); ++m) {
    for (LinkId e : policy.sets[m]) {
      if (e >= num_links) throw Error(Errc::unknown_link, "policy refers to link " + std::to_string(e));
      policy.f[e] += policy.x[m];
    }
  }
}

double peak_age_of(std::span<const double> f, const NetworkSpec& net) {
  if (f.size() != net.size()) throw Error(Errc::invalid_argument, "frequency vector length mismatch");
  double total = 0.0;
  for (std::size_t e = 0; e < f.size(); ++e) {
    if (!(f[e] > 0.0)) {
      throw Error(Errc::unbounded_age, "link " + std::to_string(e) + " is never activated");
    }
    total += net.weight(e) / (net.gamma(e) * f[e]);
  }
  return total;
}

SolveResult solve_general(const NetworkSpec& net, const ActivationSetFamily& family,
                          const SolveOptions& options) {
  const std::size_t n = net.size();
  if (family.num_links() != n) throw Error(Errc::invalid_argument, "family/network size mismatch");

  const auto maximal = maximal_sets(family, options.cap);
  const auto& sets = maximal.listed_sets();
  std::vector<char> covered(n, 0);
  for (const auto& m : sets) {
    for (LinkId e : m) covered[e] = 1;
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (!covered[e]) throw Error(Errc::uncovered_link, "link " + std::to_string(e) + " is in no set");
  }

  const auto coeff = net.effective_weights();
  const std::size_t k = sets.size();

  SolveResult result;
  auto& x = result.policy.x;
  x.assign(k, 1.0 / static_cast<double>(k));
  result.policy.sets = sets;
  refresh_frequencies(result.policy, n);
  auto& f = result.policy.f;

  std::vector<double> omega(k);
  result.objective_trace.push_back(objective(coeff, f));
  result.status = SolveStatus::max_iter_exceeded;

  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    result.iterations = iter;
    for (std::size_t m = 0; m < k; ++m) omega[m] = set_omega(sets[m], coeff, f, true);

    std::size_t toward = 0;
    std::size_t away = k;
    double mean = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      if (omega[m] > omega[toward]) toward = m;
      if (x[m] > 0.0) {
        mean += x[m] * omega[m];
        if (away == k || omega[m] < omega[away]) away = m;
      }
    }
    const double pairwise_gap = omega[toward] - omega[away];
    if (pairwise_gap <= options.tol * mean || toward == away) {
      result.status = SolveStatus::converged;
      break;
    }

    // Exact line search along d = 1_toward - 1_away for step in [0, x_away].
    std::vector<double> d(n, 0.0);
    for (LinkId e : sets[toward]) d[e] += 1.0;
    for (LinkId e : sets[away]) d[e] -= 1.0;
    auto slope = [&](double step) {
      double s = 0.0;
      for (std::size_t e = 0; e < n; ++e) {
        if (d[e] == 0.0) continue;
        const double fe = f[e] + step * d[e];
        if (fe <= 0.0) return std::numeric_limits<double>::infinity();
        s -= coeff[e] * d[e] / (fe * fe);
      }
      return s;
    };
    const double max_step = x[away];
    double step = max_step;
    if (slope(max_step) > 0.0) {
      double lo = 0.0;
      double hi = max_step;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (slope(mid) > 0.0 ? hi : lo) = mid;
      }
      step = lo;
    }
    if (step <= 0.0) {
      result.status = SolveStatus::converged;
      break;
    }
    x[toward] += step;
    x[away] = step == max_step ? 0.0 : x[away] - step;
    for (std::size_t e = 0; e < n; ++e) f[e] += step * d[e];
    if (iter % 512 == 511) refresh_frequencies(result.policy, n);

    result.objective_trace.push_back(objective(coeff, f));
  }

  refresh_frequencies(result.policy, n);
  result.peak_age = peak_age_of(f, net);
  result.certificate = certify(result.policy, net, family, options.tol);
  return result;
}

FrequencyVector water_fill(std::span<const double> coeff, std::size_t max_active,
                           double* multiplier, double tol) {
  const std::size_t n = coeff.size();
  if (max_active == 0) throw Error(Errc::invalid_argument, "K must be at least 1");
  for (double c : coeff) {
    if (!(c > 0.0)) throw Error(Errc::invalid_argument, "water-filling coefficients must be positive");
  }
  FrequencyVector f(n, 1.0);
  if (max_active >= n) {
    if (multiplier) *multiplier = 0.0;
    return f;
  }
  const double target = static_cast<double>(max_active);
  auto total = [&](double nu) {
    double s = 0.0;
    for (double c : coeff) s += std::min(1.0, std::sqrt(c / nu));
    return s;
  };
  // At nu = min c every link is capped (sum = n > K); at the uncapped
  // solution nu = (sum sqrt c / K)^2 the sum is at most K.
  double lo = *std::min_element(coeff.begin(), coeff.end());
  double root_sum = 0.0;
  for (double c : coeff) root_sum += std::sqrt(c);
  double hi = (root_sum / target) * (root_sum / target);
  if (hi < lo) hi = lo;
  for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double mid_arith = 0.5 * (lo + hi);
    const double probe = (hi / lo > 4.0) ? mid : mid_arith;
    (total(probe) > target ? lo : hi) = probe;
  }
  const double nu = hi;
  for (std::size_t e = 0; e < n; ++e) f[e] = std::min(1.0, std::sqrt(coeff[e] / nu));
  if (multiplier) *multiplier = nu;
  return f;
}

KLinkSolution solve_klink(const NetworkSpec& net, std::size_t max_active, double tol) {
  KLinkSolution sol;
  const auto coeff = net.effective_weights();
  sol.f = water_fill(coeff, max_active, &sol.multiplier, tol);
  sol.peak_age = peak_age_of(sol.f, net);
  return sol;
}

SchedulePolicy klink_policy(std::span<const double> f) {
  const std::size_t n = f.size();
  double sum = 0.0;
  for (double v : f) {
    if (!(v >= 0.0 && v <= 1.0 + 1e-12)) throw Error(Errc::invalid_argument, "frequency outside [0, 1]");
    sum += std::min(v, 1.0);
  }
  // Links occupy consecutive intervals of length f_e on [0, sum); a single
  // uniform offset u selects every link whose interval holds u + j.
  std::vector<double> start(n + 1, 0.0);
  for (std::size_t e = 0; e < n; ++e) start[e + 1] = start[e] + std::min(f[e], 1.0);
  std::vector<double> cuts{0.0, 1.0};
  for (double s : start) {
    const double frac = s - std::floor(s);
    cuts.push_back(frac);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
             cuts.end());

  SchedulePolicy policy;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = cuts[i + 1] - cuts[i];
    if (width <= 0.0) continue;
    const double u = 0.5 * (cuts[i] + cuts[i + 1]);
    ActivationSet m;
    for (std::size_t e = 0; e < n; ++e) {
      if (start[e + 1] <= start[e]) continue;
      // smallest point u + j >= start[e]
      const double j = std::ceil(start[e] - u);
      if (u + j < start[e + 1]) m.push_back(e);
    }
    auto it = std::find(policy.sets.begin(), policy.sets.end(), m);
    if (it != policy.sets.end()) {
      policy.x[static_cast<std::size_t>(it - policy.sets.begin())] += width;
    } else {
      policy.sets.push_back(std::move(m));
      policy.x.push_back(width);
    }
  }
  // Drop the empty set; its mass becomes idle time.
  for (std::size_t i = 0; i < policy.sets.size();) {
    if (policy.sets[i].empty()) {
      policy.sets.erase(policy.sets.begin() + static_cast<std::ptrdiff_t>(i));
      policy.x.erase(policy.x.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  refresh_frequencies(policy, n);
  return policy;
}

OptimalityCertificate certify(const SchedulePolicy& policy, const NetworkSpec& net,
                              const ActivationSetFamily& family, double tol) {
  const std::size_t n = net.size();
  SchedulePolicy p = policy;
  refresh_frequencies(p, n);
  const auto coeff = net.effective_weights();

  OptimalityCertificate cert;
  const std::size_t k = p.sets.size();
  cert.omega_weights.resize(k);
  double mass = 0.0;
  double weighted = 0.0;
  bool nonnegative = true;
  for (std::size_t m = 0; m < k; ++m) {
    cert.omega_weights[m] = set_omega(p.sets[m], coeff, p.f, false);
    if (std::isinf(cert.omega_weights[m])) cert.unbounded = true;
    if (p.x[m] < -tol) nonnegative = false;
    if (p.x[m] > 0.0) {
      mass += p.x[m];
      weighted += p.x[m] * cert.omega_weights[m];
    }
  }
  cert.conditions.on_simplex = nonnegative && std::abs(mass - 1.0) <= tol;
  for (std::size_t e = 0; e < n; ++e) {
    if (!(p.f[e] > 0.0)) cert.unbounded = true;
  }
  if (cert.unbounded) {
    cert.omega = std::numeric_limits<double>::infinity();
    cert.gap = std::numeric_limits<double>::infinity();
    return cert;
  }
  cert.omega = mass > 0.0 ? weighted / mass : 0.0;
  const double max_omega = std::max(
      family_max_omega(family, coeff, p.f),
      k ? *std::max_element(cert.omega_weights.begin(), cert.omega_weights.end()) : 0.0);
  cert.gap = std::max(0.0, max_omega - weighted);

  const double slack = tol * cert.omega;
  cert.conditions.support_equalised = true;
  cert.conditions.off_support_bounded = max_omega <= cert.omega + slack;
  for (std::size_t m = 0; m < k; ++m) {
    if (p.x[m] > tol && std::abs(cert.omega_weights[m] - cert.omega) > slack) {
      cert.conditions.support_equalised = false;
    }
  }
  return cert;
}

OptimalityCertificate certify(const SchedulePolicy& policy, const NetworkSpec& net, double tol) {
  return certify(policy, net, ActivationSetFamily::explicit_sets(net.size(), policy.sets), tol);
}

AgePair stationary_age_analytic(double p) {
  if (!(p > 0.0)) throw Error(Errc::unbounded_age, "success probability is zero");
  if (p > 1.0) throw Error(Errc::invalid_argument, "success probability above one");
  return {1.0 / p, 1.0 / p};
}

}  // namespace freshnet
