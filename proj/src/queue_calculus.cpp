#include "freshnet/queue_calculus.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "freshnet/error.hpp"
#include "freshnet/numeric.hpp"

namespace freshnet {

namespace {

void check_mu(double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw Error(Errc::invalid_argument, "service rate must be in (0, 1]");
}

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(Errc::invalid_argument, "occupancy must be in (0, 1)");
}

// log(1 - a) with log(0) = -inf, which every MGF here maps to P(X = 0) = 0.
double log1m(double a) { return a >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-a); }

double safe_exp(double s) { return std::isinf(s) ? 0.0 : std::exp(s); }

// Root of g on (0, 1] with g(0) = 0, g < 0 just above zero and g(1) >= 0.
// The scan start shrinks with the distance from instability so that the
// negative region is never stepped over.
template <class G>
double nontrivial_unit_root(G&& g, double slope_at_zero) {
  double delta = std::min(1e-9, 1e-3 * std::abs(slope_at_zero));
  delta = std::max(delta, 1e-300);
  return numeric::nontrivial_root(g, 1.0, delta).x;
}

}  // namespace

ArrivalProcess ArrivalProcess::bernoulli(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error(Errc::invalid_argument, "bernoulli rate must be in (0, 1]");
  return {ArrivalKind::bernoulli, lambda, 1};
}

ArrivalProcess ArrivalProcess::periodic(int period) {
  if (period < 1) throw Error(Errc::invalid_argument, "period must be at least 1");
  return {ArrivalKind::periodic, 1.0 / period, period};
}

double ArrivalProcess::mgf(double s) const {
  const double z = safe_exp(s);
  if (kind == ArrivalKind::periodic) return std::pow(z, period);
  return lambda * z / (1.0 - (1.0 - lambda) * z);
}

double alpha_star(const Mgf& mgf, double lambda, double mu, double tol) {
  check_mu(mu);
  if (!(lambda > 0.0) || lambda >= mu) throw Error(Errc::unstable_queue, "arrival rate must be below service rate");
  auto g = [&](double a) { return a - mu + mu * mgf(log1m(a)); };
  const double hi = std::min(mu, 1.0);
  if (g(hi) < 0.0) throw Error(Errc::no_bracket, "fixed point not bracketed");
  if (g(hi) == 0.0 && mu >= 1.0) return 1.0;
  // g'(0) = 1 - mu / lambda
  const double delta = std::max(1e-300, std::min(1e-9 * lambda, 1e-3 * (mu / lambda - 1.0) * lambda));
  return numeric::nontrivial_root(g, hi, delta, tol).x;
}

double alpha_star(const ArrivalProcess& arrivals, double mu, double tol) {
  return alpha_star([&](double s) { return arrivals.mgf(s); }, arrivals.rate(), mu, tol);
}

AgePair gber1_age(const ArrivalProcess& arrivals, double mu) {
  const double lambda = arrivals.rate();
  const double a = alpha_star(arrivals, mu);
  const double z = 1.0 - a;
  double second = 0.0;  // M''(0) = E[X^2]
  double slope = 0.0;   // M'(log z)
  if (arrivals.kind == ArrivalKind::bernoulli) {
    second = (2.0 - lambda) / (lambda * lambda);
    const double den = 1.0 - (1.0 - lambda) * z;
    slope = lambda * z / (den * den);
  } else {
    const double d = arrivals.period;
    second = d * d;
    slope = d * std::pow(z, arrivals.period);
  }
  return {1.0 / a + 1.0 / lambda, lambda * (0.5 * second + slope / a) + 1.0 / mu + 0.5};
}

AgePair gber1_age(const Mgf& mgf, double lambda, double mu) {
  const double a = alpha_star(mgf, lambda, mu);
  const double s = log1m(a);
  // Central differences. The second derivative uses a wider step than the
  // first: with h = 1e-6 the cancellation error in M(h) - 2 M(0) + M(-h)
  // would be of order 1e-4.
  constexpr double h1 = 1e-6;
  constexpr double h2 = 1e-4;
  const double second = (mgf(h2) - 2.0 * mgf(0.0) + mgf(-h2)) / (h2 * h2);
  const double slope = std::isinf(s) ? 0.0 : (mgf(s + h1) - mgf(s - h1)) / (2.0 * h1);
  return {1.0 / a + 1.0 / lambda, lambda * (0.5 * second + slope / a) + 1.0 / mu + 0.5};
}

AgePair berber1_age(double f, double gamma, double rho) {
  check_rho(rho);
  const double mu = gamma * f;
  check_mu(mu);
  if (mu == 1.0) return {1.0 + 1.0 / rho, 1.0 + 1.0 / rho};
  const double b = rho / (1.0 - rho);
  const double peak = (1.0 / mu) * (1.0 / rho + 1.0 / (1.0 - rho)) - b;
  const double ave = (1.0 / mu) * (1.0 + 1.0 / rho + rho * b) - rho * b;
  return {peak, ave};
}

double dber1_sigma(double mu, double period) {
  check_mu(mu);
  if (!(period * mu > 1.0)) throw Error(Errc::unstable_queue, "D/Ber/1 needs D * mu > 1");
  if (mu == 1.0) return 1.0;
  auto g = [&](double s) { return s - 1.0 + std::pow(1.0 - mu * s, period); };
  return nontrivial_unit_root(g, 1.0 - period * mu);
}

namespace {

AgePair dber1_from(double mu, double period) {
  const double sigma = dber1_sigma(mu, period);
  const double rho = 1.0 / (period * mu);
  return {(1.0 / mu) * (1.0 / rho + 1.0 / sigma), (1.0 / mu) * (0.5 / rho + 1.0 / sigma) + 0.5};
}

}  // namespace

AgePair dber1_age(double f, double gamma, int period) {
  if (period < 1) throw Error(Errc::invalid_argument, "period must be at least 1");
  return dber1_from(gamma * f, period);
}

AgePair dber1_age_at_rho(double mu, double rho) {
  check_rho(rho);
  check_mu(mu);
  return dber1_from(mu, 1.0 / (rho * mu));
}

double sigma_hat(double rho) {
  check_rho(rho);
  auto g = [&](double s) { return s - 1.0 + std::exp(-s / rho); };
  return nontrivial_unit_root(g, 1.0 - 1.0 / rho);
}

AgePair mm1_bound(double mu, double rho) {
  check_mu(mu);
  check_rho(rho);
  return {(1.0 / mu) * (1.0 / rho + 1.0 / (1.0 - rho)),
          (1.0 / mu) * (1.0 + 1.0 / rho + rho * rho / (1.0 - rho))};
}

AgePair dm1_bound(double mu, double rho) {
  check_mu(mu);
  const double s = sigma_hat(rho);
  return {(1.0 / mu) * (1.0 / rho + 1.0 / s), (1.0 / mu) * (0.5 / rho + 1.0 / s) + 0.5};
}

const char* to_string(RhoKind kind) {
  switch (kind) {
    case RhoKind::bernoulli_peak: return "bernoulli-peak";
    case RhoKind::bernoulli_average: return "bernoulli-ave";
    case RhoKind::periodic_peak: return "periodic-peak";
    case RhoKind::periodic_average: return "periodic-ave";
  }
  return "?";
}

RhoKind rho_kind(ArrivalKind arrivals, Metric metric) {
  if (arrivals == ArrivalKind::bernoulli) {
    return metric == Metric::peak ? RhoKind::bernoulli_peak : RhoKind::bernoulli_average;
  }
  return metric == Metric::peak ? RhoKind::periodic_peak : RhoKind::periodic_average;
}

namespace {

constexpr double kRhoEdge = 1e-4;

double compute_optimal_rho(RhoKind kind) {
  switch (kind) {
    case RhoKind::bernoulli_peak:
      return 0.5;
    case RhoKind::bernoulli_average: {
      // stationary point of 1 + 1/rho + rho^2/(1 - rho)
      auto q = [](double r) { return -(((r - 2.0) * r + 1.0) * r * r - 2.0 * r + 1.0); };
      return numeric::bisect(q, 0.0, 1.0).x;
    }
    case RhoKind::periodic_peak:
      return numeric::scan_then_golden([](double r) { return 1.0 / r + 1.0 / sigma_hat(r); },
                                       0.01, 0.99, 200, 1e-11).x;
    case RhoKind::periodic_average:
      return numeric::scan_then_golden([](double r) { return 0.5 / r + 1.0 / sigma_hat(r); },
                                       0.01, 0.99, 200, 1e-11).x;
  }
  return 0.5;
}

}  // namespace

double optimal_rho(RhoKind kind) {
  static const double table[4] = {
      compute_optimal_rho(RhoKind::bernoulli_peak), compute_optimal_rho(RhoKind::bernoulli_average),
      compute_optimal_rho(RhoKind::periodic_peak), compute_optimal_rho(RhoKind::periodic_average)};
  return table[static_cast<int>(kind)];
}

double queue_age(RhoKind kind, double mu, double rho) {
  switch (kind) {
    case RhoKind::bernoulli_peak: return berber1_age(mu, 1.0, rho).peak;
    case RhoKind::bernoulli_average: return berber1_age(mu, 1.0, rho).average;
    case RhoKind::periodic_peak: return dber1_age_at_rho(mu, rho).peak;
    case RhoKind::periodic_average: return dber1_age_at_rho(mu, rho).average;
  }
  return 0.0;
}

double delta_gap(RhoKind kind, double mu) {
  check_mu(mu);
  auto age = [&](double r) { return queue_age(kind, mu, r); };
  const auto best = numeric::scan_then_golden(age, kRhoEdge, 1.0 - kRhoEdge, 400, 1e-12);
  return std::max(0.0, age(optimal_rho(kind)) - best.value);
}

double FactorTable::operator[](RhoKind kind) const {
  switch (kind) {
    case RhoKind::bernoulli_peak: return bernoulli_peak;
    case RhoKind::bernoulli_average: return bernoulli_average;
    case RhoKind::periodic_peak: return periodic_peak;
    case RhoKind::periodic_average: return periodic_average;
  }
  return 0.0;
}

FactorTable factor_bounds() {
  FactorTable t;
  const double rp = optimal_rho(RhoKind::bernoulli_peak);
  t.bernoulli_peak = 1.0 / rp + 1.0 / (1.0 - rp);
  const double ra = optimal_rho(RhoKind::bernoulli_average);
  t.bernoulli_average = 2.0 * (1.0 + 1.0 / ra + ra * ra / (1.0 - ra));
  const double dp = optimal_rho(RhoKind::periodic_peak);
  t.periodic_peak = 1.0 / sigma_hat(dp) + 1.0 / dp;
  const double da = optimal_rho(RhoKind::periodic_average);
  t.periodic_average = 2.0 * (0.5 / da + 1.0 / sigma_hat(da));
  return t;
}

}  // namespace freshnet
