#pragma once

// Age of a single link fed by a discrete-time FIFO queue with Bernoulli
// service: the G/Ber/1 fixed point, the Ber/Ber/1 and D/Ber/1 closed forms,
// their continuous-time upper bounds, and the occupancy tables built on them.
//
// mu is the per-slot service probability gamma * f of the link.

#include <functional>

#include "freshnet/types.hpp"

namespace freshnet {

struct ArrivalProcess {
  ArrivalKind kind = ArrivalKind::bernoulli;
  double lambda = 0.0;  // bernoulli rate
  int period = 1;  // periodic inter-arrival time

  static ArrivalProcess bernoulli(double lambda);
  static ArrivalProcess periodic(int period);

  double rate() const { return kind == ArrivalKind::bernoulli ? lambda : 1.0 / period; }
  /// E[e^{sX}] for the inter-arrival time X (s <= 0).
  double mgf(double s) const;
};

using Mgf = std::function<double(double)>;

/// Geometric rate of the system time: root of a - mu + mu M(log(1 - a)) in
/// (0, min(mu, 1)].
double alpha_star(const Mgf& mgf, double lambda, double mu, double tol = 0.0);
double alpha_star(const ArrivalProcess& arrivals, double mu, double tol = 0.0);

/// Peak and average age of the G/Ber/1 queue. The analytic overload uses
/// exact MGF derivatives; the general one uses central differences.
AgePair gber1_age(const ArrivalProcess& arrivals, double mu);
AgePair gber1_age(const Mgf& mgf, double lambda, double mu);

/// Ber/Ber/1 with service gamma*f and occupancy rho.
AgePair berber1_age(double f, double gamma, double rho);

/// Nontrivial root of sigma = 1 - (1 - mu sigma)^D; D may be fractional.
double dber1_sigma(double mu, double period);

/// D/Ber/1 with integer period D.
AgePair dber1_age(double f, double gamma, int period);
/// D/Ber/1 with the period D = 1/(rho mu) taken as a real number.
AgePair dber1_age_at_rho(double mu, double rho);

/// Root of sigma = 1 - exp(-sigma / rho).
double sigma_hat(double rho);

AgePair mm1_bound(double mu, double rho);
AgePair dm1_bound(double mu, double rho);

enum class RhoKind { bernoulli_peak, bernoulli_average, periodic_peak, periodic_average };

const char* to_string(RhoKind kind);
RhoKind rho_kind(ArrivalKind arrivals, Metric metric);

/// Universal occupancy used by the separation policy.
double optimal_rho(RhoKind kind);

/// Age at the universal occupancy minus the age at the best occupancy for
/// this mu, using the exact discrete-time formulas.
double delta_gap(RhoKind kind, double mu);

/// Age at occupancy rho for the given kind (exact discrete-time formula).
double queue_age(RhoKind kind, double mu, double rho);

struct FactorTable {
  double bernoulli_peak = 0.0;
  double bernoulli_average = 0.0;
  double periodic_peak = 0.0;
  double periodic_average = 0.0;

  double operator[](RhoKind kind) const;
};

FactorTable factor_bounds();

}  // namespace freshnet
