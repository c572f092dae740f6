#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>

#include "freshnet/error.hpp"
#include "freshnet/queue_calculus.hpp"

using namespace freshnet;

namespace {

// Plain FIFO queue, written independently of the network simulator: a packet
// made in slot t can leave from slot t + 1 on, service succeeds w.p. mu.
AgePair simulate_queue(double mu, double lambda, int period, std::uint64_t slots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::deque<std::uint64_t> q;
  std::uint64_t age = 1;
  double age_sum = 0.0, peak_sum = 0.0;
  std::uint64_t peaks = 0, counted = 0;
  const std::uint64_t warm = slots / 10;
  for (std::uint64_t t = 0; t < slots; ++t) {
    const bool on = t >= warm;
    if (on) age_sum += static_cast<double>(age), ++counted;
    std::uint64_t next = age + 1;
    if (!q.empty() && u(rng) < mu) {
      if (on) peak_sum += static_cast<double>(age), ++peaks;
      next = t + 1 - q.front();
      q.pop_front();
    }
    age = next;
    const bool arrive = period > 0 ? (t % static_cast<std::uint64_t>(period) == 0) : u(rng) < lambda;
    if (arrive) q.push_back(t);
  }
  return {peak_sum / static_cast<double>(peaks), age_sum / static_cast<double>(counted)};
}

double sigma_fixed_point(double rho) {
  double s = 1.0;
  for (int i = 0; i < 100000; ++i) s = 1.0 - std::exp(-s / rho);
  return s;
}

template <class F>
double grid_argmin(F&& g, double lo, double hi) {
  double best = 1e300, arg = lo;
  for (int i = 1; i < 2'000'000; ++i) {
    const double x = lo + (hi - lo) * i / 2'000'000.0;
    const double v = g(x);
    if (v < best) best = v, arg = x;
  }
  return arg;
}

}  // namespace

TEST_CASE("system-time rate") {
  CHECK(alpha_star(ArrivalProcess::bernoulli(0.25), 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double mu = u(rng), lambda = mu * u(rng);
    const double closed = (mu - lambda) / (1.0 - lambda);
    CHECK(std::abs(alpha_star(ArrivalProcess::bernoulli(lambda), mu) - closed) <= 1e-9);
  }
  CHECK(alpha_star(ArrivalProcess::bernoulli(0.4), 0.8) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(alpha_star(ArrivalProcess::periodic(2), 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(alpha_star(ArrivalProcess::bernoulli(0.5), 0.5), Error);
}

TEST_CASE("Ber/Ber/1 closed form") {
  const auto a = berber1_age(0.5, 1.0, 0.5);
  CHECK(a.peak == doctest::Approx(7.0));
  CHECK(a.average == doctest::Approx(6.5));
  const auto one = berber1_age(1.0, 1.0, 0.25);
  CHECK(one.peak == doctest::Approx(5.0));
  CHECK(berber1_age(0.5, 0.5, 0.5).peak == doctest::Approx(berber1_age(0.25, 1.0, 0.5).peak));
}

TEST_CASE("G/Ber/1 fixed point reproduces both closed forms") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 100; ++i) {
    const double mu = u(rng), rho = u(rng);
    const auto exact = berber1_age(mu, 1.0, rho);
    const auto g = gber1_age(ArrivalProcess::bernoulli(rho * mu), mu);
    CHECK(g.peak == doctest::Approx(exact.peak).epsilon(1e-9));
    CHECK(g.average == doctest::Approx(exact.average).epsilon(1e-9));
  }
  const auto arr = ArrivalProcess::periodic(4);
  const auto d = dber1_age(0.5, 1.0, 4);
  const auto viaf = gber1_age([&](double s) { return arr.mgf(s); }, 0.25, 0.5);
  CHECK(viaf.peak == doctest::Approx(d.peak).epsilon(1e-6));
  CHECK(viaf.average == doctest::Approx(d.average).epsilon(1e-5));
  CHECK(d.peak == doctest::Approx(6.1915).epsilon(1e-4));
  CHECK(gber1_age(ArrivalProcess::periodic(2), 1.0).peak == doctest::Approx(3.0));
  CHECK(dber1_age(1.0, 1.0, 2).peak == doctest::Approx(3.0));
}

TEST_CASE("D/Ber/1") {
  SUBCASE("sigma solves its equation") {
    for (double mu : {0.1, 0.3, 0.8}) {
      for (double D : {1.5 / mu, 3.0 / mu, 20.0}) {
        if (D * mu <= 1.0) continue;
        const double s = dber1_sigma(mu, D);
        CHECK(s > 0.0);
        CHECK(std::abs(s - 1.0 + std::pow(1.0 - mu * s, D)) <= 1e-10);
      }
    }
  }
  SUBCASE("perfect server") { CHECK(dber1_sigma(1.0, 2.0) == 1.0); }
  SUBCASE("unstable") {
    try {
      dber1_sigma(0.5, 2.0);
      FAIL("expected unstable-queue");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unstable_queue);
    }
  }
  SUBCASE("integer and real period agree") {
    const auto a = dber1_age(0.5, 0.8, 5);
    const auto b = dber1_age_at_rho(0.4, 1.0 / (5 * 0.4));
    CHECK(a.peak == doctest::Approx(b.peak));
    CHECK(a.average == doctest::Approx(b.average));
  }
}

TEST_CASE("closed forms match a direct queue simulation") {
  constexpr std::uint64_t slots = 4'000'000;
  SUBCASE("Ber/Ber/1") {
    const auto sim = simulate_queue(0.5, 0.25, 0, slots, 1);
    const auto th = berber1_age(0.5, 1.0, 0.5);
    CHECK(sim.peak == doctest::Approx(th.peak).epsilon(0.01));
    CHECK(sim.average == doctest::Approx(th.average).epsilon(0.01));
  }
  SUBCASE("D/Ber/1") {
    const auto sim = simulate_queue(0.5, 0.0, 4, slots, 2);
    const auto th = dber1_age(0.5, 1.0, 4);
    CHECK(sim.peak == doctest::Approx(th.peak).epsilon(0.01));
    CHECK(sim.average == doctest::Approx(th.average).epsilon(0.01));
  }
  SUBCASE("D/Ber/1 with a slow server") {
    const auto sim = simulate_queue(0.2, 0.0, 9, slots, 3);
    const auto th = dber1_age(0.2, 1.0, 9);
    CHECK(sim.peak == doctest::Approx(th.peak).epsilon(0.01));
    CHECK(sim.average == doctest::Approx(th.average).epsilon(0.01));
  }
}

TEST_CASE("continuous-time curves bound the discrete ones") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double mu = u(rng), rho = u(rng);
    const auto d = berber1_age(mu, 1.0, rho);
    const auto c = mm1_bound(mu, rho);
    CHECK(d.peak <= c.peak);
    CHECK(d.average <= c.average);
  }
  for (double mu : {0.2, 0.5, 0.9}) {
    for (double rho : {0.1, 0.4, 0.8}) {
      const auto d = dber1_age_at_rho(mu, rho);
      const auto c = dm1_bound(mu, rho);
      CHECK(d.peak <= c.peak * (1.0 + 1e-12));
      CHECK(d.average <= c.average * (1.0 + 1e-12));
    }
  }
  CHECK(mm1_bound(1.0, 0.5).peak == doctest::Approx(4.0));
}

TEST_CASE("sigma-hat") {
  for (double rho : {0.2, 0.5, 0.8}) CHECK(sigma_hat(rho) == doctest::Approx(sigma_fixed_point(rho)).epsilon(1e-10));
}

TEST_CASE("universal occupancies minimise the continuous-time bounds") {
  const double bp = grid_argmin([](double r) { return 1.0 / r + 1.0 / (1.0 - r); }, 0.0, 1.0);
  const double ba = grid_argmin([](double r) { return 1.0 + 1.0 / r + r * r / (1.0 - r); }, 0.0, 1.0);
  CHECK(optimal_rho(RhoKind::bernoulli_peak) == doctest::Approx(bp).epsilon(1e-5));
  CHECK(optimal_rho(RhoKind::bernoulli_average) == doctest::Approx(ba).epsilon(1e-5));
  CHECK(optimal_rho(RhoKind::bernoulli_peak) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(optimal_rho(RhoKind::bernoulli_average) == doctest::Approx(0.5310).epsilon(1e-3));
  CHECK(optimal_rho(RhoKind::periodic_peak) == doctest::Approx(0.5951).epsilon(1e-3));
  CHECK(optimal_rho(RhoKind::periodic_average) == doctest::Approx(0.5169).epsilon(1e-3));
  const auto t = factor_bounds();
  CHECK(t.bernoulli_peak == doctest::Approx(4.0));
  const double fa = 2.0 * (1.0 + 1.0 / ba + ba * ba / (1.0 - ba));
  CHECK(t[RhoKind::bernoulli_average] == doctest::Approx(fa).epsilon(1e-6));
}

TEST_CASE("occupancy gap") {
  for (RhoKind k : {RhoKind::bernoulli_peak, RhoKind::bernoulli_average, RhoKind::periodic_peak,
                    RhoKind::periodic_average}) {
    CAPTURE(to_string(k));
    double prev = -1.0;
    for (double mu : {0.001, 0.01, 0.1, 0.3, 0.6, 0.9}) {
      const double d = delta_gap(k, mu);
      CHECK(d >= -1e-12);
      CHECK(d < 1.0);
      CHECK(d >= prev - 1e-9);
      prev = d;
    }
    CHECK(delta_gap(k, 0.001) < 0.01);
  }
}
