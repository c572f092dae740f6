#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "freshnet/error.hpp"
#include "freshnet/experiments.hpp"

using namespace freshnet;

namespace {

bool all_pass(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
    ok = ok && c.passed;
  }
  return ok;
}

}  // namespace

TEST_CASE("occupancy curves") {
  const auto rows = experiment_fig2();
  CHECK(rows.size() == 19);
  CHECK(rows.front().rho == doctest::Approx(0.05));
  CHECK(rows[9].berber.peak == doctest::Approx(berber1_age(0.8, 1.0, 0.5).peak));
  all_pass(check_fig2(rows));
  std::ostringstream out;
  write_csv(out, 0.8, rows);
  CHECK(out.str().find('\n') != std::string::npos);
}

TEST_CASE("queue tables") {
  const auto rho = queue_table("rho", 0.8);
  REQUIRE_FALSE(rho.empty());
  for (const auto& r : rho) {
    CHECK(r.delta_peak >= -1e-12);
    CHECK(r.delta_ave >= -1e-12);
    CHECK(r.peak_dt <= r.peak_ct_bound * (1.0 + 1e-12));
  }
  const auto mu = queue_table("mu");
  for (const auto& r : mu) {
    CHECK(r.delta_peak < 1.0);
    CHECK(r.delta_ave < 1.0);
  }
  CHECK_THROWS_AS(queue_table("theta"), Error);
}

TEST_CASE("small theta sweep") {
  ThetaSweepSpec spec;
  spec.links = 10;
  spec.max_active = {1, 5};  // K divides N, so round robin serves every link equally
  spec.gamma_bad = {0.1};
  spec.thetas = {0.0, 0.5, 1.0};
  spec.horizon = 100'000;
  spec.reps = 4;
  const auto rows = experiment_fig3_4(spec);
  CHECK(rows.size() == 2 * 3 * 3);
  for (const auto& r : rows) {
    if (r.policy == "optimal") CHECK(r.peak.mean == doctest::Approx(r.analytic_peak).epsilon(0.02));
  }
  all_pass(check_fig3_4(rows));
}

TEST_CASE("sweep spec from json") {
  const auto s = ThetaSweepSpec::from_json(nlohmann::json::parse(
      R"({"N": 20, "K": 4, "gamma_good": 0.8, "gamma_bad": [0.3], "theta": [0, 0.25], "horizon": 5000, "reps": 3, "seed": 9})"));
  CHECK(s.links == 20);
  CHECK(s.max_active == std::vector<std::size_t>{4});
  CHECK(s.gamma_bad == std::vector<double>{0.3});
  CHECK(s.thetas.size() == 2);
  CHECK(s.horizon == 5000);
  CHECK(s.reps == 3);
  CHECK(s.seed == 9);
  CHECK_THROWS_AS(ThetaSweepSpec::from_json(nlohmann::json::parse(R"({"theta": [1.5]})")), Error);
}

TEST_CASE("buffered sources against K") {
  const auto rows = experiment_fig6(buffered_cases(), 1, 3);
  CHECK(rows.size() == 3 * 3);
  for (const auto& r : rows) {
    CHECK(r.gap() >= -1e-9);
    CHECK(r.gap() <= 1.0);
  }
  all_pass(check_fig6(rows));
}
