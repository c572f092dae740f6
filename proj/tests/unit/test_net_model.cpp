#include <doctest.h>

#include <algorithm>
#include <random>

#include "freshnet/error.hpp"
#include "freshnet/net_model.hpp"
#include "freshnet/verify.hpp"

using namespace freshnet;

namespace {

std::vector<ActivationSet> sorted_sets(const ActivationSetFamily& f) {
  auto s = f.listed_sets();
  std::sort(s.begin(), s.end());
  return s;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("network weights are normalised and raw weights kept") {
  const NetworkSpec net({1.0, 3.0}, {0.5, 1.0});
  CHECK(net.weight(0) == doctest::Approx(0.25));
  CHECK(net.weight(1) == doctest::Approx(0.75));
  CHECK(net.raw_weight(1) == 3.0);
  CHECK(net.effective_weights()[0] == doctest::Approx(0.5));
}

TEST_CASE("network rejects bad parameters") {
  CHECK(code_of([] { NetworkSpec({1.0, 0.0}, {0.5, 0.5}); }) == Errc::invalid_argument);
  CHECK(code_of([] { NetworkSpec({1.0}, {0.0}); }) == Errc::invalid_argument);
  CHECK(code_of([] { NetworkSpec({1.0}, {1.5}); }) == Errc::invalid_argument);
  CHECK(code_of([] { NetworkSpec({1.0, 1.0}, {0.5}); }) == Errc::invalid_argument);
  CHECK(code_of([] { ActivationSetFamily::explicit_sets(2, {{0, 2}}); }) == Errc::unknown_link);
}

TEST_CASE("maximal sets") {
  SUBCASE("only the superset survives") {
    const auto f = ActivationSetFamily::explicit_sets(2, {{0}, {1}, {0, 1}});
    CHECK(sorted_sets(maximal_sets(f)) == std::vector<ActivationSet>{{0, 1}});
  }
  SUBCASE("one-link family over three links") {
    const auto f = ActivationSetFamily::k_link(3, 1);
    CHECK(sorted_sets(maximal_sets(f)) == std::vector<ActivationSet>{{0}, {1}, {2}});
  }
  SUBCASE("adjacent links conflict") {
    const auto f = ActivationSetFamily::single_hop({{0, 1}, {1, 2}});
    CHECK(sorted_sets(maximal_sets(f)) == std::vector<ActivationSet>{{0}, {1}});
  }
  SUBCASE("K-link enumeration is capped") {
    const auto f = ActivationSetFamily::k_link(40, 20);
    CHECK(code_of([&] { maximal_sets(f, 1000); }) == Errc::enumeration_cap_exceeded);
  }
}

TEST_CASE("maximal matchings") {
  CHECK(sorted_sets(matchings_of_graph({{0, 1}, {1, 2}, {0, 2}})) == std::vector<ActivationSet>{{0}, {1}, {2}});
  CHECK(sorted_sets(matchings_of_graph({{0, 1}, {1, 2}, {2, 3}})) == std::vector<ActivationSet>{{0, 2}, {1}});
  CHECK(sorted_sets(matchings_of_graph({{0, 1}, {1, 2}, {2, 3}, {3, 0}})) ==
        std::vector<ActivationSet>{{0, 2}, {1, 3}});

  std::vector<GraphEdge> big;
  for (std::size_t i = 0; i < 21; ++i) big.push_back({i, i + 1});
  CHECK(code_of([&] { matchings_of_graph(big); }) == Errc::enumeration_cap_exceeded);
}

TEST_CASE("membership is downward closed") {
  const auto ex = ActivationSetFamily::explicit_sets(3, {{0, 1}, {2}});
  CHECK(ex.contains(std::vector<LinkId>{}));
  CHECK(ex.contains(std::vector<LinkId>{1}));
  CHECK(ex.contains(std::vector<LinkId>{0, 1}));
  CHECK_FALSE(ex.contains(std::vector<LinkId>{1, 2}));

  const auto k = ActivationSetFamily::k_link(4, 2);
  CHECK(k.contains(std::vector<LinkId>{0, 3}));
  CHECK_FALSE(k.contains(std::vector<LinkId>{0, 1, 3}));

  const auto g = ActivationSetFamily::single_hop({{0, 1}, {1, 2}, {2, 3}});
  CHECK(g.contains(std::vector<LinkId>{0, 2}));
  CHECK_FALSE(g.contains(std::vector<LinkId>{0, 1}));
}

TEST_CASE("incidence matrix applies x") {
  const std::vector<ActivationSet> sets{{0, 1}, {2}};
  const IncidenceMatrix m(3, sets);
  CHECK(m(0, 0));
  CHECK_FALSE(m(2, 0));
  const auto f = m.apply(std::vector<double>{0.25, 0.5});
  CHECK(f == FrequencyVector{0.25, 0.25, 0.5});
}

TEST_CASE("binomial saturates") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(50, 10) == 10272278170ULL);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(200, 100) == static_cast<std::size_t>(-1));
}

TEST_CASE("property: maximal sets are idempotent, cover the family and are all members") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    const auto nf = random_network(rng, 8);
    const auto once = maximal_sets(nf.family);
    const auto twice = maximal_sets(once);
    CHECK(sorted_sets(once) == sorted_sets(twice));
    std::vector<char> covered(nf.net.size(), 0);
    for (const auto& m : once.listed_sets()) {
      CHECK(nf.family.contains(m));
      for (LinkId e : m) covered[e] = 1;
      // no single link can be added
      for (LinkId e = 0; e < nf.net.size(); ++e) {
        if (std::binary_search(m.begin(), m.end(), e)) continue;
        auto bigger = m;
        bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), e), e);
        CHECK_FALSE(nf.family.contains(bigger));
      }
    }
    CHECK(std::all_of(covered.begin(), covered.end(), [](char c) { return c == 1; }));
  }
}
