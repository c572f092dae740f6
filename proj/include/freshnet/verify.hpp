#pragma once

// Self-check matrix run by `freshnet verify`, plus the random instance
// generator it shares with the test suites.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "freshnet/experiments.hpp"
#include "freshnet/network_io.hpp"

namespace freshnet {

/// Random network with 2..max_links links and a random family: K-link,
/// explicit list (every link covered) or single-hop graph.
NetworkFile random_network(std::mt19937_64& rng, std::size_t max_links = 8);

std::vector<CheckResult> verify_all(std::uint64_t seed);

void print_matrix(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace freshnet
