#pragma once

// JSON network description:
//
//   {
//     "links": 4,
//     "weights": [1, 1, 2, 1] | "uniform",
//     "gamma": [0.9, 0.5, 0.3, 0.7] | {"good": 0.9, "bad": 0.1, "theta": 0.2}
//                                   | {"good": 0.9, "bad": 0.1, "n_bad": 7},
//     "interference": {"kind": "k-link", "K": 1}
//                   | {"kind": "explicit", "sets": [[0, 1], [2], [3]]}
//                   | {"kind": "single-hop", "edges": [[0, 1], [1, 2], [2, 3]]}
//   }
//
// With a good/bad channel pattern the first n_bad = round(theta * links)
// links get the bad channel.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "freshnet/net_model.hpp"

namespace freshnet {

struct NetworkFile {
  NetworkSpec net;
  ActivationSetFamily family;
};

NetworkFile parse_network(const nlohmann::json& j);
NetworkFile load_network(const std::string& path);
nlohmann::json to_json(const NetworkSpec& net, const ActivationSetFamily& family);

/// gamma vector with n_bad bad links first.
std::vector<double> good_bad_channels(std::size_t links, double good, double bad, std::size_t n_bad);

}  // namespace freshnet
