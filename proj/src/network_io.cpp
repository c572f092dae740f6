#include "freshnet/network_io.hpp"

#include <cmath>
#include <fstream>

#include "freshnet/error.hpp"

namespace freshnet {

using nlohmann::json;

std::vector<double> good_bad_channels(std::size_t links, double good, double bad, std::size_t n_bad) {
  if (n_bad > links) throw Error(Errc::invalid_argument, "more bad links than links");
  std::vector<double> g(links, good);
  for (std::size_t e = 0; e < n_bad; ++e) g[e] = bad;
  return g;
}

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::parse_error, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw Error(Errc::parse_error, std::string("field '") + key + "': " + ex.what());
  }
}

std::size_t link_count(const json& j) {
  if (j.contains("links")) return field<std::size_t>(j, "links");
  if (j.contains("gamma") && j["gamma"].is_array()) return j["gamma"].size();
  if (j.contains("weights") && j["weights"].is_array()) return j["weights"].size();
  const auto& inter = j.value("interference", json::object());
  if (inter.value("kind", inter.value("type", "")) == "single-hop" && inter.contains("edges")) return inter["edges"].size();
  throw Error(Errc::parse_error, "cannot determine the number of links");
}

std::vector<double> parse_gamma(const json& g, std::size_t n) {
  if (g.is_array()) {
    auto v = g.get<std::vector<double>>();
    if (v.size() != n) throw Error(Errc::parse_error, "gamma has the wrong length");
    return v;
  }
  if (g.is_number()) return std::vector<double>(n, g.get<double>());
  if (g.is_object()) {
    const double good = field<double>(g, "good");
    const double bad = field<double>(g, "bad");
    std::size_t n_bad = 0;
    if (g.contains("n_bad")) {
      n_bad = field<std::size_t>(g, "n_bad");
    } else {
      const double theta = field<double>(g, "theta");
      if (!(theta >= 0.0 && theta <= 1.0)) throw Error(Errc::parse_error, "theta must be in [0, 1]");
      n_bad = static_cast<std::size_t>(std::lround(theta * static_cast<double>(n)));
    }
    if (n_bad > n) throw Error(Errc::parse_error, "n_bad exceeds the number of links");
    return good_bad_channels(n, good, bad, n_bad);
  }
  throw Error(Errc::parse_error, "unrecognised gamma");
}

ActivationSetFamily parse_family(const json& inter, std::size_t n) {
  // "type" is accepted as an alias of "kind"
  const auto type = inter.contains("kind") ? field<std::string>(inter, "kind") : field<std::string>(inter, "type");
  if (type == "k-link") return ActivationSetFamily::k_link(n, field<std::size_t>(inter, "K"));
  if (type == "explicit") {
    return ActivationSetFamily::explicit_sets(n, field<std::vector<ActivationSet>>(inter, "sets"));
  }
  if (type == "single-hop") {
    std::vector<GraphEdge> edges;
    for (const auto& e : field<std::vector<std::vector<std::size_t>>>(inter, "edges")) {
      if (e.size() != 2) throw Error(Errc::parse_error, "an edge needs two endpoints");
      edges.push_back({e[0], e[1]});
    }
    if (edges.size() != n) throw Error(Errc::parse_error, "single-hop networks have one link per edge");
    return ActivationSetFamily::single_hop(std::move(edges));
  }
  throw Error(Errc::parse_error, "unknown interference type '" + type + "'");
}

}  // namespace

NetworkFile parse_network(const json& j) {
  if (!j.is_object()) throw Error(Errc::parse_error, "network description must be an object");
  const std::size_t n = link_count(j);
  if (n == 0) throw Error(Errc::parse_error, "network has no links");
  std::vector<double> weights(n, 1.0);
  if (j.contains("weights") && !(j["weights"].is_string() && j["weights"] == "uniform")) {
    weights = field<std::vector<double>>(j, "weights");
    if (weights.size() != n) throw Error(Errc::parse_error, "weights have the wrong length");
  }
  const auto gamma = parse_gamma(j.value("gamma", json(1.0)), n);
  const auto family = parse_family(j.value("interference", json{{"kind", "k-link"}, {"K", 1}}), n);
  try {
    return {NetworkSpec(weights, gamma), family};
  } catch (const Error& ex) {
    throw Error(Errc::parse_error, ex.what());
  }
}

NetworkFile load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path);
  try {
    return parse_network(json::parse(in));
  } catch (const json::parse_error& ex) {
    throw Error(Errc::parse_error, path + ": " + ex.what());
  }
}

json to_json(const NetworkSpec& net, const ActivationSetFamily& family) {
  json j;
  j["links"] = net.size();
  j["weights"] = std::vector<double>(net.raw_weights().begin(), net.raw_weights().end());
  j["gamma"] = std::vector<double>(net.gammas().begin(), net.gammas().end());
  switch (family.kind()) {
    case FamilyKind::k_link:
      j["interference"] = {{"kind", "k-link"}, {"K", family.max_active()}};
      break;
    case FamilyKind::explicit_list:
      j["interference"] = {{"kind", "explicit"}, {"sets", family.listed_sets()}};
      break;
    case FamilyKind::single_hop: {
      json edges = json::array();
      for (const auto& e : family.edges()) edges.push_back({e.u, e.v});
      j["interference"] = {{"kind", "single-hop"}, {"edges", edges}};
      break;
    }
  }
  return j;
}

}  // namespace freshnet
