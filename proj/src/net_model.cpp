#include "freshnet/net_model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "freshnet/error.hpp"

namespace freshnet {

namespace {

void normalize_set(ActivationSet& m) {
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
}

bool is_subset(const ActivationSet& small, const ActivationSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool is_matching(std::span<const LinkId> m, const std::vector<GraphEdge>& edges) {
  std::vector<std::size_t> nodes;
  nodes.reserve(2 * m.size());
  for (LinkId e : m) {
    nodes.push_back(edges[e].u);
    nodes.push_back(edges[e].v);
  }
  std::sort(nodes.begin(), nodes.end());
  return std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end();
}

void enumerate_subsets(std::size_t n, std::size_t k, std::vector<ActivationSet>& out) {
  ActivationSet cur(k);
  std::iota(cur.begin(), cur.end(), LinkId{0});
  if (k == 0) return;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
}

}  // namespace

NetworkSpec::NetworkSpec(std::vector<double> raw_weights, std::vector<double> gamma)
    : raw_weights_(std::move(raw_weights)), gamma_(std::move(gamma)) {
  if (raw_weights_.size() != gamma_.size()) {
    throw Error(Errc::invalid_argument, "weights and gamma differ in length");
  }
  if (gamma_.empty()) {
    throw Error(Errc::invalid_argument, "network has no links");
  }
  double total = 0.0;
  for (std::size_t e = 0; e < gamma_.size(); ++e) {
    if (!(raw_weights_[e] > 0.0)) {
      throw Error(Errc::invalid_argument, "link " + std::to_string(e) + " has non-positive weight");
    }
    if (!(gamma_[e] > 0.0 && gamma_[e] <= 1.0)) {
      throw Error(Errc::invalid_argument, "link " + std::to_string(e) + " has gamma outside (0, 1]");
    }
    total += raw_weights_[e];
  }
  weights_.resize(raw_weights_.size());
  for (std::size_t e = 0; e < weights_.size(); ++e) weights_[e] = raw_weights_[e] / total;
}

NetworkSpec NetworkSpec::uniform(std::vector<double> gamma) {
  std::vector<double> w(gamma.size(), 1.0);
  return NetworkSpec(std::move(w), std::move(gamma));
}

std::vector<double> NetworkSpec::effective_weights() const {
  std::vector<double> c(size());
  for (std::size_t e = 0; e < size(); ++e) c[e] = weights_[e] / gamma_[e];
  return c;
}

ActivationSetFamily ActivationSetFamily::explicit_sets(std::size_t num_links,
                                                       std::vector<ActivationSet> sets) {
  ActivationSetFamily fam;
  fam.kind_ = FamilyKind::explicit_list;
  fam.num_links_ = num_links;
  for (auto& m : sets) {
    normalize_set(m);
    if (m.empty()) continue;
    if (m.back() >= num_links) {
      throw Error(Errc::unknown_link, "activation set refers to link " + std::to_string(m.back()));
    }
    fam.sets_.push_back(std::move(m));
  }
  std::sort(fam.sets_.begin(), fam.sets_.end());
  fam.sets_.erase(std::unique(fam.sets_.begin(), fam.sets_.end()), fam.sets_.end());
  return fam;
}

ActivationSetFamily ActivationSetFamily::k_link(std::size_t num_links, std::size_t max_active) {
  if (max_active == 0) throw Error(Errc::invalid_argument, "K must be at least 1");
  ActivationSetFamily fam;
  fam.kind_ = FamilyKind::k_link;
  fam.num_links_ = num_links;
  fam.max_active_ = max_active;
  return fam;
}

ActivationSetFamily ActivationSetFamily::single_hop(std::vector<GraphEdge> edges) {
  ActivationSetFamily fam;
  fam.kind_ = FamilyKind::single_hop;
  fam.num_links_ = edges.size();
  for (const auto& ed : edges) {
    if (ed.u == ed.v) throw Error(Errc::invalid_argument, "self-loop in interference graph");
  }
  fam.edges_ = std::move(edges);
  return fam;
}

bool ActivationSetFamily::contains(std::span<const LinkId> m) const {
  for (LinkId e : m) {
    if (e >= num_links_) return false;
  }
  switch (kind_) {
    case FamilyKind::k_link:
      return m.size() <= max_active_;
    case FamilyKind::single_hop:
      return is_matching(m, edges_);
    case FamilyKind::explicit_list: {
      if (m.empty()) return true;
      ActivationSet s(m.begin(), m.end());
      normalize_set(s);
      if (s.size() != m.size()) return false;
      return std::any_of(sets_.begin(), sets_.end(),
                         [&](const ActivationSet& g) { return is_subset(s, g); });
    }
  }
  return false;
}

ActivationSetFamily maximal_sets(const ActivationSetFamily& family, std::size_t cap) {
  switch (family.kind()) {
    case FamilyKind::k_link: {
      const std::size_t n = family.num_links();
      const std::size_t k = std::min(family.max_active(), n);
      if (binomial(n, k) > cap) {
        throw Error(Errc::enumeration_cap_exceeded,
                    "C(" + std::to_string(n) + "," + std::to_string(k) + ") exceeds the set cap");
      }
      std::vector<ActivationSet> sets;
      enumerate_subsets(n, k, sets);
      return ActivationSetFamily::explicit_sets(n, std::move(sets));
    }
    case FamilyKind::single_hop:
      return matchings_of_graph(family.edges(), kDefaultMatchingLinkCap, cap);
    case FamilyKind::explicit_list: {
      const auto& sets = family.listed_sets();
      if (sets.size() > cap) {
        throw Error(Errc::enumeration_cap_exceeded, "explicit family exceeds the set cap");
      }
      std::vector<ActivationSet> keep;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < sets.size() && !dominated; ++j) {
          dominated = j != i && sets[j].size() > sets[i].size() && is_subset(sets[i], sets[j]);
        }
        if (!dominated) keep.push_back(sets[i]);
      }
      return ActivationSetFamily::explicit_sets(family.num_links(), std::move(keep));
    }
  }
  return family;
}

ActivationSetFamily matchings_of_graph(const std::vector<GraphEdge>& edges, std::size_t link_cap,
                                       std::size_t set_cap) {
  const std::size_t n = edges.size();
  if (n > link_cap) {
    throw Error(Errc::enumeration_cap_exceeded,
                std::to_string(n) + " links exceeds the matching enumeration cap");
  }
  std::size_t num_nodes = 0;
  for (const auto& ed : edges) num_nodes = std::max({num_nodes, ed.u + 1, ed.v + 1});

  std::vector<ActivationSet> out;
  std::vector<char> used(num_nodes, 0);
  ActivationSet current;

  // Each edge is either taken (when both endpoints are free) or skipped; a
  // leaf is kept only if no skipped edge could still be added.
  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!used[edges[j].u] && !used[edges[j].v]) return;
      }
      if (out.size() >= set_cap) {
        throw Error(Errc::enumeration_cap_exceeded, "too many maximal matchings");
      }
      out.push_back(current);
      return;
    }
    const auto& ed = edges[i];
    if (!used[ed.u] && !used[ed.v]) {
      used[ed.u] = used[ed.v] = 1;
      current.push_back(i);
      self(self, i + 1);
      current.pop_back();
      used[ed.u] = used[ed.v] = 0;
    }
    self(self, i + 1);
  };
  recurse(recurse, 0);
  return ActivationSetFamily::explicit_sets(n, std::move(out));
}

IncidenceMatrix::IncidenceMatrix(std::size_t num_links, std::span<const ActivationSet> sets)
    : rows_(num_links), cols_(sets.size()), data_(num_links * sets.size(), 0) {
  for (std::size_t m = 0; m < sets.size(); ++m) {
    for (LinkId e : sets[m]) {
      if (e >= num_links) throw Error(Errc::unknown_link, "set refers to link " + std::to_string(e));
      data_[e * cols_ + m] = 1;
    }
  }
}

FrequencyVector IncidenceMatrix::apply(std::span<const double> x) const {
  FrequencyVector f(rows_, 0.0);
  for (std::size_t e = 0; e < rows_; ++e) {
    for (std::size_t m = 0; m < cols_; ++m) {
      if (data_[e * cols_ + m]) f[e] += x[m];
    }
  }
  return f;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (r > kMax / num) return kMax;
    r = r * num / i;
  }
  return r;
}

}  // namespace freshnet
