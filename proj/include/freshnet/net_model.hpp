#pragma once

// Network, interference structure and incidence queries.
//
// An ActivationSetFamily describes the collection of feasible activation sets.
// Families are downward closed: any subset of a feasible set is feasible. For
// an explicit list this means the listed sets generate the family.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace freshnet {

using LinkId = std::size_t;

/// Sorted, duplicate-free list of links activated together.
using ActivationSet = std::vector<LinkId>;

/// Per-link activation frequencies f_e.
using FrequencyVector = std::vector<double>;

inline constexpr std::size_t kDefaultSetCap = std::size_t{1} << 20;
inline constexpr std::size_t kDefaultMatchingLinkCap = 20;

class NetworkSpec {
 public:
  /// Weights are normalised to sum to one; the raw values are kept for
  /// reporting. Every weight must be positive and every gamma in (0, 1].
  NetworkSpec(std::vector<double> raw_weights, std::vector<double> gamma);

  static NetworkSpec uniform(std::vector<double> gamma);

  std::size_t size() const { return gamma_.size(); }

  double weight(LinkId e) const { return weights_[e]; }
  double raw_weight(LinkId e) const { return raw_weights_[e]; }
  double gamma(LinkId e) const { return gamma_[e]; }

  std::span<const double> weights() const { return weights_; }
  std::span<const double> raw_weights() const { return raw_weights_; }
  std::span<const double> gammas() const { return gamma_; }

  /// w_e / gamma_e; the only way gamma enters the peak-age objective.
  std::vector<double> effective_weights() const;

 private:
  std::vector<double> raw_weights_;
  std::vector<double> weights_;
  std::vector<double> gamma_;
};

enum class FamilyKind { explicit_list, k_link, single_hop };

struct GraphEdge {
  std::size_t u = 0;
  std::size_t v = 0;
};

class ActivationSetFamily {
 public:
  /// Sets are sorted and deduplicated on construction.
  static ActivationSetFamily explicit_sets(std::size_t num_links, std::vector<ActivationSet> sets);
  static ActivationSetFamily k_link(std::size_t num_links, std::size_t max_active);
  /// Link e is the edge edges[e]; two links conflict when they share a node.
  static ActivationSetFamily single_hop(std::vector<GraphEdge> edges);

  FamilyKind kind() const { return kind_; }
  std::size_t num_links() const { return num_links_; }
  std::size_t max_active() const { return max_active_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  /// Generating sets of an explicit family.
  const std::vector<ActivationSet>& listed_sets() const { return sets_; }

  /// True when m is a feasible activation set (the empty set always is).
  bool contains(std::span<const LinkId> m) const;

 private:
  ActivationSetFamily() = default;

  FamilyKind kind_ = FamilyKind::explicit_list;
  std::size_t num_links_ = 0;
  std::size_t max_active_ = 0;
  std::vector<GraphEdge> edges_;
  std::vector<ActivationSet> sets_;
};

/// Maximal members of the family, as an explicit family. Throws
/// enumeration-cap-exceeded when more than `cap` sets would be produced.
ActivationSetFamily maximal_sets(const ActivationSetFamily& family, std::size_t cap = kDefaultSetCap);

/// All maximal matchings of the graph whose edges are the links.
ActivationSetFamily matchings_of_graph(const std::vector<GraphEdge>& edges,
                                       std::size_t link_cap = kDefaultMatchingLinkCap,
                                       std::size_t set_cap = kDefaultSetCap);

/// Dense 0/1 matrix with entry (e, m) = 1 iff link e is in set m.
class IncidenceMatrix {
 public:
  IncidenceMatrix(std::size_t num_links, std::span<const ActivationSet> sets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool operator()(LinkId e, std::size_t m) const { return data_[e * cols_ + m] != 0; }

  /// f = M x
  FrequencyVector apply(std::span<const double> x) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> data_;
};

/// Number of subsets of size k drawn from n, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace freshnet
