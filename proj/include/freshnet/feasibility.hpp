#pragma once

#include <span>
#include <vector>

#include "freshnet/net_model.hpp"

namespace freshnet {

struct FeasibilityResult {
  bool feasible = false;
  /// Witness distribution over feasible sets with M x = f (within tol) and
  /// sum(x) <= 1. Empty when infeasible.
  std::vector<ActivationSet> sets;
  std::vector<double> x;
  /// Minimum total shortfall sum_e max(0, f_e - (M x)_e) over the simplex.
  double residual = 0.0;
  /// Separating hyperplane when infeasible: a . g <= bound for every
  /// achievable frequency vector g, while a . f > bound.
  std::vector<double> normal;
  double bound = 0.0;
};

/// Decide whether f is an achievable link-activation frequency vector for the
/// family by a phase-one simplex over the family's maximal sets.
FeasibilityResult check_feasible(std::span<const double> f, const ActivationSetFamily& family,
                                 double tol = 1e-9, std::size_t cap = kDefaultSetCap);

}  // namespace freshnet
