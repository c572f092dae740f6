#include "freshnet/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freshnet/error.hpp"

namespace freshnet {

namespace {

constexpr double kPivotEps = 1e-12;

// Dense phase-one tableau for
//   sum_m M_{e,m} x_m - s_e + a_e = f_e   (one row per link)
//   sum_m x_m + t               = 1
// minimising sum_e a_e. Column layout: [x (n) | s (N) | t | a (N)].
class PhaseOne {
 public:
  PhaseOne(std::span<const double> f, const std::vector<ActivationSet>& sets)
      : links_(f.size()), sets_(sets.size()) {
    rows_ = links_ + 1;
    cols_ = sets_ + links_ + 1 + links_;
    tab_.assign(rows_ * cols_, 0.0);
    rhs_.assign(rows_, 0.0);
    basis_.assign(rows_, 0);
    for (std::size_t m = 0; m < sets_; ++m) {
      for (LinkId e : sets[m]) at(e, m) = 1.0;
      at(links_, m) = 1.0;
    }
    for (std::size_t e = 0; e < links_; ++e) {
      at(e, sets_ + e) = -1.0;
      at(e, art(e)) = 1.0;
      rhs_[e] = f[e];
      basis_[e] = art(e);
    }
    at(links_, slack()) = 1.0;
    rhs_[links_] = 1.0;
    basis_[links_] = slack();

    cost_.assign(cols_, 0.0);
    for (std::size_t e = 0; e < links_; ++e) cost_[art(e)] = 1.0;
    reduced_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      double r = cost_[j];
      for (std::size_t e = 0; e < links_; ++e) r -= at(e, j);
      reduced_[j] = r;
    }
    objective_ = 0.0;
    for (std::size_t e = 0; e < links_; ++e) objective_ += rhs_[e];
  }

  void solve() {
    // Bland's rule: lowest-index entering column, lowest-index leaving basis.
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (reduced_[j] < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return;
      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs_[i] / a;
        if (ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && leave < rows_ && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == rows_) return;  // unbounded direction cannot occur: objective >= 0
      pivot(leave, enter);
    }
  }

  double objective() const { return std::max(0.0, objective_); }

  std::vector<double> set_weights() const {
    std::vector<double> x(sets_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < sets_) x[basis_[i]] = std::max(0.0, rhs_[i]);
    }
    return x;
  }

  // Duals y_e = 1 - reduced(a_e); y_sum = -reduced(t).
  std::vector<double> link_duals() const {
    std::vector<double> y(links_);
    for (std::size_t e = 0; e < links_; ++e) y[e] = 1.0 - reduced_[art(e)];
    return y;
  }
  double sum_dual() const { return -reduced_[slack()]; }

 private:
  double& at(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return tab_[i * cols_ + j]; }
  std::size_t slack() const { return sets_ + links_; }
  std::size_t art(std::size_t e) const { return sets_ + links_ + 1 + e; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j < cols_; ++j) at(r, j) /= p;
    rhs_[r] /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double factor = at(i, c);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) at(i, j) -= factor * at(r, j);
      rhs_[i] -= factor * rhs_[r];
    }
    const double rc = reduced_[c];
    for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= rc * at(r, j);
    objective_ += rc * rhs_[r];
    basis_[r] = c;
  }

  std::size_t links_;
  std::size_t sets_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> tab_;
  std::vector<double> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
  double objective_ = 0.0;
};

}  // namespace

FeasibilityResult check_feasible(std::span<const double> f, const ActivationSetFamily& family,
                                 double tol, std::size_t cap) {
  const std::size_t n = family.num_links();
  if (f.size() != n) {
    throw Error(Errc::invalid_argument, "frequency vector length does not match the family");
  }
  for (double v : f) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::invalid_argument, "frequency outside [0, 1]");
  }
  const auto maximal = maximal_sets(family, cap);
  const auto& sets = maximal.listed_sets();

  PhaseOne lp(f, sets);
  lp.solve();

  FeasibilityResult out;
  out.residual = lp.objective();
  out.feasible = out.residual <= tol;
  if (!out.feasible) {
    out.normal = lp.link_duals();
    out.bound = -lp.sum_dual();
    return out;
  }

  // The LP only guarantees M x >= f; drop links from sets to remove the
  // surplus. Each link splits at most one set, so the witness stays small.
  std::vector<ActivationSet> wsets;
  std::vector<double> wx;
  const auto x = lp.set_weights();
  for (std::size_t m = 0; m < sets.size(); ++m) {
    if (x[m] > 0.0) {
      wsets.push_back(sets[m]);
      wx.push_back(x[m]);
    }
  }
  for (LinkId e = 0; e < n; ++e) {
    double cover = 0.0;
    for (std::size_t m = 0; m < wsets.size(); ++m) {
      if (std::binary_search(wsets[m].begin(), wsets[m].end(), e)) cover += wx[m];
    }
    double excess = cover - f[e];
    for (std::size_t m = 0; m < wsets.size() && excess > 0.0; ++m) {
      if (!std::binary_search(wsets[m].begin(), wsets[m].end(), e)) continue;
      ActivationSet reduced = wsets[m];
      reduced.erase(std::find(reduced.begin(), reduced.end(), e));
      if (wx[m] <= excess) {
        excess -= wx[m];
        wsets[m] = std::move(reduced);
      } else {
        wx[m] -= excess;
        wsets.push_back(std::move(reduced));
        wx.push_back(excess);
        excess = 0.0;
      }
    }
  }
  for (std::size_t m = 0; m < wsets.size(); ++m) {
    if (wsets[m].empty()) continue;  // idle mass
    out.sets.push_back(std::move(wsets[m]));
    out.x.push_back(wx[m]);
  }
  return out;
}

}  // namespace freshnet
