#pragma once

// Scalar root finding and 1-D minimisation shared by the optimiser and the
// queue formulas. Everything here is bracketing-based: no derivatives.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "freshnet/error.hpp"

namespace freshnet::numeric {

struct Root {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Bisection on [lo, hi] where g(lo) < 0 <= g(hi). Stops when the bracket
/// collapses to adjacent doubles or |g| <= tol after the bracket is below
/// 1e-15 wide.
template <class F>
Root bisect(F&& g, double lo, double hi, double tol = 0.0, int max_iter = 400) {
  double glo = g(lo);
  double ghi = g(hi);
  if (!(glo < 0.0) || ghi < 0.0) {
    throw Error(Errc::no_bracket, "bisection interval does not bracket a sign change");
  }
  Root r;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm < 0.0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi)) && std::abs(ghi) <= tol) break;
  }
  // Report the endpoint with the smaller residual.
  if (std::abs(glo) < std::abs(ghi)) {
    r.x = lo;
    r.residual = glo;
  } else {
    r.x = hi;
    r.residual = ghi;
  }
  return r;
}

/// Root of g on (0, hi] that is not the trivial root at 0. g must be negative
/// just above zero and non-negative at hi. The lower end of the bracket is the
/// first point of a geometric scan upward from `delta` where g < 0.
template <class F>
Root nontrivial_root(F&& g, double hi, double delta = 1e-9, double tol = 0.0) {
  double lo = delta;
  while (!(g(lo) < 0.0)) {
    lo *= 2.0;
    if (lo >= hi) {
      throw Error(Errc::no_bracket, "no negative region found above the trivial root");
    }
  }
  return bisect(g, lo, hi, tol);
}

struct Minimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a unimodal function on [lo, hi].
template <class F>
Minimum golden_section(F&& f, double lo, double hi, double xtol = 1e-10) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Coarse uniform scan to locate the basin, then golden section between the
/// neighbours of the best grid point.
template <class F>
Minimum scan_then_golden(F&& f, double lo, double hi, std::size_t points = 200,
                         double xtol = 1e-10) {
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + step * static_cast<double>(best > 0 ? best - 1 : 0);
  const double b = lo + step * static_cast<double>(best + 1 < points ? best + 1 : best);
  Minimum m = golden_section(f, a, b, xtol);
  if (best_value < m.value) {
    m = {lo + step * static_cast<double>(best), best_value};
  }
  return m;
}

}  // namespace freshnet::numeric
