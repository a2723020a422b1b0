#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated bisection discrepancies
  int panels = 0;
};

namespace detail {

struct GaussLegendre15 {
  double node[15];
  double weight[15];

  GaussLegendre15() {
    // Nodes by Newton iteration on P_15; deterministic and accurate to
    // machine precision.
    constexpr int n = 15;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) {
          p0 = 1.0;
          p1 = x;
          for (int j = 2; j <= n; ++j) {
            const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (x * p1 - p0) / (x * x - 1.0);
          break;
        }
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre15& get() {
    static const GaussLegendre15 table;
    return table;
  }
};

template <class F>
double panel(F&& f, double a, double b) {
  const auto& gl = GaussLegendre15::get();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 15; ++i) sum += gl.weight[i] * f(mid + half * gl.node[i]);
  return half * sum;
}

template <class F>
void adaptive_step(F&& f, double a, double b, double whole, double tol, int depth, int max_depth,
                   QuadratureResult& out) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  const double diff = std::abs(whole - (left + right));
  if (diff <= tol || depth >= max_depth) {
    out.value += left + right;
    out.error += diff;
    out.panels += 2;
    return;
  }
  adaptive_step(f, a, mid, left, 0.5 * tol, depth + 1, max_depth, out);
  adaptive_step(f, mid, b, right, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

/// Adaptive composite 15-point Gauss-Legendre integration by recursive
/// bisection; `panel_tol` is the absolute acceptance tolerance, halved per
/// split so accumulated error stays below it.
template <class F>
QuadratureResult adaptive_gauss_legendre(F&& f, double a, double b, double panel_tol = 1e-12,
                                         int max_depth = 48) {
  QuadratureResult out;
  if (a == b) return out;
  detail::adaptive_step(f, a, b, detail::panel(f, a, b), panel_tol, 0, max_depth, out);
  return out;
}

}  // namespace qgraph
