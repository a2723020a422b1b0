#pragma once

#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qgraph/charpoly.hpp"

namespace qgraph {

namespace detail {

// 2 H(B - n) with the half-weight convention H(0) = 1/2.
inline double cutoff_weight(int n, int bonds) {
  if (n > bonds) return 0.0;
  return n == bonds ? 1.0 : 2.0;
}

inline Complex unit_power(int exponent) {
  // i^exponent
  switch (((exponent % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace detail

/// Secular function from the half-cutoff pseudo-orbit expansion:
/// F(z) = 2 sum_{B_p <= B} (-1)^m A cos(z(l - L) - theta) H(B - B_p),
/// entire in z and real for real z.  The cosine is evaluated as the pair
/// (w e^{i phi} + conj(w) e^{-i phi}) / ... so complex amplitudes from
/// non-Neumann vertex matrices keep F real on the real axis.
inline Complex secular_orbit(const OrbitCatalog& catalog, Complex z) {
  const auto& op = catalog.op();
  const int bonds = op.bond_count();
  const double th = op.theta();
  const double total = op.total_length();
  detail::KahanComplex acc;
  for (int n = 0; n <= bonds; ++n) {
    const double h = detail::cutoff_weight(n, bonds) / 2.0;
    for (const auto& term : catalog.terms(n)) {
      const Complex phase = std::exp(Complex(0.0, 1.0) * (z * (term.length - total) - th));
      acc.add(h * (term.weight * phase + std::conj(term.weight) / phase));
    }
  }
  return acc.sum;
}

inline double secular_orbit(const OrbitCatalog& catalog, double k) {
  return secular_orbit(catalog, Complex(k, 0.0)).real();
}

/// d/dz of the pseudo-orbit secular function.
inline Complex secular_orbit_derivative(const OrbitCatalog& catalog, Complex z) {
  const auto& op = catalog.op();
  const int bonds = op.bond_count();
  const double th = op.theta();
  const double total = op.total_length();
  detail::KahanComplex acc;
  for (int n = 0; n <= bonds; ++n) {
    const double h = detail::cutoff_weight(n, bonds) / 2.0;
    for (const auto& term : catalog.terms(n)) {
      const double dl = term.length - total;
      const Complex phase = std::exp(Complex(0.0, 1.0) * (z * dl - th));
      acc.add(h * Complex(0.0, dl) * (term.weight * phase - std::conj(term.weight) / phase));
    }
  }
  return acc.sum;
}

/// Determinant route: F(z) = det(U)^{-1/2} det(I - U(z)) with the branch
/// det(U)^{-1/2} = e^{-i(z L + theta)}, which is entire in z and matches
/// the orbit expansion identically (not just up to sign).
inline Complex secular_direct(const EvolutionOperator& op, Complex z) {
  const Eigen::MatrixXcd u = op.matrix_at(z);
  const Complex det =
      Eigen::PartialPivLU<Eigen::MatrixXcd>(Eigen::MatrixXcd::Identity(op.size(), op.size()) - u)
          .determinant();
  return std::exp(-Complex(0.0, 1.0) * (z * op.total_length() + op.theta())) * det;
}

inline double secular_direct(const EvolutionOperator& op, double k) {
  return secular_direct(op, Complex(k, 0.0)).real();
}

enum class FhatRoute { orbit, matrix };

/// F_hat(z) = s F(z) / z^{kappa} with kappa = B - V + 2 and the sign s
/// chosen so that F_hat(it) -> +e^{tL}/t^kappa as t -> +infinity.  Even,
/// entire, positive on the imaginary axis, and F_hat(i sqrt(lambda)) is
/// the spectral determinant.
///
/// Near z = 0 the quotient cancels catastrophically, so the constructor
/// fits the Taylor coefficients of F once from samples on a circle (a DFT
/// of F on |z| = radius) and small arguments are evaluated from the fitted
/// even series instead.
class Fhat {
 public:
  Fhat(const OrbitCatalog* catalog, const EvolutionOperator& op, FhatRoute route,
       double switch_radius = 0.3, double sample_radius = 0.75, int sample_count = 64)
      : catalog_(catalog),
        op_(&op),
        route_(route),
        kappa_(op.kernel_dimension()),
        switch_radius_(switch_radius) {
    if (route_ == FhatRoute::orbit && catalog_ == nullptr)
      throw Error("orbit route needs an orbit catalog");
    const double th = op.theta();
    // Leading coefficient of F(it) e^{-tL}: +1 for theta = 0, -i for pi/2.
    const Complex lead = th == 0.0 ? Complex(1.0, 0.0) : Complex(0.0, -1.0);
    sign_ = std::round((lead / detail::unit_power(kappa_)).real());

    // Taylor coefficients c_kappa, c_{kappa+2}, ... of F via DFT on the
    // sampling circle; odd-offset coefficients vanish by parity.
    std::vector<Complex> samples(sample_count);
    for (int j = 0; j < sample_count; ++j) {
      const double angle = 2.0 * std::numbers::pi * j / sample_count;
      samples[j] = eval_raw(sample_radius * std::exp(Complex(0.0, angle)));
    }
    const int max_terms = std::min(16, (sample_count / 2 - kappa_) / 2);
    series_.resize(std::max(1, max_terms));
    for (std::size_t u = 0; u < series_.size(); ++u) {
      const int order = kappa_ + 2 * static_cast<int>(u);
      Complex coeff(0.0);
      for (int j = 0; j < sample_count; ++j) {
        const double angle = 2.0 * std::numbers::pi * j * order / sample_count;
        coeff += samples[j] * std::exp(Complex(0.0, -angle));
      }
      coeff /= static_cast<double>(sample_count) * std::pow(sample_radius, order);
      series_[u] = sign_ * coeff.real();
    }
  }

  int kernel_power() const { return kappa_; }
  double sign() const { return sign_; }

  Complex operator()(Complex z) const {
    if (std::abs(z) < switch_radius_) {
      Complex sum(0.0);
      const Complex zz = z * z;
      for (std::size_t u = series_.size(); u-- > 0;) sum = sum * zz + series_[u];
      return sum;
    }
    return sign_ * eval_raw(z) / std::pow(z, kappa_);
  }

  /// F_hat(it); real and positive for t > 0.
  double imag_axis(double t) const { return (*this)(Complex(0.0, t)).real(); }

  /// d/dt log F_hat(it).  The matrix route reduces to the numerically
  /// stable trace form tr((I - U(it))^{-1} L U(it)) + L - kappa/t.
  double log_derivative_imag_axis(double t) const {
    if (t == 0.0) return 0.0;
    if (t < switch_radius_) {
      const double tt = t * t;
      double g = 0.0, dg = 0.0;
      double sign_u = 1.0;  // (-1)^u from (it)^{2u}
      double t_pow = 1.0;   // t^{2u}
      for (std::size_t u = 0; u < series_.size(); ++u) {
        g += sign_u * series_[u] * t_pow;
        if (u > 0) dg += sign_u * series_[u] * 2.0 * u * t_pow / t;
        sign_u = -sign_u;
        t_pow *= tt;
      }
      return dg / g;
    }
    const Complex z(0.0, t);
    if (route_ == FhatRoute::orbit) {
      const Complex ratio = secular_orbit_derivative(*catalog_, z) / secular_orbit(*catalog_, z);
      return (Complex(0.0, 1.0) * ratio).real() - kappa_ / t;
    }
    const Eigen::MatrixXcd u = op_->matrix_at(z);
    const Eigen::MatrixXcd lu = op_->arc_lengths().asDiagonal() * u;
    const Eigen::MatrixXcd solved =
        (Eigen::MatrixXcd::Identity(op_->size(), op_->size()) - u).partialPivLu().solve(lu);
    return solved.trace().real() + op_->total_length() - kappa_ / t;
  }

 private:
  Complex eval_raw(Complex z) const {
    return route_ == FhatRoute::orbit ? secular_orbit(*catalog_, z) : secular_direct(*op_, z);
  }

  const OrbitCatalog* catalog_;
  const EvolutionOperator* op_;
  FhatRoute route_;
  int kappa_;
  double switch_radius_;
  double sign_ = 1.0;
  std::vector<double> series_;
};

struct SpectrumOptions {
  double oversample = 8.0;          // grid points per mean spacing pi/L
  double refine_tol = 1e-12;        // bisection interval width
  double degenerate_floor = 1e-9;   // |F| at a local minimum counts as a root
  double kernel_tol = 1e-8;         // singular values below this span the kernel
  int workers = 1;
};

struct SpectrumRoot {
  double k = 0.0;
  int multiplicity = 1;
  double residual = 0.0;            // |det(I - U(k))|
  double smallest_singular = 0.0;
};

struct SpectrumResult {
  std::vector<SpectrumRoot> roots;
  int kernel_dim_at_zero = 0;
  double theta = 0.0;
  double grid_step = 0.0;
  double refine_tol = 0.0;
  std::vector<std::string> warnings;

  int total_multiplicity() const {
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    return total;
  }
};

/// Positive roots of the secular function in (0, k_max]: uniform scan at
/// step pi/(L * oversample), sign-change bisection, and a parabola fit
/// through non-sign-changing local minima of |F| to catch even-order
/// roots.  Multiplicities come from the kernel dimension of I - U(k).
inline SpectrumResult find_spectrum(const OrbitCatalog& catalog, double k_max,
                                    SpectrumOptions options = {}) {
  const auto& op = catalog.op();
  if (!(k_max > 0.0)) throw Error("k_max must be positive");

  SpectrumResult result;
  result.theta = op.theta();
  result.kernel_dim_at_zero = kernel_dimension_at(op, Complex(0.0, 0.0), options.kernel_tol);
  result.refine_tol = options.refine_tol;

  const double step = std::numbers::pi / (op.total_length() * options.oversample);
  result.grid_step = step;
  const int grid_points = static_cast<int>(std::ceil(k_max / step)) + 1;

  std::vector<double> f(grid_points);
  auto eval_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) f[i] = secular_orbit(catalog, i * step);
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1 || grid_points < 256) {
    eval_range(0, grid_points);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (grid_points + workers - 1) / workers;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(eval_range, std::min(w * chunk, grid_points),
                        std::min((w + 1) * chunk, grid_points));
    for (auto& t : pool) t.join();
  }

  auto bisect = [&](double lo, double hi, double flo) {
    while (hi - lo > options.refine_tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = secular_orbit(catalog, mid);
      if ((flo <= 0.0) == (fm <= 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  std::vector<double> candidates;
  for (int i = 1; i + 1 <= grid_points - 1; ++i) {
    const double a = i * step, b = (i + 1) * step;
    if (f[i] == 0.0) {
      candidates.push_back(a);
      continue;
    }
    if ((f[i] < 0.0) != (f[i + 1] < 0.0)) {
      candidates.push_back(bisect(a, b, f[i]));
    } else if (i >= 2 && std::abs(f[i]) < std::abs(f[i - 1]) &&
               std::abs(f[i]) <= std::abs(f[i + 1])) {
      // Parabola through the three points around a local minimum of |F|.
      const double den = f[i - 1] - 2.0 * f[i] + f[i + 1];
      if (den == 0.0) continue;
      const double shift = 0.5 * (f[i - 1] - f[i + 1]) / den;
      const double vertex_value = f[i] - 0.25 * (f[i - 1] - f[i + 1]) * shift;
      if (std::abs(vertex_value) < options.degenerate_floor && std::abs(shift) <= 1.0)
        candidates.push_back(a + shift * step);
    }
  }

  std::sort(candidates.begin(), candidates.end());
  for (double k : candidates) {
    if (!(k > 0.0) || k > k_max + step) continue;
    if (!result.roots.empty() && k - result.roots.back().k < 16.0 * options.refine_tol) continue;
    SpectrumRoot root;
    root.k = k;
    const Eigen::MatrixXcd m =
        Eigen::MatrixXcd::Identity(op.size(), op.size()) - op.matrix_at(Complex(k, 0.0));
    root.residual = std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    root.smallest_singular = svd.singularValues().minCoeff();
    int dim = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] < options.kernel_tol) ++dim;
    root.multiplicity = std::max(1, dim);
    if (k <= k_max) result.roots.push_back(root);
  }

  // Mean counting function: L k / pi minus half the zero-mode dimension
  // (the k = 0 root of order kappa is excluded from the positive count).
  const double weyl =
      op.total_length() * k_max / std::numbers::pi - 0.5 * op.kernel_dimension();
  if (std::abs(result.total_multiplicity() - weyl) > 2.0)
    result.warnings.push_back(
        "root count " + std::to_string(result.total_multiplicity()) +
        " deviates from the Weyl estimate " + std::to_string(weyl) +
        "; raise the oversample factor (short bonds make close root pairs)");
  return result;
}

}  // namespace qgraph
