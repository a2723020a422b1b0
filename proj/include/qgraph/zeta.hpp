#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "qgraph/quadrature.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

struct ZetaConfig {
  double panel_tol = 1e-12;
  int max_depth = 48;
  double tail_cutoff = 1e-14;  // truncate the tail where terms drop below this
};

/// One computed scalar with provenance: which quantity, which route, and
/// what the quadrature did.
struct ScalarReport {
  std::string quantity;  // specdet | vacuum | zeta
  std::string method;    // orbit_sum | integral_oracle
  double input = 0.0;    // lambda or s
  double value = 0.0;
  double error_estimate = 0.0;
  std::string note;
};

namespace detail {

// Exponential-sum form of F_hat(it) t^kappa e^{-tL}: decays to 1 from
// below/above, every term damped, stable for arbitrarily large t.
//   G(t) = sum_{B_p <= B} (-1)^m A (e^{-t l} + eps e^{-t(2L - l)}) H,
// with eps = +1 for theta = 0 and -1 for theta = pi/2.
struct TailSum {
  const OrbitCatalog* catalog;
  double eps;
  double total_length;
  double min_exponent;  // slowest decay rate among non-constant terms

  explicit TailSum(const OrbitCatalog& cat) : catalog(&cat) {
    const auto& op = cat.op();
    eps = op.theta() == 0.0 ? 1.0 : -1.0;
    total_length = op.total_length();
    min_exponent = 2.0 * total_length;
    const int bonds = op.bond_count();
    for (int n = 0; n <= bonds; ++n)
      for (const auto& term : cat.terms(n)) {
        if (term.length > 0.0) min_exponent = std::min(min_exponent, term.length);
        min_exponent = std::min(min_exponent, 2.0 * total_length - term.length);
      }
  }

  double value(double t) const {
    const int bonds = catalog->op().bond_count();
    double g = 0.0;
    for (int n = 0; n <= bonds; ++n) {
      const double h = cutoff_weight(n, bonds) / 2.0;
      for (const auto& term : catalog->terms(n))
        g += h * term.weight.real() *
             (std::exp(-t * term.length) + eps * std::exp(-t * (2.0 * total_length - term.length)));
    }
    return g;
  }

  // -t G'(t): numerator of the tail integrand.
  double minus_t_derivative(double t) const {
    const int bonds = catalog->op().bond_count();
    double num = 0.0;
    for (int n = 0; n <= bonds; ++n) {
      const double h = cutoff_weight(n, bonds) / 2.0;
      for (const auto& term : catalog->terms(n)) {
        const double l = term.length, lc = 2.0 * total_length - l;
        num += h * term.weight.real() *
               (t * l * std::exp(-t * l) + eps * t * lc * std::exp(-t * lc));
      }
    }
    return num;
  }
};

// Same quantities from the determinant: G(t) = s e^{-i theta} i^{-kappa}
// det(I - e^{-tL} S) and -t G'/G = -t tr((I - M)^{-1} L M), M = e^{-tL} S.
struct MatrixTail {
  const EvolutionOperator* op;
  double sign;

  MatrixTail(const EvolutionOperator& o, double s) : op(&o), sign(s) {}

  double value(double t) const {
    const Eigen::MatrixXcd m = op->matrix_at(Complex(0.0, t));
    const Complex det =
        Eigen::PartialPivLU<Eigen::MatrixXcd>(Eigen::MatrixXcd::Identity(op->size(), op->size()) - m)
            .determinant();
    const Complex factor =
        sign * std::exp(Complex(0.0, -op->theta())) / unit_power(op->kernel_dimension());
    return (factor * det).real();
  }

  double minus_t_log_derivative(double t) const {
    const Eigen::MatrixXcd m = op->matrix_at(Complex(0.0, t));
    const Eigen::MatrixXcd lm = op->arc_lengths().asDiagonal() * m;
    const Eigen::MatrixXcd solved =
        (Eigen::MatrixXcd::Identity(op->size(), op->size()) - m).partialPivLu().solve(lm);
    return -t * solved.trace().real();
  }
};

}  // namespace detail

/// Spectral determinant by the finite pseudo-orbit sum,
///   S(lambda) = (2 / lambda^{kappa/2}) sum (-1)^m A cosh(sqrt(lambda)(l - L)) H
/// for theta = 0, with cosh -> sinh(sqrt(lambda)(L - l)) for theta = pi/2
/// (the orientation that makes the null-orbit term, and the product of
/// shifted eigenvalues, positive).  Below the series switch radius the
/// evaluation goes through the fitted F_hat to avoid cancelation.
inline double spectral_determinant_orbits(const OrbitCatalog& catalog, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  const auto& op = catalog.op();
  const double root = std::sqrt(lambda);
  if (root < 0.3) {
    Fhat fhat(&catalog, op, FhatRoute::orbit);
    return fhat.imag_axis(root);
  }
  const int bonds = op.bond_count();
  const bool cosine_type = op.theta() == 0.0;
  const double total = op.total_length();
  double sum = 0.0;
  for (int n = 0; n <= bonds; ++n) {
    const double h = detail::cutoff_weight(n, bonds) / 2.0;
    for (const auto& term : catalog.terms(n)) {
      const double x = cosine_type ? std::cosh(root * (term.length - total))
                                   : std::sinh(root * (total - term.length));
      sum += h * term.weight.real() * x;
    }
  }
  return 2.0 * sum / std::pow(lambda, op.kernel_dimension() / 2.0);
}

/// Oracle route, independent of the orbit machinery: exp(-zeta'(0,lambda))
/// collapses to F_hat(i sqrt(lambda)) evaluated from the determinant.
inline double spectral_determinant_integral(const EvolutionOperator& op, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (lambda < 1e-8) throw Error("zero-mode regime, increase lambda");
  Fhat fhat(nullptr, op, FhatRoute::matrix);
  return fhat.imag_axis(std::sqrt(lambda));
}

enum class VacuumRoute { orbit_sum, matrix };

/// Zeta-regularized vacuum energy as a finite pseudo-orbit trace formula:
///   E_c = -(1/2pi) int_0^1 t (log F_hat(it))' dt + L/(4pi) + (V-B-2)/(2pi)
///         + (1/2pi) int_1^T (-t G'(t)/G(t)) dt,
/// where G is the damped exponential sum of the tail.  The two routes
/// evaluate the same integrands from the orbit expansion or from the
/// determinant; if the orbit-sum denominator loses positivity the tail
/// falls back to the matrix form.
inline double vacuum_energy(const OrbitCatalog& catalog, ZetaConfig config = {},
                            VacuumRoute route = VacuumRoute::orbit_sum,
                            ScalarReport* report = nullptr) {
  const auto& op = catalog.op();
  const double total = op.total_length();
  const double pi = std::numbers::pi;

  Fhat fhat(&catalog, op, route == VacuumRoute::orbit_sum ? FhatRoute::orbit : FhatRoute::matrix);

  auto head_integrand = [&](double t) { return t * fhat.log_derivative_imag_axis(t); };
  const auto head_a = adaptive_gauss_legendre(head_integrand, 0.0, 0.3, config.panel_tol,
                                              config.max_depth);
  const auto head_b = adaptive_gauss_legendre(head_integrand, 0.3, 1.0, config.panel_tol,
                                              config.max_depth);

  detail::TailSum tail(catalog);
  detail::MatrixTail matrix_tail(op, fhat.sign());
  const double t_end =
      std::max(1.0, -std::log(config.tail_cutoff) / std::max(tail.min_exponent, 1e-12));

  bool orbit_tail = route == VacuumRoute::orbit_sum;
  std::string note;
  if (orbit_tail) {
    // The denominator is a positive function; a sign crossing means the
    // expansion lost too much precision to be trusted.
    for (double t = 1.0; t <= t_end; t += 0.25)
      if (tail.value(t) <= 0.0) {
        orbit_tail = false;
        note = "orbit-sum representation unstable, falling back to matrix integrand";
        break;
      }
  }

  auto tail_integrand = [&](double t) {
    if (orbit_tail) return tail.minus_t_derivative(t) / tail.value(t);
    return matrix_tail.minus_t_log_derivative(t);
  };
  const auto tail_part =
      adaptive_gauss_legendre(tail_integrand, 1.0, t_end, config.panel_tol, config.max_depth);
  // Remainder beyond t_end decays like e^{-m t}; bound it by the last
  // integrand value times the decay scale.
  const double remainder =
      std::abs(tail_integrand(t_end)) / std::max(tail.min_exponent, 1e-12);

  const int vertices = op.vertex_count();
  const int bonds = op.bond_count();
  const double value = -(head_a.value + head_b.value) / (2.0 * pi) + total / (4.0 * pi) +
                       (vertices - bonds - 2) / (2.0 * pi) + tail_part.value / (2.0 * pi);
  if (report) {
    report->quantity = "vacuum";
    report->method = route == VacuumRoute::orbit_sum ? "orbit_sum" : "integral_oracle";
    report->value = value;
    report->error_estimate =
        (head_a.error + head_b.error + tail_part.error + remainder) / (2.0 * pi);
    report->note = note;
  }
  return value;
}

/// -d E_c / d l_b by central difference with step 1e-4 l_b.
inline double casimir_force(const MetricGraph& g, int bond_index, ZetaConfig config = {}) {
  if (bond_index < 0 || bond_index >= g.bond_count()) throw Error("invalid bond index");
  const double l = g.bond_length(bond_index);
  const double h = 1e-4 * l;
  auto energy_at = [&](double length) {
    MetricGraph modified = with_bond_length(g, bond_index, length);
    EvolutionOperator op = make_evolution_operator(modified);
    OrbitCatalog catalog(modified, op);
    return vacuum_energy(catalog, config);
  };
  return (energy_at(l - h) - energy_at(l + h)) / (2.0 * h);
}

/// Regularized spectral zeta, matrix route.
///
/// lambda > 0 (valid for re s < 1 away from s = 1/2 and the negative
/// half-integers, where the continued Gamma term has poles):
///   zeta(s,lambda) = sin(pi s)/pi int_{sqrt(lambda)}^inf (t^2-lambda)^{-s}
///                    (log G)'(t) dt
///                    + L Gamma(s-1/2)/(2 sqrt(pi) Gamma(s)) lambda^{1/2-s}
///                    - (kappa/2) lambda^{-s}.
/// lambda = 0 (split at t = 1):
///   zeta(s,0) = sin(pi s)/pi [ int_0^1 t^{-2s} (log F_hat)'(it) dt
///               + int_1^T t^{-2s} (log G)'(t) dt + L/(2s-1) + (V-B-2)/(2s) ].
inline double zeta_value(const EvolutionOperator& op, double s, double lambda,
                         ZetaConfig config = {}) {
  if (!(s < 1.0)) throw Error("zeta representation valid only for re s < 1");
  if (lambda < 0.0) throw Error("lambda must be non-negative");
  const double pi = std::numbers::pi;
  const int kappa = op.kernel_dimension();
  if (std::abs(s) < 1e-12) return -kappa / 2.0;
  if (std::abs(s - 0.5) < 1e-9)
    throw Error("zeta has a pole at s = 1/2");

  Fhat fhat(nullptr, op, FhatRoute::matrix);
  detail::MatrixTail matrix_tail(op, fhat.sign());
  // (log G)'(t) = (log F_hat(it))' + kappa/t - L; the matrix form of the
  // right-hand side is the damped trace, stable for large t.
  auto log_g_prime = [&](double t) {
    return fhat.log_derivative_imag_axis(t) + kappa / t - op.total_length();
  };
  const double decay = std::max(2.0 * op.min_bond_length(), 1e-12);
  const double t_end = std::max(2.0, -std::log(config.tail_cutoff) / decay);

  if (lambda == 0.0) {
    auto head = [&](double t) { return std::pow(t, -2.0 * s) * fhat.log_derivative_imag_axis(t); };
    const auto head_a = adaptive_gauss_legendre(head, 0.0, 0.3, config.panel_tol, config.max_depth);
    const auto head_b = adaptive_gauss_legendre(head, 0.3, 1.0, config.panel_tol, config.max_depth);
    auto tail = [&](double t) { return std::pow(t, -2.0 * s) * log_g_prime(t); };
    const auto tail_part =
        adaptive_gauss_legendre(tail, 1.0, t_end, config.panel_tol, config.max_depth);
    const double bracket = head_a.value + head_b.value + tail_part.value +
                           op.total_length() / (2.0 * s - 1.0) +
                           (op.vertex_count() - op.bond_count() - 2) / (2.0 * s);
    return std::sin(pi * s) / pi * bracket;
  }

  if (lambda < 1e-8) throw Error("zero-mode regime, increase lambda");
  const double half_int = s + 0.5;
  if (std::abs(half_int - std::round(half_int)) < 1e-9 && std::round(half_int) <= 0.0)
    throw Error("Gamma term has a pole at negative half-integer s; use the lambda = 0 form");

  const double root = std::sqrt(lambda);
  // Substitute u = sqrt(t^2 - lambda): the endpoint factor becomes
  // u^{1-2s}, integrable for s < 1 and smooth for s <= 1/2.
  auto by_u = [&](double u) {
    const double t = std::hypot(u, root);
    return std::pow(u, 1.0 - 2.0 * s) * log_g_prime(t) / t;
  };
  const double u_split = 1.0;
  const auto near = adaptive_gauss_legendre(by_u, 0.0, u_split, config.panel_tol, config.max_depth);
  const double t_split = std::hypot(u_split, root);
  auto by_t = [&](double t) { return std::pow(t * t - lambda, -s) * log_g_prime(t); };
  const auto far = adaptive_gauss_legendre(by_t, t_split, std::max(t_end, t_split + 1.0),
                                           config.panel_tol, config.max_depth);

  const double gamma_term = op.total_length() * std::tgamma(s - 0.5) /
                            (2.0 * std::sqrt(pi) * std::tgamma(s)) * std::pow(lambda, 0.5 - s);
  return std::sin(pi * s) / pi * (near.value + far.value) + gamma_term -
         0.5 * kappa * std::pow(lambda, -s);
}

}  // namespace qgraph
