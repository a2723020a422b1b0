#pragma once

#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

#include "qgraph/orbits.hpp"
#include "qgraph/rational.hpp"

namespace qgraph {

/// Coefficients a_0 ... a_{2B} of det(xi I - U(k)) at a fixed k, highest
/// power first: a_0 = 1 multiplies xi^{2B}.  For real k, |a_{2B}| = 1 and
/// a_n = a_{2B} conj(a_{2B-n}).
struct CoefficientVector {
  Complex k{0.0, 0.0};
  std::vector<Complex> a;

  int degree() const { return static_cast<int>(a.size()) - 1; }
};

namespace detail {

struct KahanComplex {
  Complex sum{0.0, 0.0};
  Complex carry{0.0, 0.0};
  void add(Complex value) {
    const Complex y = value - carry;
    const Complex t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Multiplicity representation of partitions: counts[j] copies of part j,
// for j = 1..n.  Visits partitions in a fixed recursive order.
template <class Fn>
void for_each_partition_impl(int remaining, int max_part, std::vector<int>& counts, Fn&& fn) {
  if (remaining == 0) {
    fn(const_cast<const std::vector<int>&>(counts));
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    ++counts[part];
    for_each_partition_impl(remaining - part, part, counts, fn);
    --counts[part];
  }
}

template <class Fn>
void for_each_partition(int n, Fn&& fn) {
  std::vector<int> counts(n + 1, 0);
  for_each_partition_impl(n, n, counts, fn);
}

inline std::vector<Complex> traces_of_powers(const Eigen::MatrixXcd& u, int max_power) {
  std::vector<Complex> traces(max_power + 1, Complex(0.0));
  Eigen::MatrixXcd power = u;
  for (int j = 1; j <= max_power; ++j) {
    traces[j] = power.trace();
    if (j < max_power) power = power * u;
  }
  return traces;
}

}  // namespace detail

/// Finite pseudo-orbit expansion: a_n as the sum of (-1)^m A e^{ikl} over
/// irreducible pseudo orbits of topological length n.  Exact, not an
/// approximation.
inline CoefficientVector coeffs_pseudo_orbit(const OrbitCatalog& catalog, Complex k) {
  const int two_b = catalog.op().size();
  if (catalog.max_total() < two_b) throw Error("orbit catalog truncated below 2B");
  CoefficientVector c;
  c.k = k;
  c.a.assign(two_b + 1, Complex(0.0));
  for (int n = 0; n <= two_b; ++n) {
    detail::KahanComplex acc;
    for (const auto& term : catalog.terms(n))
      acc.add(term.weight * std::exp(Complex(0.0, 1.0) * k * term.length));
    c.a[n] = acc.sum;
  }
  return c;
}

/// Oracle route: eigendecompose U(k) and build the elementary symmetric
/// polynomials of the eigenvalues by stable recursion.
inline CoefficientVector coeffs_direct(const EvolutionOperator& op, Complex k) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.matrix_at(k), false);
  if (solver.info() != Eigen::Success) throw Error("eigensolve failure");
  const auto& mu = solver.eigenvalues();
  CoefficientVector c;
  c.k = k;
  c.a.assign(mu.size() + 1, Complex(0.0));
  c.a[0] = Complex(1.0);
  for (int i = 0; i < mu.size(); ++i)
    for (int j = i + 1; j >= 1; --j) c.a[j] -= mu[i] * c.a[j - 1];
  return c;
}

/// Newton's identities: a_n = -(1/n) sum_{j<n} T_{n-j} a_j with
/// T_j = tr U(k)^j, compensated summation in ascending j.
inline CoefficientVector coeffs_newton(const EvolutionOperator& op, Complex k) {
  const int two_b = op.size();
  const auto traces = detail::traces_of_powers(op.matrix_at(k), two_b);
  CoefficientVector c;
  c.k = k;
  c.a.assign(two_b + 1, Complex(0.0));
  c.a[0] = Complex(1.0);
  for (int n = 1; n <= two_b; ++n) {
    detail::KahanComplex acc;
    for (int j = 0; j < n; ++j) acc.add(traces[n - j] * c.a[j]);
    c.a[n] = -acc.sum / static_cast<double>(n);
  }
  return c;
}

inline constexpr int kPartitionCap = 12;

/// Closed partition expression for a single coefficient:
/// a_n = sum over partitions of n of prod_j (1/m_j!) (-T_j/j)^{m_j}.
inline Complex coeffs_partition(const EvolutionOperator& op, Complex k, int n,
                                int cap = kPartitionCap) {
  if (n < 0 || n > op.size()) throw Error("coefficient index out of range");
  if (n > cap) throw Error("partition expansion capped");
  if (n == 0) return Complex(1.0);
  const auto traces = detail::traces_of_powers(op.matrix_at(k), n);
  detail::KahanComplex total;
  detail::for_each_partition(n, [&](const std::vector<int>& counts) {
    Complex product(1.0);
    for (int j = 1; j <= n; ++j) {
      for (int copy = 0; copy < counts[j]; ++copy)
        product *= -traces[j] / static_cast<double>(j) / static_cast<double>(copy + 1);
    }
    total.add(product);
  });
  return total.sum;
}

/// Appendix-style oracle: a_n as a sum over sets of distinct primitive
/// orbits of total length n.  All non-irreducible contributions cancel;
/// agreement with the other routes witnesses that cancelation numerically.
inline Complex coeffs_primitive_expansion(const MetricGraph& g, const EvolutionOperator& op,
                                          Complex k, int n, int cap = kPrimitiveCap) {
  const auto sets = enumerate_primitive_pseudo_orbits(g, op, n, cap);
  detail::KahanComplex total;
  for (const auto& po : sets)
    total.add(static_cast<double>(po.sign()) * po.amplitude *
              std::exp(Complex(0.0, 1.0) * k * po.metric_length));
  return total.sum;
}

/// max_n |a_n - a_{2B} conj(a_{2B-n})|; meaningful for real k.
inline double check_symmetry(const CoefficientVector& c) {
  const int two_b = c.degree();
  double worst = 0.0;
  for (int n = 0; n <= two_b; ++n)
    worst = std::max(worst, std::abs(c.a[n] - c.a[two_b] * std::conj(c.a[two_b - n])));
  return worst;
}

/// Partition sum sum_{P of q} prod_r (-1)^{n_r} (1/n_r!) (1/r)^{n_r} in
/// exact rational arithmetic.  Equals -1 at q = 1 and 0 for every q > 1
/// (the coefficient of x^q in 1 - x).
inline Rational lemma_partition_identity(int q) {
  if (q < 1) throw Error("q must be positive");
  if (q > 20) throw Error("partition identity capped at q = 20");
  long long factorial = 1;
  for (int i = 2; i <= q; ++i) factorial *= i;

  long long numerator = 0;
  detail::for_each_partition(q, [&](const std::vector<int>& counts) {
    // q! / prod_r r^{n_r} n_r!  counts permutations of cycle type P, so
    // the division below is exact.
    long long term = factorial;
    int orbit_total = 0;
    for (int r = 1; r <= q; ++r) {
      for (int copy = 0; copy < counts[r]; ++copy) {
        term /= r;
        term /= copy + 1;
      }
      orbit_total += counts[r];
    }
    numerator += (orbit_total % 2 == 0) ? term : -term;
  });
  return Rational(numerator, factorial);
}

}  // namespace qgraph
