#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

double max_coeff_diff(const CoefficientVector& a, const CoefficientVector& b) {
  double worst = 0.0;
  for (int n = 0; n <= a.degree(); ++n) worst = std::max(worst, std::abs(a.a[n] - b.a[n]));
  return worst;
}

}  // namespace

TEST_CASE("path graph closed form: only a_0 and a_4 survive") {
  const double l1 = 0.4, l2 = 0.6;
  MetricGraph g = build_graph(path_spec(l1, l2));
  EvolutionOperator op = make_evolution_operator(g);
  OrbitCatalog cat(g, op);
  const Complex k(1.3, 0.0);
  auto c = coeffs_pseudo_orbit(cat, k);
  REQUIRE(c.degree() == 4);
  CHECK(c.a[0] == Complex(1.0));
  CHECK(std::abs(c.a[1]) == 0.0);
  CHECK(std::abs(c.a[2]) == 0.0);
  CHECK(std::abs(c.a[3]) == 0.0);
  const Complex expected = -std::exp(Complex(0.0, 2.0 * 1.3 * (l1 + l2)));
  CHECK(std::abs(c.a[4] - expected) < 1e-15);
  CHECK(max_coeff_diff(c, coeffs_direct(op, k)) < 1e-12);
}

TEST_CASE("elementary symmetric recursion on a known matrix") {
  // U = I (2x2) has characteristic polynomial (xi - 1)^2
  GraphSpec s = interval_spec(1.0);
  MetricGraph g = build_graph(s);
  EvolutionOperator op = make_evolution_operator(g);
  // at k = 0, U = S = [[0,1],[1,0]] with eigenvalues +1, -1: xi^2 - 1
  auto c = coeffs_direct(op, Complex(0.0, 0.0));
  CHECK(std::abs(c.a[0] - Complex(1.0)) < 1e-15);
  CHECK(std::abs(c.a[1]) < 1e-15);
  CHECK(std::abs(c.a[2] + Complex(1.0)) < 1e-14);
}

TEST_CASE("four-way agreement on seeded sweeps") {
  struct Case {
    GraphSpec spec;
    double tol_orbit, tol_newton;
  };
  for (const auto& c : {Case{k4_spec(13), 1e-10, 1e-9}, Case{five_vertex_spec(13), 1e-10, 1e-9},
                        Case{path_random_spec(13), 1e-12, 1e-12}}) {
    MetricGraph g = build_graph(c.spec);
    EvolutionOperator op = make_evolution_operator(g);
    OrbitCatalog cat(g, op);
    double worst_orbit = 0.0, worst_newton = 0.0, worst_sym = 0.0;
    for (int i = 0; i < 25; ++i) {
      const Complex k(random_k(21, i, 50.0), 0.0);
      auto direct = coeffs_direct(op, k);
      worst_orbit = std::max(worst_orbit, max_coeff_diff(coeffs_pseudo_orbit(cat, k), direct));
      worst_newton = std::max(worst_newton, max_coeff_diff(coeffs_newton(op, k), direct));
      worst_sym = std::max(worst_sym, check_symmetry(direct));
      CHECK(std::abs(direct.a[0] - Complex(1.0)) < 1e-15);
      CHECK(std::abs(std::abs(direct.a[direct.degree()]) - 1.0) < 1e-12);
    }
    CHECK(worst_orbit < c.tol_orbit);
    CHECK(worst_newton < c.tol_newton);
    CHECK(worst_sym < 1e-10);
  }
}

TEST_CASE("newton base case and trace identity") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const Complex k(0.7, 0.0);
  const Eigen::MatrixXcd u = op.matrix_at(k);

  auto c = coeffs_newton(op, k);
  CHECK(std::abs(c.a[1] + u.trace()) < 1e-13);

  // tr U^2 against the orbit sum over the reflection pairs (r = 1 only;
  // length-one loops do not exist here)
  Complex orbit_sum(0.0);
  for (const auto& o : enumerate_arc_simple_orbits(g, 2))
    orbit_sum += 2.0 * orbit_amplitude(op, o) * std::exp(Complex(0.0, 1.0) * k * o.metric_length);
  CHECK(std::abs((u * u).trace() - orbit_sum) < 1e-10);
}

TEST_CASE("partition expression for single coefficients") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const Complex k(0.7, 0.0);
  const Eigen::MatrixXcd u = op.matrix_at(k);
  const Complex t1 = u.trace();
  const Complex t2 = (u * u).trace();

  CHECK(std::abs(coeffs_partition(op, k, 0) - Complex(1.0)) == 0.0);
  CHECK(std::abs(coeffs_partition(op, k, 1) + t1) < 1e-13);
  CHECK(std::abs(coeffs_partition(op, k, 2) - (t1 * t1 / 2.0 - t2 / 2.0)) < 1e-13);

  auto direct = coeffs_direct(op, k);
  for (int n = 0; n <= 12; ++n)
    CHECK(std::abs(coeffs_partition(op, k, n) - direct.a[n]) < 1e-9);
  CHECK_THROWS_WITH(coeffs_partition(op, k, 13, 12), "partition expansion capped");
}

TEST_CASE("primitive expansion witnesses the cancelations") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  OrbitCatalog cat(g, op);
  for (const double kk : {0.7, 1.9, 3.3}) {
    const Complex k(kk, 0.0);
    auto orbit = coeffs_pseudo_orbit(cat, k);
    CHECK(std::abs(coeffs_primitive_expansion(g, op, k, 0) - Complex(1.0)) == 0.0);
    for (int n = 1; n <= 6; ++n)
      CHECK(std::abs(coeffs_primitive_expansion(g, op, k, n) - orbit.a[n]) < 1e-10);
  }

  // path graph: a_4 = -e^{2ik(l1+l2)} with the zero-amplitude sets included
  MetricGraph path = build_graph(path_spec());
  EvolutionOperator pop = make_evolution_operator(path);
  const Complex k(1.1, 0.0);
  const Complex expected = -std::exp(Complex(0.0, 2.0 * 1.1));
  CHECK(std::abs(coeffs_primitive_expansion(path, pop, k, 4) - expected) < 1e-14);
}

TEST_CASE("coefficients at k = 0 are real for the complete graph") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  auto c = coeffs_direct(op, Complex(0.0, 0.0));
  for (int n = 0; n <= c.degree(); ++n) CHECK(std::abs(c.a[n].imag()) < 1e-12);
}

TEST_CASE("no spurious periodicity for incommensurate lengths") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const double shift = 2.0 * std::numbers::pi / op.total_length();
  auto c0 = coeffs_direct(op, Complex(1.0, 0.0));
  auto c1 = coeffs_direct(op, Complex(1.0 + shift, 0.0));
  double diff = 0.0;
  for (int n = 0; n <= c0.degree(); ++n) diff = std::max(diff, std::abs(c0.a[n] - c1.a[n]));
  CHECK(diff > 1e-3);
}

TEST_CASE("partition identity in exact rationals") {
  CHECK(lemma_partition_identity(1) == Rational(-1));
  for (int q = 2; q <= 12; ++q) {
    auto value = lemma_partition_identity(q);
    INFO("q = " << q << " -> " << value.to_string());
    CHECK(value.is_zero());
  }
}
