#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace qgraph;
using namespace qgraph::testing;

TEST_CASE("interval spectral determinant in closed form") {
  // Neumann interval with the zero mode removed: the k-spectrum is n pi / L,
  // and the regularized product of (lambda + (n pi / L)^2) is
  // 2 sinh(sqrt(lambda) L) / sqrt(lambda).
  for (const auto& spec : {interval_spec(1.0), path_spec(0.5, 0.5)}) {
    MetricGraph g = build_graph(spec);
    EvolutionOperator op = make_evolution_operator(g);
    OrbitCatalog cat(g, op);
    for (const double lambda : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double closed = 2.0 * std::sinh(std::sqrt(lambda)) / std::sqrt(lambda);
      CHECK(spectral_determinant_orbits(cat, lambda) ==
            Catch::Approx(closed).epsilon(1e-8));
      CHECK(spectral_determinant_integral(op, lambda) ==
            Catch::Approx(closed).epsilon(1e-8));
    }
  }
}

TEST_CASE("interval determinant small-lambda limit has the zero mode removed") {
  MetricGraph g = build_graph(interval_spec(1.0));
  EvolutionOperator op = make_evolution_operator(g);
  OrbitCatalog cat(g, op);
  // 2 sinh(sqrt(l))/sqrt(l) -> 2L as lambda -> 0+, staying finite
  CHECK(spectral_determinant_orbits(cat, 1e-4) == Catch::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("orbit sum equals the integral oracle on every test graph") {
  for (const auto& spec : {path_spec(), k4_spec(), five_vertex_spec()}) {
    MetricGraph g = build_graph(spec);
    EvolutionOperator op = make_evolution_operator(g);
    OrbitCatalog cat(g, op);
    for (const double lambda : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double orbit = spectral_determinant_orbits(cat, lambda);
      const double oracle = spectral_determinant_integral(op, lambda);
      CHECK(orbit == Catch::Approx(oracle).epsilon(1e-6));
      CHECK(orbit > 0.0);
    }
  }
}

TEST_CASE("determinant grows monotonically for lambda >= 1") {
  for (const auto& spec : {path_spec(), k4_spec(), five_vertex_spec()}) {
    MetricGraph g = build_graph(spec);
    OrbitCatalog cat(g, make_evolution_operator(g));
    double prev = 0.0;
    for (const double lambda : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double value = spectral_determinant_orbits(cat, lambda);
      CHECK(value > prev);
      prev = value;
    }
  }
}

TEST_CASE("determinant input validation") {
  MetricGraph g = build_graph(interval_spec(1.0));
  EvolutionOperator op = make_evolution_operator(g);
  OrbitCatalog cat(g, op);
  CHECK_THROWS_AS(spectral_determinant_orbits(cat, 0.0), Error);
  CHECK_THROWS_AS(spectral_determinant_orbits(cat, -1.0), Error);
  CHECK_THROWS_WITH(spectral_determinant_integral(op, 1e-9), "zero-mode regime, increase lambda");
}

TEST_CASE("vacuum energy of the unit interval is -pi/24") {
  MetricGraph g = build_graph(path_spec(0.5, 0.5));
  OrbitCatalog cat(g, make_evolution_operator(g));
  ScalarReport report;
  const double e = vacuum_energy(cat, {}, VacuumRoute::orbit_sum, &report);
  CHECK(e == Catch::Approx(-std::numbers::pi / 24.0).margin(1e-6));
  CHECK(report.error_estimate < 1e-8);
  CHECK(report.note.empty());
}

TEST_CASE("vacuum energy ignores the split point") {
  MetricGraph a = build_graph(path_spec(0.3, 0.7));
  MetricGraph b = build_graph(path_spec(0.5, 0.5));
  const double ea = vacuum_energy(OrbitCatalog(a, make_evolution_operator(a)));
  const double eb = vacuum_energy(OrbitCatalog(b, make_evolution_operator(b)));
  CHECK(std::abs(ea - eb) < 1e-8);
}

TEST_CASE("vacuum energy routes agree on the complete graph") {
  MetricGraph g = build_graph(k4_spec());
  OrbitCatalog cat(g, make_evolution_operator(g));
  const double orbit = vacuum_energy(cat, {}, VacuumRoute::orbit_sum);
  const double matrix = vacuum_energy(cat, {}, VacuumRoute::matrix);
  CHECK(std::abs(orbit - matrix) < 1e-8);
}

TEST_CASE("casimir force on the interval") {
  // E(L) = -pi/(24 L): lengthening one sub-bond lengthens L, so the force
  // -dE/dl = -pi/(24 L^2) is attractive.
  MetricGraph g = build_graph(path_spec(0.5, 0.5));
  const double force = casimir_force(g, 0);
  CHECK(force == Catch::Approx(-std::numbers::pi / 24.0).epsilon(1e-5));
}

TEST_CASE("zeta value at s = -1/2 matches the vacuum energy") {
  for (const auto& spec : {path_spec(0.5, 0.5), k4_spec()}) {
    MetricGraph g = build_graph(spec);
    EvolutionOperator op = make_evolution_operator(g);
    OrbitCatalog cat(g, op);
    const double e = vacuum_energy(cat);
    CHECK(zeta_value(op, -0.5, 0.0) == Catch::Approx(2.0 * e).margin(1e-8));
  }
}

TEST_CASE("zeta derivative at zero reproduces the determinant") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  OrbitCatalog cat(g, op);
  const double lambda = 1.0;
  const double h = 1e-4;
  const double derivative = (zeta_value(op, h, lambda) - zeta_value(op, -h, lambda)) / (2.0 * h);
  CHECK(derivative == Catch::Approx(-std::log(spectral_determinant_orbits(cat, lambda)))
                          .epsilon(1e-5));
}

TEST_CASE("zeta large-lambda asymptote") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const double s = 0.75;
  const double lambda = 400.0;
  const double leading = op.total_length() * std::tgamma(s - 0.5) /
                         (2.0 * std::sqrt(std::numbers::pi) * std::tgamma(s)) *
                         std::pow(lambda, 0.5 - s);
  CHECK(zeta_value(op, s, lambda) == Catch::Approx(leading).epsilon(0.05));
}

TEST_CASE("zeta validity strip") {
  MetricGraph g = build_graph(interval_spec(1.0));
  EvolutionOperator op = make_evolution_operator(g);
  CHECK_THROWS_AS(zeta_value(op, 1.2, 1.0), Error);
  CHECK_THROWS_AS(zeta_value(op, 0.5, 1.0), Error);
  CHECK_THROWS_AS(zeta_value(op, -0.5, 1.0), Error);  // Gamma pole off lambda = 0
  CHECK(zeta_value(op, 0.0, 5.0) == -0.5);            // -(B - V + 2)/2
}

TEST_CASE("interval zeta against the direct eigenvalue sum") {
  // for re s > 1/2 ... 1 the defining sum converges and can be compared
  MetricGraph g = build_graph(interval_spec(1.0));
  EvolutionOperator op = make_evolution_operator(g);
  const double s = 0.9, lambda = 2.0;
  double direct = 0.0;
  for (int n = 1; n <= 4000000; ++n)
    direct += std::pow(lambda + n * n * std::numbers::pi * std::numbers::pi, -s);
  // tail correction via the integral approximation
  const double tail_n = 4000000.5;
  direct += std::pow(std::numbers::pi, -2.0 * s) * std::pow(tail_n, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
  CHECK(zeta_value(op, s, lambda) == Catch::Approx(direct).epsilon(1e-6));
}
