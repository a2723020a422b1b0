#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace qgraph;
using namespace qgraph::testing;

TEST_CASE("vertex scattering matrices") {
  CHECK(vertex_scattering_matrix(1)(0, 0) == 1.0);  // total reflection

  Eigen::MatrixXd d2 = vertex_scattering_matrix(2);  // transparent vertex
  CHECK(d2(0, 0) == 0.0);
  CHECK(d2(0, 1) == 1.0);

  Eigen::MatrixXd d3 = vertex_scattering_matrix(3);
  CHECK(d3(0, 0) == Catch::Approx(-1.0 / 3.0));
  CHECK(d3(0, 1) == Catch::Approx(2.0 / 3.0));

  for (int d = 1; d <= 6; ++d) {
    Eigen::MatrixXd sigma = vertex_scattering_matrix(d);
    CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sigma * sigma.transpose() - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-14);
    // rows of squared entries sum to one
    for (int r = 0; r < d; ++r)
      CHECK(sigma.row(r).cwiseAbs2().sum() == Catch::Approx(1.0).margin(1e-14));
  }
  CHECK_THROWS_AS(vertex_scattering_matrix(0), Error);
}

TEST_CASE("path graph bond-scattering structure") {
  MetricGraph g = build_graph(path_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const auto& s = op.bond_scattering();

  // structurally allowed entries: sum over vertices of degree^2
  int allowed = 0;
  for (int col = 0; col < op.size(); ++col)
    for (int row = 0; row < op.size(); ++row)
      if (g.terminus(col) == g.origin(row)) ++allowed;
  CHECK(allowed == 6);

  for (int col = 0; col < op.size(); ++col)
    for (int row = 0; row < op.size(); ++row) {
      if (g.terminus(col) != g.origin(row)) {
        CHECK(s(row, col) == Complex(0.0));
      } else if (g.origin(row) == g.vertex_index("b") && row == g.reverse(col)) {
        CHECK(s(row, col) == Complex(0.0));  // transparent backscatter
      }
    }
}

TEST_CASE("complete graph rows have three entries in {-1/3, 2/3}") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const auto& s = op.bond_scattering();
  for (int row = 0; row < op.size(); ++row) {
    int nonzero = 0;
    for (int col = 0; col < op.size(); ++col) {
      const double v = s(row, col).real();
      if (v != 0.0) {
        ++nonzero;
        CHECK((v == Catch::Approx(-1.0 / 3.0) || v == Catch::Approx(2.0 / 3.0)));
      }
    }
    CHECK(nonzero == 3);
  }
}

TEST_CASE("unitarity and evolution operator") {
  for (const auto& spec : {path_spec(), k4_spec(), five_vertex_spec()}) {
    MetricGraph g = build_graph(spec);
    EvolutionOperator op = make_evolution_operator(g);
    const int n = op.size();
    const auto& s = op.bond_scattering();
    CHECK((s.adjoint() * s - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);

    // U(0) = S
    CHECK((op.matrix_at(Complex(0.0, 0.0)) - s).cwiseAbs().maxCoeff() == 0.0);

    // U(k) unitary for real k
    Eigen::MatrixXcd u = op.matrix_at(Complex(2.7, 0.0));
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);

    // det U(k) = e^{2ikL} det S
    const Complex det_u = Eigen::PartialPivLU<Eigen::MatrixXcd>(u).determinant();
    const Complex expected =
        std::exp(Complex(0.0, 2.0 * 2.7 * op.total_length())) * op.det_scattering();
    CHECK(std::abs(det_u - expected) < 1e-10);
  }
}

TEST_CASE("imaginary k damps every entry") {
  MetricGraph g = build_graph(k4_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const double t = 3.0;
  Eigen::MatrixXcd u = op.matrix_at(Complex(0.0, t));
  const double bound = std::exp(-t * op.min_bond_length()) *
                       op.bond_scattering().cwiseAbs().maxCoeff();
  CHECK(u.cwiseAbs().maxCoeff() <= bound * (1.0 + 1e-14));
}

TEST_CASE("theta detection") {
  // det S = (-1)^{B+V} for Neumann graphs
  CHECK(make_evolution_operator(build_graph(k4_spec())).theta() == 0.0);  // B+V = 10
  CHECK(make_evolution_operator(build_graph(path_spec())).theta() ==
        Catch::Approx(std::numbers::pi / 2));  // B+V = 5
  CHECK(make_evolution_operator(build_graph(five_vertex_spec())).theta() ==
        Catch::Approx(std::numbers::pi / 2));  // B+V = 13

  // a non-Neumann unitary vertex matrix pushes det S off +-1
  MetricGraph g = build_graph(triangle_spec());
  Eigen::MatrixXcd dft(2, 2);
  const Complex i(0.0, 1.0);
  dft << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), -i / std::sqrt(2.0);
  // not unitary: reject
  CHECK_THROWS_AS(make_evolution_operator(g, {{0, dft}}), Error);
  dft << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), i / std::sqrt(2.0), -i / std::sqrt(2.0);
  EvolutionOperator op = make_evolution_operator(g, {{0, dft}});
  CHECK_THROWS_WITH(op.theta(), "non-Neumann scattering matrix");
}

TEST_CASE("kernel dimension at zero equals B - V + 2") {
  for (const auto& spec : {interval_spec(), path_spec(), k4_spec(), five_vertex_spec(),
                           star_spec(4), triangle_spec()}) {
    MetricGraph g = build_graph(spec);
    EvolutionOperator op = make_evolution_operator(g);
    const int expected = g.bond_count() - g.vertex_count() + 2;
    CHECK(op.kernel_dimension() == expected);
    CHECK(kernel_dimension_at(op, Complex(0.0, 0.0)) == expected);
  }
}

TEST_CASE("eigenphases move continuously in k") {
  MetricGraph g = build_graph(path_spec());
  EvolutionOperator op = make_evolution_operator(g);
  const double dk = 1e-3;
  std::vector<double> prev;
  for (int step = 0; step <= 100; ++step) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix_at(Complex(1.0 + step * dk, 0.0)),
                                                   false);
    std::vector<double> phases;
    for (int j = 0; j < es.eigenvalues().size(); ++j)
      phases.push_back(std::arg(es.eigenvalues()[j]));
    std::sort(phases.begin(), phases.end());
    if (!prev.empty()) {
      for (std::size_t j = 0; j < phases.size(); ++j) {
        double gap = std::abs(phases[j] - prev[j]);
        gap = std::min(gap, 2.0 * std::numbers::pi - gap);  // wraparound
        CHECK(gap < 20.0 * dk * op.total_length());
      }
    }
    prev = phases;
  }
}
