#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "qgraph/graph.hpp"

namespace qgraph {

using Complex = std::complex<double>;

class EvolutionOperator;

namespace detail {
EvolutionOperator assemble_operator(const MetricGraph& g,
                                    const std::map<int, Eigen::MatrixXcd>& vertex_matrices);
}  // namespace detail

/// Neumann vertex-scattering matrix for a vertex of degree d:
/// entries 2/d off the diagonal and 2/d - 1 on it.  Symmetric, orthogonal,
/// and doubly stochastic in squared entries.
inline Eigen::MatrixXd vertex_scattering_matrix(int degree) {
  if (degree < 1) throw Error("vertex degree must be at least 1");
  const double off = 2.0 / degree;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(degree, degree, off);
  sigma.diagonal().array() -= 1.0;
  return sigma;
}

/// The k-independent bond-scattering matrix S together with the arc
/// lengths; U(k) = diag(e^{ik l}) S is produced on demand.  S couples an
/// incoming arc b to an outgoing arc b' only when t(b) = o(b'), with the
/// vertex-scattering element between the local slots.  For Neumann graphs
/// det S = +1 or -1, giving theta = 0 or pi/2.
class EvolutionOperator {
 public:
  int size() const { return static_cast<int>(lengths_.size()); }  // 2B
  int bond_count() const { return size() / 2; }
  int vertex_count() const { return vertex_count_; }
  double total_length() const { return total_length_; }

  const Eigen::MatrixXcd& bond_scattering() const { return s_; }
  const Eigen::VectorXd& arc_lengths() const { return lengths_; }
  double min_bond_length() const { return lengths_.minCoeff(); }

  /// U(k) for any complex k: row b of S scaled by e^{ik l_b}.
  Eigen::MatrixXcd matrix_at(Complex k) const {
    Eigen::MatrixXcd u = s_;
    for (int b = 0; b < size(); ++b)
      u.row(b) *= std::exp(Complex(0.0, 1.0) * k * lengths_[b]);
    return u;
  }

  Complex det_scattering() const { return det_s_; }

  /// theta with det S = e^{2 i theta}; 0 or pi/2 for Neumann conditions.
  double theta() const {
    constexpr double tol = 1e-8;
    if (std::abs(det_s_ - Complex(1.0)) < tol) return 0.0;
    if (std::abs(det_s_ - Complex(-1.0)) < tol) return std::numbers::pi / 2.0;
    throw Error("non-Neumann scattering matrix");
  }

  /// dim ker(I - U(0)); equals B - V + 2 for connected Neumann graphs.
  int kernel_dimension() const { return bond_count() - vertex_count_ + 2; }

 private:
  EvolutionOperator() = default;
  friend EvolutionOperator detail::assemble_operator(const MetricGraph&,
                                                     const std::map<int, Eigen::MatrixXcd>&);

  Eigen::MatrixXcd s_;
  Eigen::VectorXd lengths_;
  Complex det_s_{1.0, 0.0};
  int vertex_count_ = 0;
  double total_length_ = 0.0;
};

namespace detail {

inline void check_unitary(const Eigen::MatrixXcd& m, double tol, const char* what) {
  const Eigen::MatrixXcd res = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  if (res.cwiseAbs().maxCoeff() > tol) throw Error(std::string(what) + " is not unitary");
}

inline EvolutionOperator assemble_operator(const MetricGraph& g,
                                           const std::map<int, Eigen::MatrixXcd>& vertex_matrices) {
  const int n = g.arc_count();
  if (n > 64) throw Error("graphs with more than 32 bonds are not supported");
  EvolutionOperator op;
  op.s_ = Eigen::MatrixXcd::Zero(n, n);
  op.lengths_.resize(n);
  op.vertex_count_ = g.vertex_count();
  op.total_length_ = g.total_length();
  for (int arc = 0; arc < n; ++arc) op.lengths_[arc] = g.arc_length(arc);

  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& out_arcs = g.arcs_from(v);
    const int d = static_cast<int>(out_arcs.size());
    Eigen::MatrixXcd sigma;
    if (auto it = vertex_matrices.find(v); it != vertex_matrices.end()) {
      sigma = it->second;
      if (sigma.rows() != d || sigma.cols() != d)
        throw Error("vertex matrix size mismatch at vertex " + g.vertex_label(v));
      check_unitary(sigma, 1e-12, "vertex matrix");
    } else {
      sigma = vertex_scattering_matrix(d).cast<Complex>();
    }
    // Incoming arc b with t(b) = v occupies the slot of its reversal
    // among the arcs leaving v.
    for (int row = 0; row < d; ++row)
      for (int col = 0; col < d; ++col)
        op.s_(out_arcs[row], g.reverse(out_arcs[col])) = sigma(row, col);
  }

  check_unitary(op.s_, 1e-12, "bond-scattering matrix");
  op.det_s_ = Eigen::PartialPivLU<Eigen::MatrixXcd>(op.s_).determinant();
  return op;
}

}  // namespace detail

inline EvolutionOperator make_evolution_operator(const MetricGraph& g) {
  return detail::assemble_operator(g, {});
}

/// Extension point: replace the Neumann matrix at selected vertices by any
/// k-independent unitary of matching size.
inline EvolutionOperator make_evolution_operator(const MetricGraph& g,
                                                 const std::map<int, Eigen::MatrixXcd>& vertex_matrices) {
  return detail::assemble_operator(g, vertex_matrices);
}

inline Eigen::MatrixXcd evolution_operator(const EvolutionOperator& op, Complex k) {
  return op.matrix_at(k);
}

inline double theta(const EvolutionOperator& op) { return op.theta(); }

/// Number of singular values of I - U(k) below `tol`.
inline int kernel_dimension_at(const EvolutionOperator& op, Complex k, double tol = 1e-8) {
  const Eigen::MatrixXcd m =
      Eigen::MatrixXcd::Identity(op.size(), op.size()) - op.matrix_at(k);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  int count = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] < tol) ++count;
  return count;
}

}  // namespace qgraph
