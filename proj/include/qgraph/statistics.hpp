#pragma once

#include <string>
#include <thread>
#include <vector>

#include "qgraph/charpoly.hpp"

namespace qgraph {

/// Variance of the characteristic-polynomial coefficients, value[n] for
/// n = 0..2B.  The numeric method carries per-coefficient standard errors;
/// the others are deterministic.
struct VarianceCurve {
  std::string method;  // numeric | pair_sum | diagonal | rmt_coe | rmt_cue
  std::vector<double> value;
  std::vector<double> std_error;
  long long samples = 0;
  double k_max = 0.0;
};

/// <|a_n|^2> over uniformly random k in (0, k_max], coefficients from the
/// eigenvalue route.  Samples are indexed into the SplitMix64 stream and
/// accumulated in fixed blocks, so the result is bit-identical for any
/// worker count.
inline VarianceCurve variance_numeric(const EvolutionOperator& op, long long n_samples,
                                      double k_max, std::uint64_t seed, int workers = 1) {
  const int two_b = op.size();
  const int coeffs = two_b + 1;
  constexpr long long kBlock = 512;
  const long long blocks = (n_samples + kBlock - 1) / kBlock;

  std::vector<double> sum(coeffs * blocks, 0.0);
  std::vector<double> sum_sq(coeffs * blocks, 0.0);

  auto run_block = [&](long long block) {
    const long long begin = block * kBlock;
    const long long end = std::min(begin + kBlock, n_samples);
    double* s = &sum[block * coeffs];
    double* s2 = &sum_sq[block * coeffs];
    for (long long i = begin; i < end; ++i) {
      const double u = SplitMix64::to_unit(SplitMix64::at(seed, static_cast<std::uint64_t>(i)));
      const double k = k_max * (1.0 - u);  // in (0, k_max]
      const CoefficientVector c = coeffs_direct(op, Complex(k, 0.0));
      for (int n = 0; n < coeffs; ++n) {
        const double mod2 = std::norm(c.a[n]);
        s[n] += mod2;
        s2[n] += mod2 * mod2;
      }
    }
  };

  const int pool_size = std::max(1, workers);
  if (pool_size == 1) {
    for (long long b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < pool_size; ++w)
      pool.emplace_back([&, w] {
        for (long long b = w; b < blocks; b += pool_size) run_block(b);
      });
    for (auto& t : pool) t.join();
  }

  VarianceCurve curve;
  curve.method = "numeric";
  curve.samples = n_samples;
  curve.k_max = k_max;
  curve.value.assign(coeffs, 0.0);
  curve.std_error.assign(coeffs, 0.0);
  for (int n = 0; n < coeffs; ++n) {
    double total = 0.0, total_sq = 0.0;
    for (long long b = 0; b < blocks; ++b) {
      total += sum[b * coeffs + n];
      total_sq += sum_sq[b * coeffs + n];
    }
    const double mean = total / n_samples;
    const double var = std::max(0.0, total_sq / n_samples - mean * mean);
    curve.value[n] = mean;
    curve.std_error[n] = std::sqrt(var / n_samples);
  }
  return curve;
}

/// Exact pair sum: pseudo orbits of equal topological length contribute
/// when their metric lengths coincide, which for incommensurate bond
/// lengths means equal undirected visit profiles.  Grouping by profile
/// turns the double sum into sum over groups of |sum (-1)^m A|^2.
inline VarianceCurve variance_pair(const OrbitCatalog& catalog) {
  const int two_b = catalog.op().size();
  if (catalog.max_total() < two_b) throw Error("orbit catalog truncated below 2B");
  VarianceCurve curve;
  curve.method = "pair_sum";
  curve.value.assign(two_b + 1, 0.0);
  for (int n = 0; n <= two_b; ++n)
    for (const auto& term : catalog.terms(n)) curve.value[n] += std::norm(term.weight);
  return curve;
}

/// Diagonal approximation: each pseudo orbit paired with the 2^m
/// reversals of subsets of its orbits; no self-retracing correction.
inline VarianceCurve variance_diagonal(const OrbitCatalog& catalog) {
  const int two_b = catalog.op().size();
  if (catalog.max_total() < two_b) throw Error("orbit catalog truncated below 2B");
  VarianceCurve curve;
  curve.method = "diagonal";
  curve.value.assign(two_b + 1, 0.0);
  for (const auto& po : catalog.pseudo_orbits())
    curve.value[po.topological_length] +=
        std::pow(2.0, po.orbit_count) * std::norm(po.amplitude);
  return curve;
}

/// Random-matrix benchmarks for a 2B x 2B matrix: COE (beta = 1) gives
/// 1 + n(2B-n)/(2B+1); CUE (beta = 2) gives 1 for every n.
inline VarianceCurve variance_rmt(int bond_count, int beta) {
  if (beta != 1 && beta != 2) throw Error("beta must be 1 (COE) or 2 (CUE)");
  const int two_b = 2 * bond_count;
  VarianceCurve curve;
  curve.method = beta == 1 ? "rmt_coe" : "rmt_cue";
  curve.value.assign(two_b + 1, 1.0);
  if (beta == 1)
    for (int n = 0; n <= two_b; ++n)
      curve.value[n] = 1.0 + static_cast<double>(n) * (two_b - n) / (two_b + 1);
  return curve;
}

}  // namespace qgraph
