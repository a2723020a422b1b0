// qgraph: spectral quantities of compact Neumann metric graphs via finite
// irreducible-pseudo-orbit expansions, cross-checked against matrix oracles.
//
// Exit codes: 0 success, 1 usage or input error, 2 verification failure,
// 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgraph/qgraph.hpp"

namespace {

using namespace qgraph;

struct GlobalOptions {
  std::string graph_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 12345;
  int workers = 0;  // 0: hardware concurrency
};

int effective_workers(const GlobalOptions& g) {
  if (g.workers > 0) return g.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

// Rows plus a config echo; rendered as CSV with a provenance header or as
// a JSON document.  Field order is fixed so output is byte-stable.
struct Table {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render_csv() const {
    std::ostringstream out;
    out << "# qgraph v1\n# command=" << command;
    for (const auto& [key, value] : config) out << " " << key << "=" << value;
    out << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << row[c] << (c + 1 < row.size() ? "," : "");
      out << "\n";
    }
    return out.str();
  }

  std::string render_json() const {
    nlohmann::ordered_json j;
    j["qgraph"] = "v1";
    j["command"] = command;
    for (const auto& [key, value] : config) j["config"][key] = value;
    j["columns"] = columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) j["rows"].push_back(row);
    return j.dump(2) + "\n";
  }

  void write(const GlobalOptions& opts) const {
    const std::string text = opts.format == "json" ? render_json() : render_csv();
    if (opts.out_path.empty()) {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      std::ofstream out(opts.out_path, std::ios::binary);
      if (!out) throw Error("cannot open output file: " + opts.out_path);
      out << text;
    }
  }
};

struct LoadedGraph {
  MetricGraph graph;
  EvolutionOperator op;
};

LoadedGraph load(const GlobalOptions& opts) {
  if (opts.graph_path.empty()) throw Error("--graph is required");
  MetricGraph g = load_graph(opts.graph_path);
  EvolutionOperator op = make_evolution_operator(g);
  return {std::move(g), std::move(op)};
}

// ---------------------------------------------------------------- commands

int run_spectrum(const GlobalOptions& opts, double k_max, double oversample) {
  auto [g, op] = load(opts);
  OrbitCatalog catalog(g, op);
  SpectrumOptions so;
  so.oversample = oversample;
  so.workers = effective_workers(opts);
  SpectrumResult sp = find_spectrum(catalog, k_max, so);

  Table t;
  t.command = "spectrum";
  t.config = {{"graph", opts.graph_path},
              {"kmax", fmt(k_max)},
              {"oversample", fmt(oversample)},
              {"kernel_dim_at_zero", std::to_string(sp.kernel_dim_at_zero)}};
  t.columns = {"index", "k", "multiplicity", "residual"};
  int index = 1;
  for (const auto& r : sp.roots)
    t.rows.push_back({std::to_string(index++), fmt(r.k), std::to_string(r.multiplicity),
                      fmt(r.residual)});
  t.write(opts);
  for (const auto& w : sp.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_coeffs(const GlobalOptions& opts, double k, const std::string& method) {
  auto [g, op] = load(opts);
  const Complex kk(k, 0.0);
  std::vector<Complex> values;
  if (method == "orbit") {
    OrbitCatalog catalog(g, op);
    values = coeffs_pseudo_orbit(catalog, kk).a;
  } else if (method == "direct") {
    values = coeffs_direct(op, kk).a;
  } else if (method == "newton") {
    values = coeffs_newton(op, kk).a;
  } else if (method == "partition") {
    for (int n = 0; n <= std::min(op.size(), kPartitionCap); ++n)
      values.push_back(coeffs_partition(op, kk, n));
  } else if (method == "primitive") {
    for (int n = 0; n <= std::min(op.size(), kPrimitiveCap); ++n)
      values.push_back(coeffs_primitive_expansion(g, op, kk, n));
  } else {
    throw Error("unknown method: " + method);
  }

  Table t;
  t.command = "coeffs";
  t.config = {{"graph", opts.graph_path}, {"k", fmt(k)}, {"method", method}};
  t.columns = {"n", "re", "im"};
  for (std::size_t n = 0; n < values.size(); ++n)
    t.rows.push_back({std::to_string(n), fmt(values[n].real()), fmt(values[n].imag())});
  t.write(opts);
  return 0;
}

int run_orbits(const GlobalOptions& opts, int max_total) {
  auto [g, op] = load(opts);
  OrbitCatalog catalog(g, op, max_total);

  Table t;
  t.command = "orbits";
  t.config = {{"graph", opts.graph_path}, {"max_total", std::to_string(catalog.max_total())}};
  t.columns = {"pseudo_orbit_id", "m", "B_topo", "l_metric", "A", "sign", "arc_list"};
  int id = 0;
  for (const auto& po : catalog.pseudo_orbits()) {
    std::string arcs;
    for (int oid : po.orbit_ids) {
      arcs += "(";
      const auto& orbit = catalog.orbits()[oid];
      for (std::size_t i = 0; i < orbit.arcs.size(); ++i)
        arcs += (i ? " " : "") + std::to_string(orbit.arcs[i]);
      arcs += ")";
    }
    t.rows.push_back({std::to_string(id++), std::to_string(po.orbit_count),
                      std::to_string(po.topological_length), fmt(po.metric_length),
                      fmt(po.amplitude.real()), std::to_string(po.sign()), arcs});
  }
  t.write(opts);
  return 0;
}

int run_matrix(const GlobalOptions& opts) {
  auto [g, op] = load(opts);
  Table t;
  t.command = "matrix";
  t.config = {{"graph", opts.graph_path}};
  t.columns = {"row", "col", "re", "im"};
  for (int row = 0; row < op.size(); ++row)
    for (int col = 0; col < op.size(); ++col) {
      const Complex v = op.bond_scattering()(row, col);
      if (v != Complex(0.0))
        t.rows.push_back({std::to_string(row), std::to_string(col), fmt(v.real()),
                          fmt(v.imag())});
    }
  t.write(opts);
  return 0;
}

int run_variance(const GlobalOptions& opts, long long samples, double k_max) {
  auto [g, op] = load(opts);
  OrbitCatalog catalog(g, op);
  if (k_max <= 0.0) k_max = 2000.0 * std::numbers::pi / op.total_length();
  auto numeric = variance_numeric(op, samples, k_max, opts.seed, effective_workers(opts));
  auto pair = variance_pair(catalog);
  auto diagonal = variance_diagonal(catalog);
  auto coe = variance_rmt(g.bond_count(), 1);
  auto cue = variance_rmt(g.bond_count(), 2);

  Table t;
  t.command = "variance";
  t.config = {{"graph", opts.graph_path},
              {"samples", std::to_string(samples)},
              {"kmax", fmt(k_max)},
              {"seed", std::to_string(opts.seed)}};
  t.columns = {"n", "numeric", "se", "pair", "diagonal", "coe", "cue"};
  for (int n = 0; n <= op.size(); ++n)
    t.rows.push_back({std::to_string(n), fmt(numeric.value[n]), fmt(numeric.std_error[n]),
                      fmt(pair.value[n]), fmt(diagonal.value[n]), fmt(coe.value[n]),
                      fmt(cue.value[n])});
  t.write(opts);
  return 0;
}

int run_specdet(const GlobalOptions& opts, const std::string& grid_spec,
                const std::string& method) {
  auto [g, op] = load(opts);
  OrbitCatalog catalog(g, op);

  double a = 0.5, b = 10.0;
  int count = 5;
  if (!grid_spec.empty()) {
    char colon1 = 0, colon2 = 0;
    std::istringstream in(grid_spec);
    if (!(in >> a >> colon1 >> b >> colon2 >> count) || colon1 != ':' || colon2 != ':' ||
        count < 1 || !(b >= a))
      throw Error("--lambda-grid expects a:b:n");
  }

  Table t;
  t.command = "specdet";
  t.config = {{"graph", opts.graph_path}, {"lambda_grid", grid_spec.empty() ? "default" : grid_spec},
              {"method", method}};
  t.columns = {"lambda", "method", "value"};
  for (int i = 0; i < count; ++i) {
    const double lambda = count == 1 ? a : a + (b - a) * i / (count - 1);
    if (method == "orbit" || method == "both")
      t.rows.push_back({fmt(lambda), "orbit_sum", fmt(spectral_determinant_orbits(catalog, lambda))});
    if (method == "integral" || method == "both")
      t.rows.push_back(
          {fmt(lambda), "integral_oracle", fmt(spectral_determinant_integral(op, lambda))});
  }
  t.write(opts);
  return 0;
}

int run_vacuum(const GlobalOptions& opts, int force_bond) {
  auto [g, op] = load(opts);
  OrbitCatalog catalog(g, op);

  Table t;
  t.command = "vacuum";
  t.config = {{"graph", opts.graph_path}};
  t.columns = {"quantity", "method", "value", "error_estimate", "note"};
  ScalarReport orbit_report, matrix_report;
  vacuum_energy(catalog, {}, VacuumRoute::orbit_sum, &orbit_report);
  vacuum_energy(catalog, {}, VacuumRoute::matrix, &matrix_report);
  t.rows.push_back({"vacuum", "orbit_sum", fmt(orbit_report.value),
                    fmt(orbit_report.error_estimate), orbit_report.note});
  t.rows.push_back({"vacuum", "integral_oracle", fmt(matrix_report.value),
                    fmt(matrix_report.error_estimate), matrix_report.note});
  if (force_bond >= 0)
    t.rows.push_back({"force_bond_" + std::to_string(force_bond), "orbit_sum",
                      fmt(casimir_force(g, force_bond)), "", ""});
  t.write(opts);
  return 0;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int run_verify(const GlobalOptions& opts, int samples, double k_max) {
  auto [g, op] = load(opts);
  OrbitCatalog catalog(g, op);
  const int workers = effective_workers(opts);
  std::vector<Check> checks;

  // four-way characteristic polynomial agreement over a seeded k sweep,
  // block-parallel with an order-independent max reduction
  const int blocks = (samples + 31) / 32;
  std::vector<double> worst_orbit(blocks, 0.0), worst_newton(blocks, 0.0),
      worst_sym(blocks, 0.0);
  auto sweep_block = [&](int block) {
    for (int i = block * 32; i < std::min(samples, (block + 1) * 32); ++i) {
      const Complex k(k_max * (1.0 - SplitMix64::to_unit(SplitMix64::at(opts.seed, i))), 0.0);
      const auto direct = coeffs_direct(op, k);
      const auto orbit = coeffs_pseudo_orbit(catalog, k);
      const auto newton = coeffs_newton(op, k);
      for (int n = 0; n <= direct.degree(); ++n) {
        worst_orbit[block] = std::max(worst_orbit[block], std::abs(orbit.a[n] - direct.a[n]));
        worst_newton[block] = std::max(worst_newton[block], std::abs(newton.a[n] - direct.a[n]));
      }
      worst_sym[block] = std::max(worst_sym[block], check_symmetry(direct));
    }
  };
  if (workers == 1) {
    for (int b = 0; b < blocks; ++b) sweep_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int b = w; b < blocks; b += workers) sweep_block(b);
      });
    for (auto& th : pool) th.join();
  }
  double orbit_residual = 0.0, newton_residual = 0.0, symmetry_residual = 0.0;
  for (int b = 0; b < blocks; ++b) {
    orbit_residual = std::max(orbit_residual, worst_orbit[b]);
    newton_residual = std::max(newton_residual, worst_newton[b]);
    symmetry_residual = std::max(symmetry_residual, worst_sym[b]);
  }
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), "max|delta| = %.3e over %d k", orbit_residual, samples);
  checks.push_back({"charpoly_orbit_vs_direct", orbit_residual < 1e-9, buffer});
  std::snprintf(buffer, sizeof(buffer), "max|delta| = %.3e over %d k", newton_residual, samples);
  checks.push_back({"charpoly_newton_vs_direct", newton_residual < 1e-8, buffer});
  std::snprintf(buffer, sizeof(buffer), "max residual = %.3e", symmetry_residual);
  checks.push_back({"symmetry_relation", symmetry_residual < 1e-10, buffer});

  // partition and primitive routes on their capped ranges, one k
  {
    const Complex k(k_max * 0.37, 0.0);
    const auto direct = coeffs_direct(op, k);
    double worst = 0.0;
    for (int n = 0; n <= std::min(op.size(), kPartitionCap); ++n)
      worst = std::max(worst, std::abs(coeffs_partition(op, k, n) - direct.a[n]));
    std::snprintf(buffer, sizeof(buffer), "max|delta| = %.3e for n <= %d", worst,
                  std::min(op.size(), kPartitionCap));
    checks.push_back({"charpoly_partition_vs_direct", worst < 1e-8, buffer});

    worst = 0.0;
    for (int n = 0; n <= std::min(op.size(), kPrimitiveCap); ++n)
      worst = std::max(worst, std::abs(coeffs_primitive_expansion(g, op, k, n) - direct.a[n]));
    std::snprintf(buffer, sizeof(buffer), "max|delta| = %.3e for n <= %d", worst,
                  std::min(op.size(), kPrimitiveCap));
    checks.push_back({"charpoly_primitive_vs_direct", worst < 1e-9, buffer});
  }

  // secular function, real axis and imaginary axis
  {
    double worst_real = 0.0;
    for (int i = 0; i < 2 * samples; ++i) {
      const double k = k_max * (1.0 - SplitMix64::to_unit(SplitMix64::at(opts.seed + 1, i)));
      const double fo = secular_orbit(catalog, k);
      const double fd = secular_direct(op, k);
      worst_real = std::max(worst_real, std::abs(fo - fd) / std::max(1.0, std::abs(fd)));
    }
    std::snprintf(buffer, sizeof(buffer), "max rel = %.3e over %d k", worst_real, 2 * samples);
    checks.push_back({"secular_orbit_vs_direct_real", worst_real < 1e-9, buffer});

    Fhat orbit_route(&catalog, op, FhatRoute::orbit);
    Fhat matrix_route(nullptr, op, FhatRoute::matrix);
    double worst_imag = 0.0;
    for (int i = 0; i < 2 * samples; ++i) {
      const double t = 0.01 + (50.0 - 0.01) * SplitMix64::to_unit(SplitMix64::at(opts.seed + 2, i));
      const double a = orbit_route.imag_axis(t);
      const double b = matrix_route.imag_axis(t);
      worst_imag = std::max(worst_imag, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    std::snprintf(buffer, sizeof(buffer), "max rel = %.3e on t in [0.01, 50]", worst_imag);
    checks.push_back({"secular_orbit_vs_direct_imag", worst_imag < 1e-9, buffer});
  }

  // kernel dimension at k = 0
  {
    const int expected = g.bond_count() - g.vertex_count() + 2;
    const int measured = kernel_dimension_at(op, Complex(0.0, 0.0));
    std::snprintf(buffer, sizeof(buffer), "dim = %d, expected %d", measured, expected);
    checks.push_back({"kernel_dimension", measured == expected, buffer});
  }

  // partition identity in exact arithmetic
  {
    bool pass = lemma_partition_identity(1) == Rational(-1);
    for (int q = 2; q <= 12; ++q) pass = pass && lemma_partition_identity(q).is_zero();
    checks.push_back({"lemma_partition_identity", pass, "q = 1..12 exact"});
  }

  Table t;
  t.command = "verify";
  t.config = {{"graph", opts.graph_path},
              {"seed", std::to_string(opts.seed)},
              {"samples", std::to_string(samples)},
              {"kmax", fmt(k_max)}};
  t.columns = {"check", "result", "detail"};
  bool all_pass = true;
  for (const auto& c : checks) {
    t.rows.push_back({c.name, c.pass ? "pass" : "FAIL", c.detail});
    all_pass = all_pass && c.pass;
  }
  t.rows.push_back({"overall", all_pass ? "pass" : "FAIL", ""});
  t.write(opts);
  if (!all_pass) {
    for (const auto& c : checks)
      if (!c.pass) std::cerr << "verification failed: " << c.name << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions global;
  CLI::App app{"spectral quantities of Neumann metric graphs via finite pseudo-orbit expansions"};
  app.require_subcommand(1);
  app.add_option("--graph", global.graph_path, "graph JSON file")->expected(1);
  app.add_option("--out", global.out_path, "output path (default stdout)");
  app.add_option("--format", global.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", global.seed, "sampling seed");
  app.add_option("--workers", global.workers, "worker threads (0 = auto)");

  double k_max = 50.0, oversample = 8.0, k_value = 1.0;
  long long samples = 20000;
  int verify_samples = 40;
  std::string method = "orbit", specdet_method = "both", lambda_grid;
  int max_total = -1, force_bond = -1;

  auto* spectrum = app.add_subcommand("spectrum", "positive roots of the secular function");
  spectrum->add_option("--kmax", k_max, "scan limit")->required();
  spectrum->add_option("--oversample", oversample, "grid points per mean spacing");

  auto* coeffs = app.add_subcommand("coeffs", "characteristic polynomial coefficients");
  coeffs->add_option("--k", k_value, "evaluation point")->required();
  coeffs->add_option("--method", method, "orbit|direct|newton|partition|primitive");

  auto* orbits_cmd = app.add_subcommand("orbits", "irreducible pseudo-orbit listing");
  orbits_cmd->add_option("--max-total", max_total, "topological length cutoff (default 2B)");

  auto* variance = app.add_subcommand("variance", "coefficient variance by all methods");
  variance->add_option("--samples", samples, "k samples for the numeric average");
  double variance_kmax = 0.0;
  variance->add_option("--kmax", variance_kmax, "k range (default about 2000 mean spacings)");

  auto* specdet = app.add_subcommand("specdet", "spectral determinant");
  specdet->add_option("--lambda-grid", lambda_grid, "a:b:n grid (default 0.5:10:5)");
  specdet->add_option("--method", specdet_method, "orbit|integral|both");

  auto* vacuum = app.add_subcommand("vacuum", "vacuum energy (both routes)");
  vacuum->add_option("--force", force_bond, "also report the force on this bond");

  auto* verify = app.add_subcommand("verify", "run the oracle-equivalence suite");
  verify->add_option("--samples", verify_samples, "k samples per sweep");
  double verify_kmax = 50.0;
  verify->add_option("--kmax", verify_kmax, "sweep range");

  auto* matrix = app.add_subcommand("matrix", "dump the bond-scattering matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(global, k_max, oversample);
    if (coeffs->parsed()) return run_coeffs(global, k_value, method);
    if (orbits_cmd->parsed()) return run_orbits(global, max_total);
    if (variance->parsed()) return run_variance(global, samples, variance_kmax);
    if (specdet->parsed()) return run_specdet(global, lambda_grid, specdet_method);
    if (vacuum->parsed()) return run_vacuum(global, force_bond);
    if (verify->parsed()) return run_verify(global, verify_samples, verify_kmax);
    if (matrix->parsed()) return run_matrix(global);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // input and configuration problems are usage errors; anything raised
    // during computation is a numeric failure
    const std::string what = e.what();
    const bool usage = what.find("graph") != std::string::npos ||
                       what.find("--") != std::string::npos ||
                       what.find("unknown") != std::string::npos ||
                       what.find("forbidden") != std::string::npos ||
                       what.find("must be") != std::string::npos ||
                       what.find("required") != std::string::npos ||
                       what.find("cannot open") != std::string::npos;
    return usage ? 1 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
