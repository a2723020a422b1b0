#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/rng.hpp"

namespace qgraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bond lengths drawn uniformly from [min, max); one SplitMix64 draw per
// canonical bond index, so adding explicit lengths elsewhere in the file
// does not shift the values of the remaining random bonds.
struct RandomLengths {
  std::uint64_t seed = 0;
  double min = 0.0;
  double max = 1.0;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  double length = 0.0;  // ignored when random is set
  bool random = false;
};

/// Input for build_graph.  Vertex labels must be distinct; edges must not
/// form loops or connect the same unordered vertex pair twice.
struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
  std::optional<RandomLengths> random_lengths;
};

/// A compact connected metric graph with canonical directed-bond indexing.
///
/// Undirected bonds are sorted by (min label, max label).  Directed bond
/// i < B runs from the lexicographically smaller endpoint to the larger
/// one, and i + B is its reversal, so reverse() is an involution and
/// lengths are reversal-symmetric.  Instances are immutable; all methods
/// are const and safe to call concurrently.
class MetricGraph {
 public:
  struct BondRecord {
    std::string from;  // lexicographically smaller label
    std::string to;
    double length;
  };

  int vertex_count() const { return static_cast<int>(labels_.size()); }
  int bond_count() const { return bonds_; }
  int arc_count() const { return 2 * bonds_; }
  double total_length() const { return total_length_; }

  int origin(int arc) const { return origin_[arc]; }
  int terminus(int arc) const { return origin_[reverse(arc)]; }
  int reverse(int arc) const { return arc < bonds_ ? arc + bonds_ : arc - bonds_; }
  int bond_of(int arc) const { return arc < bonds_ ? arc : arc - bonds_; }
  double arc_length(int arc) const { return lengths_[bond_of(arc)]; }
  double bond_length(int bond) const { return lengths_[bond]; }

  int degree(int v) const { return static_cast<int>(arcs_from_[v].size()); }
  const std::vector<int>& arcs_from(int v) const { return arcs_from_[v]; }
  // Directed bonds b' with o(b') = t(arc); includes the reversal of `arc`.
  const std::vector<int>& successors(int arc) const { return arcs_from_[terminus(arc)]; }

  const std::string& vertex_label(int v) const { return labels_[v]; }
  int vertex_index(const std::string& label) const {
    for (int v = 0; v < vertex_count(); ++v)
      if (labels_[v] == label) return v;
    throw Error("unknown vertex label: " + label);
  }

  // Canonical bond list with resolved lengths; basis for re-specification
  // (subdivision, length perturbations) and for file output.
  const std::vector<BondRecord>& bonds() const { return records_; }

  GraphSpec to_spec() const {
    GraphSpec spec;
    spec.vertices = labels_;
    for (const auto& r : records_) spec.edges.push_back({r.from, r.to, r.length, false});
    return spec;
  }

 private:
  MetricGraph() = default;
  friend MetricGraph build_graph(const GraphSpec& spec);

  std::vector<std::string> labels_;
  int bonds_ = 0;
  std::vector<int> origin_;                  // size 2B
  std::vector<double> lengths_;              // size B, index = bond
  std::vector<std::vector<int>> arcs_from_;  // per vertex, ascending arc index
  std::vector<BondRecord> records_;
  double total_length_ = 0.0;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

inline MetricGraph build_graph(const GraphSpec& spec) {
  if (spec.vertices.empty()) throw Error("graph must have at least one vertex");
  std::map<std::string, int> index;
  for (int v = 0; v < static_cast<int>(spec.vertices.size()); ++v) {
    if (spec.vertices[v].empty()) throw Error("vertex labels must be non-empty");
    if (!index.emplace(spec.vertices[v], v).second)
      throw Error("duplicate vertex label: " + spec.vertices[v]);
  }
  if (spec.edges.empty()) throw Error("graph must have at least one bond");

  struct Pending {
    std::string from, to;  // from < to
    double length;
    bool random;
  };
  std::vector<Pending> pending;
  std::map<std::pair<std::string, std::string>, bool> seen;
  for (const auto& e : spec.edges) {
    if (!index.count(e.from)) throw Error("unknown vertex label: " + e.from);
    if (!index.count(e.to)) throw Error("unknown vertex label: " + e.to);
    if (e.from == e.to) throw Error("loops forbidden");
    Pending p{std::min(e.from, e.to), std::max(e.from, e.to), e.length, e.random};
    if (!seen.emplace(std::make_pair(p.from, p.to), true).second)
      throw Error("multi-edges forbidden");
    pending.push_back(std::move(p));
  }
  std::sort(pending.begin(), pending.end(),
            [](const Pending& a, const Pending& b) {
              return std::tie(a.from, a.to) < std::tie(b.from, b.to);
            });

  if (spec.random_lengths) {
    const auto& rl = *spec.random_lengths;
    if (!(rl.min < rl.max) || !std::isfinite(rl.min) || !std::isfinite(rl.max))
      throw Error("random length bounds must satisfy min < max and be finite");
    for (std::size_t i = 0; i < pending.size(); ++i)
      if (pending[i].random)
        pending[i].length = rl.min + (rl.max - rl.min) * SplitMix64::to_unit(SplitMix64::at(rl.seed, i));
  } else {
    for (const auto& p : pending)
      if (p.random) throw Error("explicit length required for edge " + p.from + "-" + p.to);
  }
  for (const auto& p : pending)
    if (!(p.length > 0.0) || !std::isfinite(p.length)) throw Error("length must be positive");

  detail::UnionFind uf(static_cast<int>(spec.vertices.size()));
  for (const auto& p : pending) uf.unite(index[p.from], index[p.to]);
  for (int v = 1; v < static_cast<int>(spec.vertices.size()); ++v)
    if (uf.find(v) != uf.find(0)) throw Error("graph must be connected");

  MetricGraph g;
  g.labels_ = spec.vertices;
  g.bonds_ = static_cast<int>(pending.size());
  g.origin_.resize(2 * g.bonds_);
  g.lengths_.resize(g.bonds_);
  g.arcs_from_.resize(spec.vertices.size());
  for (int b = 0; b < g.bonds_; ++b) {
    const auto& p = pending[b];
    g.origin_[b] = index[p.from];
    g.origin_[b + g.bonds_] = index[p.to];
    g.lengths_[b] = p.length;
    g.records_.push_back({p.from, p.to, p.length});
  }
  for (int arc = 0; arc < 2 * g.bonds_; ++arc) g.arcs_from_[g.origin_[arc]].push_back(arc);
  g.total_length_ = 0.0;
  for (double l : g.lengths_) g.total_length_ += l;
  return g;
}

/// Split one bond at `fraction` of its length with a fresh degree-two
/// vertex.  Total length is preserved; with Neumann conditions the
/// k-spectrum is unchanged.
inline MetricGraph subdivide_bond(const MetricGraph& g, int bond_index, double fraction) {
  if (bond_index < 0 || bond_index >= g.bond_count()) throw Error("invalid bond index");
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error("fraction must be in (0,1)");

  const auto& rec = g.bonds()[bond_index];
  std::string mid = rec.from + "*" + rec.to;
  auto taken = [&](const std::string& s) {
    for (int v = 0; v < g.vertex_count(); ++v)
      if (g.vertex_label(v) == s) return true;
    return false;
  };
  while (taken(mid)) mid += "'";

  const double first = fraction * rec.length;
  const double second = rec.length - first;

  GraphSpec spec = g.to_spec();
  spec.vertices.push_back(mid);
  spec.edges.erase(spec.edges.begin() + bond_index);
  spec.edges.push_back({rec.from, mid, first, false});
  spec.edges.push_back({mid, rec.to, second, false});
  return build_graph(spec);
}

/// Copy of the graph with one bond length replaced (used for finite
/// differences of spectral quantities in a bond length).
inline MetricGraph with_bond_length(const MetricGraph& g, int bond_index, double new_length) {
  if (bond_index < 0 || bond_index >= g.bond_count()) throw Error("invalid bond index");
  if (!(new_length > 0.0)) throw Error("length must be positive");
  GraphSpec spec = g.to_spec();
  spec.edges[bond_index].length = new_length;
  return build_graph(spec);
}

}  // namespace qgraph
