#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "qgraph/scattering.hpp"

namespace qgraph {

/// A periodic orbit: a closed arc sequence with t(b_i) = o(b_{i+1})
/// cyclically, stored in its lexicographically least rotation.  Orbits
/// produced by the arc-simple enumerator never repeat a directed bond and
/// have repetition number 1; the primitive-walk enumerator may repeat arcs
/// but rejects proper repetitions of shorter walks.
struct PeriodicOrbit {
  std::vector<int> arcs;
  std::uint64_t arc_mask = 0;
  int topological_length = 0;
  double metric_length = 0.0;
  Complex amplitude{1.0, 0.0};  // product of S entries around the orbit
  int repetition = 1;
  bool self_retracing = false;  // equal to its own reversal
};

/// A collection of periodic orbits.  Irreducible pseudo orbits use no
/// directed bond more than once across all members; the null pseudo orbit
/// is the empty collection with amplitude 1.
struct PseudoOrbit {
  std::vector<int> orbit_ids;  // indices into the generating orbit list
  std::uint64_t arc_mask = 0;
  int orbit_count = 0;         // m
  int topological_length = 0;  // total arcs
  double metric_length = 0.0;
  Complex amplitude{1.0, 0.0};

  int sign() const { return (orbit_count % 2 == 0) ? 1 : -1; }
};

namespace detail {

inline std::vector<int> least_rotation(const std::vector<int>& seq) {
  const int n = static_cast<int>(seq.size());
  int best = 0;
  for (int cand = 1; cand < n; ++cand) {
    for (int i = 0; i < n; ++i) {
      const int a = seq[(cand + i) % n], b = seq[(best + i) % n];
      if (a != b) {
        if (a < b) best = cand;
        break;
      }
    }
  }
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = seq[(best + i) % n];
  return out;
}

inline int smallest_period(const std::vector<int>& seq) {
  const int n = static_cast<int>(seq.size());
  for (int p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (int i = p; i < n && ok; ++i) ok = (seq[i] == seq[i - p]);
    if (ok) return p;
  }
  return n;
}

}  // namespace detail

/// Canonical form of a cyclic arc sequence: its least rotation.
inline std::vector<int> canonical_rotation(const std::vector<int>& arcs) {
  return detail::least_rotation(arcs);
}

inline Complex orbit_amplitude(const EvolutionOperator& op, const std::vector<int>& arcs) {
  const int n = static_cast<int>(arcs.size());
  Complex a{1.0, 0.0};
  for (int i = 0; i < n; ++i) a *= op.bond_scattering()(arcs[(i + 1) % n], arcs[i]);
  return a;
}

inline Complex orbit_amplitude(const EvolutionOperator& op, const PeriodicOrbit& orbit) {
  return orbit_amplitude(op, orbit.arcs);
}

namespace detail {

inline PeriodicOrbit make_orbit(const MetricGraph& g, std::vector<int> arcs) {
  PeriodicOrbit orbit;
  orbit.arcs = std::move(arcs);
  orbit.topological_length = static_cast<int>(orbit.arcs.size());
  for (int arc : orbit.arcs) {
    orbit.arc_mask |= std::uint64_t{1} << arc;
    orbit.metric_length += g.arc_length(arc);
  }
  std::vector<int> reversed;
  for (auto it = orbit.arcs.rbegin(); it != orbit.arcs.rend(); ++it)
    reversed.push_back(g.reverse(*it));
  orbit.self_retracing = (least_rotation(reversed) == orbit.arcs);
  return orbit;
}

}  // namespace detail

/// All closed arc sequences of length <= max_len in which no directed bond
/// appears twice, one per cyclic class, sorted by (length, arc sequence).
inline std::vector<PeriodicOrbit> enumerate_arc_simple_orbits(const MetricGraph& g,
                                                              int max_len = -1) {
  const int n_arcs = g.arc_count();
  if (n_arcs > 64) throw Error("graphs with more than 32 bonds are not supported");
  if (max_len < 0 || max_len > n_arcs) max_len = n_arcs;

  std::vector<PeriodicOrbit> out;
  std::vector<int> path;
  std::uint64_t used = 0;

  // Restricting every arc to be >= the start arc makes the start arc the
  // minimum of the cycle, so each cyclic class is produced exactly once
  // and already in canonical rotation.
  auto extend = [&](auto&& self, int start) -> void {
    const int last = path.back();
    for (int next : g.successors(last)) {
      if (next == start && path.size() >= 2) out.push_back(detail::make_orbit(g, path));
      if (next <= start) continue;
      if (used & (std::uint64_t{1} << next)) continue;
      if (static_cast<int>(path.size()) >= max_len) continue;
      path.push_back(next);
      used |= std::uint64_t{1} << next;
      self(self, start);
      used &= ~(std::uint64_t{1} << next);
      path.pop_back();
    }
  };

  for (int start = 0; start < n_arcs; ++start) {
    path.assign(1, start);
    used = std::uint64_t{1} << start;
    extend(extend, start);
  }

  std::sort(out.begin(), out.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.topological_length != b.topological_length)
      return a.topological_length < b.topological_length;
    return a.arcs < b.arcs;
  });
  return out;
}

inline int count_self_retracing(const std::vector<PeriodicOrbit>& orbits) {
  int count = 0;
  for (const auto& o : orbits) count += o.self_retracing ? 1 : 0;
  return count;
}

/// All sets of pairwise arc-disjoint orbits from `orbits` with total
/// topological length <= max_total, null pseudo orbit first, in depth-first
/// inclusion order over the sorted orbit list.
inline std::vector<PseudoOrbit> combine_disjoint_orbits(const std::vector<PeriodicOrbit>& orbits,
                                                        int max_total) {
  std::vector<PseudoOrbit> out;
  PseudoOrbit current;
  out.push_back(current);  // the null pseudo orbit

  auto extend = [&](auto&& self, std::size_t first) -> void {
    for (std::size_t i = first; i < orbits.size(); ++i) {
      const auto& orbit = orbits[i];
      if (current.topological_length + orbit.topological_length > max_total) break;
      if (current.arc_mask & orbit.arc_mask) continue;
      const Complex saved_amplitude = current.amplitude;
      current.orbit_ids.push_back(static_cast<int>(i));
      current.arc_mask |= orbit.arc_mask;
      current.orbit_count += 1;
      current.topological_length += orbit.topological_length;
      current.metric_length += orbit.metric_length;
      current.amplitude *= orbit.amplitude;
      out.push_back(current);
      self(self, i + 1);
      current.orbit_ids.pop_back();
      current.arc_mask &= ~orbit.arc_mask;
      current.orbit_count -= 1;
      current.topological_length -= orbit.topological_length;
      current.metric_length -= orbit.metric_length;
      current.amplitude = saved_amplitude;
    }
  };
  extend(extend, 0);
  return out;
}

inline std::vector<PseudoOrbit> enumerate_irreducible_pseudo_orbits(const MetricGraph& g,
                                                                    int max_total = -1) {
  if (max_total < 0 || max_total > g.arc_count()) max_total = g.arc_count();
  auto orbits = enumerate_arc_simple_orbits(g, max_total);
  return combine_disjoint_orbits(orbits, max_total);
}

/// Visit counts per undirected bond (0, 1 or 2 for irreducible pseudo
/// orbits).  For incommensurate bond lengths two pseudo orbits have equal
/// metric length iff their profiles coincide.
inline std::vector<std::uint8_t> undirected_profile(const MetricGraph& g, std::uint64_t arc_mask) {
  std::vector<std::uint8_t> profile(g.bond_count(), 0);
  for (int b = 0; b < g.bond_count(); ++b) {
    if (arc_mask & (std::uint64_t{1} << b)) ++profile[b];
    if (arc_mask & (std::uint64_t{1} << (b + g.bond_count()))) ++profile[b];
  }
  return profile;
}

inline constexpr int kPrimitiveCap = 6;

/// Primitive periodic orbits as closed walks: directed bonds may repeat,
/// proper repetitions of shorter walks are rejected.  Intended as a
/// small-length oracle; lengths above the cap are refused.
inline std::vector<PeriodicOrbit> enumerate_primitive_orbits(const MetricGraph& g,
                                                             const EvolutionOperator& op,
                                                             int max_len,
                                                             int cap = kPrimitiveCap) {
  if (max_len > cap) throw Error("primitive oracle capped");
  std::set<std::vector<int>> seen;
  std::vector<PeriodicOrbit> out;
  std::vector<int> walk;

  auto record = [&](const std::vector<int>& w) {
    if (detail::smallest_period(w) != static_cast<int>(w.size())) return;
    auto canon = detail::least_rotation(w);
    if (!seen.insert(canon).second) return;
    PeriodicOrbit orbit = detail::make_orbit(g, canon);
    orbit.amplitude = orbit_amplitude(op, orbit.arcs);
    out.push_back(std::move(orbit));
  };

  auto extend = [&](auto&& self, int start) -> void {
    const int last = walk.back();
    for (int next : g.successors(last)) {
      if (next < start) continue;
      if (next == start && walk.size() >= 2) record(walk);
      if (static_cast<int>(walk.size()) >= max_len) continue;
      walk.push_back(next);
      self(self, start);
      walk.pop_back();
    }
  };

  for (int start = 0; start < g.arc_count(); ++start) {
    walk.assign(1, start);
    extend(extend, start);
  }

  std::sort(out.begin(), out.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.topological_length != b.topological_length)
      return a.topological_length < b.topological_length;
    return a.arcs < b.arcs;
  });
  return out;
}

/// All sets of distinct primitive orbits with total topological length
/// exactly `total_length` (arc repetition allowed within and between
/// members).  Expansion over these sets reproduces the characteristic
/// polynomial coefficients after massive cancelation; used as an oracle.
inline std::vector<PseudoOrbit> enumerate_primitive_pseudo_orbits(const MetricGraph& g,
                                                                  const EvolutionOperator& op,
                                                                  int total_length,
                                                                  int cap = kPrimitiveCap) {
  if (total_length > cap) throw Error("primitive oracle capped");
  auto primitives = enumerate_primitive_orbits(g, op, total_length, cap);

  std::vector<PseudoOrbit> out;
  PseudoOrbit current;
  if (total_length == 0) out.push_back(current);

  auto extend = [&](auto&& self, std::size_t first) -> void {
    for (std::size_t i = first; i < primitives.size(); ++i) {
      const auto& orbit = primitives[i];
      if (current.topological_length + orbit.topological_length > total_length) break;
      const Complex saved_amplitude = current.amplitude;
      const std::uint64_t saved_mask = current.arc_mask;
      current.orbit_ids.push_back(static_cast<int>(i));
      current.arc_mask |= orbit.arc_mask;
      current.orbit_count += 1;
      current.topological_length += orbit.topological_length;
      current.metric_length += orbit.metric_length;
      current.amplitude *= orbit.amplitude;
      if (current.topological_length == total_length) out.push_back(current);
      self(self, i + 1);
      current.orbit_ids.pop_back();
      current.orbit_count -= 1;
      current.topological_length -= orbit.topological_length;
      current.metric_length -= orbit.metric_length;
      current.amplitude = saved_amplitude;
      current.arc_mask = saved_mask;
    }
  };
  extend(extend, 0);
  return out;
}

/// Immutable per-graph cache: arc-simple orbits, irreducible pseudo orbits
/// up to a total length, and the expansion terms grouped by (topological
/// length, undirected profile).  Grouping merges pseudo orbits of equal
/// metric length, which both speeds up coefficient evaluation and yields
/// the degeneracy classes used by the variance pair sum.
class OrbitCatalog {
 public:
  struct ExpansionTerm {
    double length;   // common metric length of the group
    Complex weight;  // sum of (-1)^m A over the group
  };

  OrbitCatalog(const MetricGraph& g, const EvolutionOperator& op, int max_total = -1)
      : graph_(g), op_(op) {
    max_total_ = (max_total < 0 || max_total > g.arc_count()) ? g.arc_count() : max_total;
    orbits_ = enumerate_arc_simple_orbits(g, max_total_);
    for (auto& orbit : orbits_) orbit.amplitude = orbit_amplitude(op, orbit.arcs);
    pseudo_orbits_ = combine_disjoint_orbits(orbits_, max_total_);

    std::map<std::pair<int, std::vector<std::uint8_t>>, Complex> groups;
    for (const auto& po : pseudo_orbits_) {
      auto key = std::make_pair(po.topological_length, undirected_profile(g, po.arc_mask));
      groups[key] += static_cast<double>(po.sign()) * po.amplitude;
    }
    terms_.resize(max_total_ + 1);
    for (const auto& [key, weight] : groups) {
      double length = 0.0;
      for (int b = 0; b < g.bond_count(); ++b) length += key.second[b] * g.bond_length(b);
      terms_[key.first].push_back({length, weight});
    }
  }

  const MetricGraph& graph() const { return graph_; }
  const EvolutionOperator& op() const { return op_; }
  int max_total() const { return max_total_; }

  const std::vector<PeriodicOrbit>& orbits() const { return orbits_; }
  const std::vector<PseudoOrbit>& pseudo_orbits() const { return pseudo_orbits_; }

  /// terms(n): degeneracy classes of irreducible pseudo orbits with
  /// topological length n.
  const std::vector<ExpansionTerm>& terms(int n) const { return terms_[n]; }

 private:
  MetricGraph graph_;
  EvolutionOperator op_;
  int max_total_ = 0;
  std::vector<PeriodicOrbit> orbits_;
  std::vector<PseudoOrbit> pseudo_orbits_;
  std::vector<std::vector<ExpansionTerm>> terms_;
};

}  // namespace qgraph
