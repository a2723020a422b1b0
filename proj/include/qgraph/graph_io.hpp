#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

// Graph file schema (UTF-8 JSON):
//
//   {
//     "vertices": ["a", "b", ...],
//     "edges":    [{"from": "a", "to": "b", "length": 0.4}, ...],
//     "lengths":  {"mode": "random_uniform", "seed": 7, "min": 0.0, "max": 1.0}
//   }
//
// "lengths" is optional and defaults to {"mode": "explicit"}.  An edge
// "length" may be a positive number or the string "random"; it may be
// omitted entirely when the mode is random_uniform.  Unknown fields are
// rejected at every level.

inline GraphSpec parse_graph_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("graph file: top level must be an object");
  static const std::set<std::string> top_keys{"vertices", "edges", "lengths"};
  for (const auto& item : j.items())
    if (!top_keys.count(item.key())) throw Error("graph file: unknown field \"" + item.key() + "\"");
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw Error("graph file: \"vertices\" array required");
  if (!j.contains("edges") || !j["edges"].is_array())
    throw Error("graph file: \"edges\" array required");

  GraphSpec spec;
  for (const auto& v : j["vertices"]) {
    if (!v.is_string()) throw Error("graph file: vertex labels must be strings");
    spec.vertices.push_back(v.get<std::string>());
  }

  bool random_mode = false;
  if (j.contains("lengths")) {
    const auto& l = j["lengths"];
    if (!l.is_object() || !l.contains("mode")) throw Error("graph file: \"lengths\" needs a \"mode\"");
    static const std::set<std::string> len_keys{"mode", "seed", "min", "max"};
    for (const auto& item : l.items())
      if (!len_keys.count(item.key()))
        throw Error("graph file: unknown field \"lengths." + item.key() + "\"");
    const std::string mode = l["mode"].get<std::string>();
    if (mode == "explicit") {
      if (l.contains("seed") || l.contains("min") || l.contains("max"))
        throw Error("graph file: explicit mode takes no seed/min/max");
    } else if (mode == "random_uniform") {
      random_mode = true;
      RandomLengths rl;
      if (l.contains("seed")) rl.seed = l["seed"].get<std::uint64_t>();
      rl.min = l.contains("min") ? l["min"].get<double>() : 0.0;
      rl.max = l.contains("max") ? l["max"].get<double>() : 1.0;
      spec.random_lengths = rl;
    } else {
      throw Error("graph file: unknown lengths mode \"" + mode + "\"");
    }
  }

  for (const auto& e : j["edges"]) {
    if (!e.is_object()) throw Error("graph file: edges must be objects");
    static const std::set<std::string> edge_keys{"from", "to", "length"};
    for (const auto& item : e.items())
      if (!edge_keys.count(item.key()))
        throw Error("graph file: unknown field \"edges." + item.key() + "\"");
    if (!e.contains("from") || !e.contains("to"))
      throw Error("graph file: every edge needs \"from\" and \"to\"");
    EdgeSpec edge;
    edge.from = e["from"].get<std::string>();
    edge.to = e["to"].get<std::string>();
    if (!e.contains("length")) {
      if (!random_mode) throw Error("graph file: explicit mode requires edge lengths");
      edge.random = true;
    } else if (e["length"].is_string()) {
      if (e["length"].get<std::string>() != "random")
        throw Error("graph file: edge length must be a number or \"random\"");
      edge.random = true;
    } else {
      edge.length = e["length"].get<double>();
    }
    spec.edges.push_back(std::move(edge));
  }
  return spec;
}

inline MetricGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("graph file: " + std::string(e.what()));
  }
  return build_graph(parse_graph_spec(j));
}

inline nlohmann::json graph_to_json(const MetricGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < g.vertex_count(); ++v) j["vertices"].push_back(g.vertex_label(v));
  j["edges"] = nlohmann::json::array();
  for (const auto& r : g.bonds())
    j["edges"].push_back({{"from", r.from}, {"to", r.to}, {"length", r.length}});
  return j;
}

}  // namespace qgraph
