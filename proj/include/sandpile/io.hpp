#pragma once

// JSON formats.
//
//   graph:    {"sink": "s", "edges": [["a","s",2],["a","b",3]], "loops": {"a":1}}
//   config:   {"a": 3, "b": 0}            (missing ordinary vertices are 0)
//   element:  {"a": {"residue": 1, "modulus": 2}, ...}
//
// Vertex order is the order of first appearance in "edges", then "loops".

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "sandpile/error.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/thick_tree.hpp"

namespace sandpile::io {

using Json = nlohmann::ordered_json;

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

inline Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

namespace detail {

inline std::uint64_t as_count(const Json& j, const std::string& what, Errc negative_code) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    throw Error(negative_code, what + " is negative");
  }
  throw Error(Errc::ParseError, what + " must be a non-negative integer");
}

inline const std::string& as_name(const Json& j, const std::string& what) {
  if (!j.is_string()) throw Error(Errc::ParseError, what + " must be a string");
  return j.get_ref<const std::string&>();
}

}  // namespace detail

inline RootedGraph parse_graph(const Json& j) {
  if (!j.is_object()) throw Error(Errc::ParseError, "graph must be a JSON object");
  if (!j.contains("sink")) throw Error(Errc::ParseError, "graph is missing \"sink\"");
  if (!j.contains("edges") || !j["edges"].is_array()) throw Error(Errc::ParseError, "graph needs an \"edges\" array");
  RootedGraph out;
  out.sink = detail::as_name(j["sink"], "sink");
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3) throw Error(Errc::ParseError, "each edge is [u, v, multiplicity]");
    const auto& a = detail::as_name(e[0], "edge endpoint");
    const auto& b = detail::as_name(e[1], "edge endpoint");
    out.graph.add_edge(a, b, detail::as_count(e[2], "edge multiplicity", Errc::InvalidMultiplicity));
  }
  if (j.contains("loops")) {
    if (!j["loops"].is_object()) throw Error(Errc::ParseError, "\"loops\" must be an object");
    for (const auto& [name, m] : j["loops"].items()) {
      out.graph.set_loop(name, detail::as_count(m, "loop count", Errc::InvalidMultiplicity));
    }
  }
  return out;
}

inline AmbientSpace load_space(const Json& j) {
  auto file = parse_graph(j);
  return build_ambient(std::move(file.graph), file.sink);
}

inline Json graph_to_json(const MultiGraph& g, const std::string& sink) {
  Json j;
  j["sink"] = sink;
  j["edges"] = Json::array();
  for (const auto& e : g.edges()) j["edges"].push_back(Json::array({g.name(e.a), g.name(e.b), e.mult}));
  Json loops = Json::object();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.loop(v) > 0) loops[g.name(v)] = g.loop(v);
  }
  if (!loops.empty()) j["loops"] = std::move(loops);
  return j;
}

inline Json graph_to_json(const AmbientSpace& space) { return graph_to_json(space.graph(), space.sink_name()); }

inline Configuration parse_configuration(const AmbientSpace& space, const Json& j) {
  if (!j.is_object()) throw Error(Errc::ParseError, "configuration must be a JSON object");
  Configuration u = Configuration::zero(space.size());
  for (const auto& [name, h] : j.items()) {
    auto pos = space.position(name);
    if (!pos) throw Error(Errc::UnknownVertex, "'" + name + "' is not an ordinary vertex");
    u[*pos] = detail::as_count(h, "height of '" + name + "'", Errc::ParseError);
  }
  return u;
}

inline Json configuration_to_json(const AmbientSpace& space, const Configuration& u) {
  space.require_size(u);
  Json j = Json::object();
  for (std::size_t i = 0; i < u.size(); ++i) j[space.name(i)] = u[i];
  return j;
}

inline AbstractElement parse_element(const AmbientSpace& space, const TreeStructure& tree, const Json& j) {
  if (!j.is_object()) throw Error(Errc::ParseError, "abstract element must be a JSON object");
  AbstractElement v = AbstractElement::zero(tree);
  for (const auto& [name, entry] : j.items()) {
    auto pos = space.position(name);
    if (!pos) throw Error(Errc::UnknownVertex, "'" + name + "' is not an ordinary vertex");
    if (!entry.is_object() || !entry.contains("residue") || !entry.contains("modulus")) {
      throw Error(Errc::ParseError, "entry for '" + name + "' needs \"residue\" and \"modulus\"");
    }
    const auto modulus = detail::as_count(entry["modulus"], "modulus", Errc::ParseError);
    const auto residue = detail::as_count(entry["residue"], "residue", Errc::ParseError);
    if (modulus != tree.parent_mult[*pos]) {
      throw Error(Errc::ModulusMismatch, "modulus for '" + name + "' is " + std::to_string(modulus) +
                                             ", expected " + std::to_string(tree.parent_mult[*pos]));
    }
    if (residue >= modulus) throw Error(Errc::ModulusMismatch, "residue for '" + name + "' is not reduced");
    v.residues[*pos] = residue;
  }
  return v;
}

inline Json element_to_json(const AmbientSpace& space, const AbstractElement& v) {
  Json j = Json::object();
  for (std::size_t i = 0; i < v.size(); ++i) {
    j[space.name(i)] = Json{{"residue", v.residues[i]}, {"modulus", v.moduli[i]}};
  }
  return j;
}

}  // namespace sandpile::io
