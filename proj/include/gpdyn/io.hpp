#pragma once

// JSON models: loading with range checks, and serialization of the library's
// objects. Loading never checks algebraic axioms; that is left to the verify_*
// routines so that a bad table can still be reported with a witness.

#include <array>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gpdyn/algebra.hpp"
#include "gpdyn/bundle.hpp"
#include "gpdyn/dynamics.hpp"
#include "gpdyn/ehresmann.hpp"
#include "gpdyn/groupoid.hpp"

namespace gpdyn::io {

using nlohmann::json;

enum class LoadCode { parse = 10, unknown_kind = 11, range = 12 };

class LoadError : public Error {
 public:
  LoadError(LoadCode code, const std::string& msg) : Error(msg), code_(code) {}
  int code() const { return static_cast<int>(code_); }

 private:
  LoadCode code_;
};

struct GroupModel {
  std::string preset;  // empty when given by table
  std::vector<std::vector<Elem>> mult;
  Elem identity = 0;
};

struct GraphModel {
  std::size_t vertices = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;
};

struct BundleModel {
  GraphModel graph;
  GroupModel group;
  std::vector<Elem> labels;  // per edge
};

struct GroupoidModel {
  GroupoidData data;
  std::optional<std::vector<std::pair<Dart, Arrow>>> connection;
  std::optional<std::vector<std::pair<Arrow, ArrowCoordinate>>> coords;
  std::optional<GroupModel> group;
};

struct ActionModel {
  GroupoidModel groupoid;
  std::size_t space = 0;
  std::vector<Object> anchor;
  std::vector<std::array<std::uint32_t, 3>> act;
  std::optional<Object> basepoint;
};

struct Model {
  std::string kind;
  json source;  // the model object as loaded
  std::variant<GroupModel, GraphModel, BundleModel, GroupoidModel, ActionModel> payload;
};

namespace detail {

[[noreturn]] inline void fail(LoadCode c, const std::string& where, const std::string& msg) {
  throw LoadError(c, where.empty() ? msg : "field '" + where + "': " + msg);
}

inline std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline std::string dot(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

inline const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(LoadCode::parse, path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(LoadCode::parse, dot(path, key), "missing");
  return *it;
}

// Non-negative integer index; negatives are reported as out of range.
inline std::uint32_t index(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) {
    auto v = j.get<std::uint64_t>();
    if (v > 0xffffffffu) fail(LoadCode::range, path, "value too large");
    return static_cast<std::uint32_t>(v);
  }
  if (j.is_number_integer()) fail(LoadCode::range, path, "negative index");
  fail(LoadCode::parse, path, "expected a non-negative integer");
}

inline std::uint32_t bounded(const json& j, const std::string& path, std::size_t bound,
                             const char* what) {
  const auto v = index(j, path);
  if (v >= bound)
    fail(LoadCode::range, path,
         std::to_string(v) + " out of range for " + what + " (" + std::to_string(bound) + ")");
  return v;
}

inline const json& array(const json& j, const std::string& path, std::optional<std::size_t> len = {}) {
  if (!j.is_array()) fail(LoadCode::parse, path, "expected an array");
  if (len && j.size() != *len)
    fail(LoadCode::parse, path,
         "expected " + std::to_string(*len) + " entries, found " + std::to_string(j.size()));
  return j;
}

inline std::vector<std::uint32_t> bounded_list(const json& j, const std::string& path,
                                               std::size_t len, std::size_t bound, const char* what) {
  array(j, path, len);
  std::vector<std::uint32_t> r;
  for (std::size_t i = 0; i < j.size(); ++i) r.push_back(bounded(j[i], at(path, i), bound, what));
  return r;
}

inline void expect_kind(const json& j, const std::string& path, const char* kind, bool required) {
  auto it = j.find("kind");
  if (it == j.end()) {
    if (required) fail(LoadCode::parse, dot(path, "kind"), "missing");
    return;
  }
  if (!it->is_string()) fail(LoadCode::parse, dot(path, "kind"), "expected a string");
  if (it->get<std::string>() != kind)
    fail(LoadCode::unknown_kind, dot(path, "kind"),
         "expected \"" + std::string(kind) + "\", found \"" + it->get<std::string>() + "\"");
}

inline GroupModel parse_group(const json& j, const std::string& path, bool kind_required) {
  if (!j.is_object()) fail(LoadCode::parse, path, "expected an object");
  expect_kind(j, path, "group", kind_required);
  GroupModel g;
  if (auto it = j.find("preset"); it != j.end()) {
    if (!it->is_string()) fail(LoadCode::parse, dot(path, "preset"), "expected a string");
    g.preset = it->get<std::string>();
    try {
      auto grp = preset_group(g.preset);
      g.mult = grp.table();
      g.identity = grp.identity();
    } catch (const Error&) {
      fail(LoadCode::range, dot(path, "preset"), "unknown preset \"" + g.preset + "\"");
    }
    return g;
  }
  const auto n = index(field(j, path, "order"), dot(path, "order"));
  if (n == 0) fail(LoadCode::range, dot(path, "order"), "order must be positive");
  g.identity = bounded(field(j, path, "identity"), dot(path, "identity"), n, "group elements");
  const std::string mp = dot(path, "mult");
  const json& rows = array(field(j, path, "mult"), mp, n);
  for (std::size_t a = 0; a < n; ++a) {
    auto row = bounded_list(rows[a], at(mp, a), n, n, "group elements");
    g.mult.emplace_back(row.begin(), row.end());
  }
  return g;
}

inline GraphModel parse_graph(const json& j, const std::string& path, bool kind_required) {
  if (!j.is_object()) fail(LoadCode::parse, path, "expected an object");
  expect_kind(j, path, "graph", kind_required);
  GraphModel g;
  g.vertices = index(field(j, path, "vertices"), dot(path, "vertices"));
  if (g.vertices == 0) fail(LoadCode::range, dot(path, "vertices"), "a graph needs a vertex");
  const std::string ep = dot(path, "edges");
  const json& edges = array(field(j, path, "edges"), ep);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = at(ep, i);
    array(edges[i], p, 2);
    const auto u = index(edges[i][0], at(p, 0));
    const auto v = index(edges[i][1], at(p, 1));
    if (u >= g.vertices || v >= g.vertices)
      fail(LoadCode::range, p, "edge " + std::to_string(i) + " has an endpoint out of range");
    g.edges.emplace_back(u, v);
  }
  return g;
}

inline BundleModel parse_bundle(const json& j, const std::string& path) {
  BundleModel b;
  b.graph = parse_graph(field(j, path, "graph"), dot(path, "graph"), false);
  b.group = parse_group(field(j, path, "group"), dot(path, "group"), false);
  const std::string lp = dot(path, "labels");
  const json& labels = array(field(j, path, "labels"), lp, b.graph.edges.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto l = index(labels[i], at(lp, i));
    if (l >= b.group.mult.size())
      fail(LoadCode::range, at(lp, i),
           "label " + std::to_string(l) + " of edge " + std::to_string(i) + " out of range for a group of order " +
               std::to_string(b.group.mult.size()));
    b.labels.push_back(l);
  }
  return b;
}

inline GroupoidModel parse_groupoid(const json& j, const std::string& path, bool kind_required) {
  if (!j.is_object()) fail(LoadCode::parse, path, "expected an object");
  expect_kind(j, path, "groupoid", kind_required);
  GroupoidModel m;
  auto& d = m.data;
  d.objects = index(field(j, path, "objects"), dot(path, "objects"));
  d.arrows = index(field(j, path, "arrows"), dot(path, "arrows"));
  d.src = bounded_list(field(j, path, "src"), dot(path, "src"), d.arrows, d.objects, "objects");
  d.tgt = bounded_list(field(j, path, "tgt"), dot(path, "tgt"), d.arrows, d.objects, "objects");
  d.unit = bounded_list(field(j, path, "unit"), dot(path, "unit"), d.objects, d.arrows, "arrows");
  d.inv = bounded_list(field(j, path, "inv"), dot(path, "inv"), d.arrows, d.arrows, "arrows");
  const std::string cp = dot(path, "comp");
  const json& comp = array(field(j, path, "comp"), cp);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    auto t = bounded_list(comp[i], at(cp, i), 3, d.arrows, "arrows");
    d.comp.push_back({t[0], t[1], t[2]});
  }
  if (auto it = j.find("connection"); it != j.end()) {
    const std::string p = dot(path, "connection");
    array(*it, p);
    std::vector<std::pair<Dart, Arrow>> conn;
    for (std::size_t i = 0; i < it->size(); ++i) {
      array((*it)[i], at(p, i), 2);
      conn.emplace_back(index((*it)[i][0], at(at(p, i), 0)),
                        bounded((*it)[i][1], at(at(p, i), 1), d.arrows, "arrows"));
    }
    m.connection = std::move(conn);
  }
  if (auto it = j.find("coords"); it != j.end()) {
    const std::string p = dot(path, "coords");
    array(*it, p);
    std::vector<std::pair<Arrow, ArrowCoordinate>> coords;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string q = at(p, i);
      const json& e = (*it)[i];
      const Arrow a = bounded(field(e, q, "arrow"), dot(q, "arrow"), d.arrows, "arrows");
      auto c = bounded_list(field(e, q, "coord"), dot(q, "coord"), 3, 0xffffffffu, "coordinates");
      if (c[0] >= d.objects || c[1] >= d.objects)
        fail(LoadCode::range, dot(q, "coord"), "coordinate vertex out of range");
      coords.emplace_back(a, ArrowCoordinate{c[0], c[1], c[2]});
    }
    m.coords = std::move(coords);
  }
  if (auto it = j.find("group"); it != j.end()) m.group = parse_group(*it, dot(path, "group"), false);
  return m;
}

inline ActionModel parse_action(const json& j, const std::string& path) {
  ActionModel a;
  a.groupoid = parse_groupoid(field(j, path, "groupoid"), dot(path, "groupoid"), false);
  const auto objects = a.groupoid.data.objects;
  const auto arrows = a.groupoid.data.arrows;
  a.space = index(field(j, path, "space"), dot(path, "space"));
  a.anchor = bounded_list(field(j, path, "anchor"), dot(path, "anchor"), a.space, objects, "objects");
  const std::string ap = dot(path, "act");
  const json& act = array(field(j, path, "act"), ap);
  for (std::size_t i = 0; i < act.size(); ++i) {
    const std::string p = at(ap, i);
    array(act[i], p, 3);
    a.act.push_back({bounded(act[i][0], at(p, 0), a.space, "points"),
                     bounded(act[i][1], at(p, 1), arrows, "arrows"),
                     bounded(act[i][2], at(p, 2), a.space, "points")});
  }
  if (auto it = j.find("basepoint"); it != j.end())
    a.basepoint = bounded(*it, dot(path, "basepoint"), objects, "objects");
  return a;
}

}  // namespace detail

/// Parses a model object. Report objects (anything with a "model" field and
/// a "command" field) are unwrapped first.
inline Model parse_model(const json& in) {
  if (!in.is_object()) throw LoadError(LoadCode::parse, "top level must be a JSON object");
  const json& j = in.contains("command") && in.contains("model") ? in["model"] : in;
  if (!j.is_object()) throw LoadError(LoadCode::parse, "field 'model': expected an object");
  auto it = j.find("kind");
  if (it == j.end()) throw LoadError(LoadCode::parse, "field 'kind': missing");
  if (!it->is_string()) throw LoadError(LoadCode::parse, "field 'kind': expected a string");
  const std::string kind = it->get<std::string>();
  Model m{kind, j, GroupModel{}};
  if (kind == "group")
    m.payload = detail::parse_group(j, "", true);
  else if (kind == "graph")
    m.payload = detail::parse_graph(j, "", true);
  else if (kind == "bundle")
    m.payload = detail::parse_bundle(j, "");
  else if (kind == "groupoid")
    m.payload = detail::parse_groupoid(j, "", true);
  else if (kind == "action")
    m.payload = detail::parse_action(j, "");
  else
    throw LoadError(LoadCode::unknown_kind, "unknown kind \"" + kind + "\"");
  return m;
}

inline Model parse_model_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(LoadCode::parse, e.what());
  }
  return parse_model(j);
}

/// "-" reads standard input.
inline Model load_model(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(path);
    if (!f) throw LoadError(LoadCode::parse, "cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  try {
    return parse_model_text(text);
  } catch (const LoadError& e) {
    throw LoadError(static_cast<LoadCode>(e.code()), path + ": " + e.what());
  }
}

// --- model -> library objects --------------------------------------------

inline GroupCheck to_group(const GroupModel& m) { return verify_group(m.mult, m.identity); }

inline BaseGraph to_graph(const GraphModel& m) { return BaseGraph(m.vertices, m.edges); }

/// Connection from [[dart, arrow], ...]: the base graph is read off from the
/// endpoints of the arrows assigned to the even darts.
inline Connection to_connection(const Groupoid& g, const std::vector<std::pair<Dart, Arrow>>& pairs) {
  if (pairs.size() % 2) throw Error("connection must list both darts of every edge");
  std::vector<std::optional<Arrow>> arrow(pairs.size());
  for (auto [d, a] : pairs) {
    if (d >= arrow.size()) throw Error("connection dart " + std::to_string(d) + " out of range");
    if (arrow[d]) throw Error("connection dart " + std::to_string(d) + " listed twice");
    arrow[d] = a;
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t e = 0; 2 * e < arrow.size(); ++e)
    edges.emplace_back(g.src(*arrow[2 * e]), g.tgt(*arrow[2 * e]));
  Connection c{BaseGraph(g.object_count(), std::move(edges)), {}};
  for (auto& a : arrow) c.arrow.push_back(*a);
  return c;
}

// --- library objects -> json -----------------------------------------------

inline json to_json(const FiniteGroup& g) {
  for (auto name : preset_names)
    if (preset_group(name) == g) return {{"kind", "group"}, {"preset", std::string(name)}};
  return {{"kind", "group"}, {"order", g.order()}, {"identity", g.identity()}, {"mult", g.table()}};
}

inline json to_json(const BaseGraph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  return {{"kind", "graph"}, {"vertices", g.vertex_count()}, {"edges", edges}};
}

inline json to_json(const CocycleBundle& b) {
  json graph = to_json(b.base);
  graph.erase("kind");
  json group = to_json(b.group);
  group.erase("kind");
  return {{"kind", "bundle"}, {"graph", graph}, {"group", group}, {"labels", b.edge_labels()}};
}

inline json to_json(const Groupoid& g) {
  const GroupoidData d = g.data();
  auto comp = d.comp;
  std::sort(comp.begin(), comp.end());
  return {{"kind", "groupoid"}, {"objects", d.objects}, {"arrows", d.arrows}, {"src", d.src},
          {"tgt", d.tgt},       {"unit", d.unit},       {"inv", d.inv},       {"comp", comp}};
}

inline json connection_json(const Connection& c) {
  json r = json::array();
  for (Dart d = 0; d < c.arrow.size(); ++d) r.push_back({d, c.arrow[d]});
  return r;
}

inline json coords_json(const std::vector<ArrowCoordinate>& coords) {
  json r = json::array();
  for (Arrow a = 0; a < coords.size(); ++a)
    r.push_back({{"arrow", a}, {"coord", {coords[a].source, coords[a].target, coords[a].twist}}});
  return r;
}

/// G(P) with its connection, arrow coordinates and structural group.
inline json to_json(const BundleGroupoid& bg) {
  json j = to_json(*bg.groupoid);
  j["connection"] = connection_json(bg.connection);
  j["coords"] = coords_json(bg.coords);
  json group = to_json(bg.group());
  group.erase("kind");
  j["group"] = group;
  return j;
}

inline json to_json(const GroupoidAction& a) {
  json groupoid = to_json(a.groupoid());
  groupoid.erase("kind");
  return {{"kind", "action"},
          {"groupoid", groupoid},
          {"space", a.size()},
          {"anchor", a.anchor_map()},
          {"act", a.triples()}};
}

inline json to_json(const Ambit& a) {
  json j = to_json(a.action);
  j["basepoint"] = a.basepoint;
  j["u0"] = a.arrow_of[a.u0];
  j["arrow_of"] = a.arrow_of;
  return j;
}

inline json section_json(const std::vector<Point>& s) { return {{"section", s}}; }

inline json to_json(const Diagnostics& d) {
  return {{"verdict", to_string(d.verdict)},
          {"check", d.check},
          {"message", d.message},
          {"witness", d.witness}};
}

}  // namespace gpdyn::io
