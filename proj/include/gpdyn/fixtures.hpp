#pragma once

// Built-in fixture corpus: base graphs, bundles over them, and the suite
// that runs the section checks over the trivial-group fixtures.

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/amenability.hpp"
#include "gpdyn/bundle.hpp"
#include "gpdyn/bundle_actions.hpp"
#include "gpdyn/ehresmann.hpp"

namespace gpdyn::fixtures {

inline BaseGraph point() { return BaseGraph(1, {}); }
inline BaseGraph edge() { return BaseGraph(2, {{0, 1}}); }
inline BaseGraph path3() { return BaseGraph(3, {{0, 1}, {1, 2}}); }
inline BaseGraph triangle() { return BaseGraph(3, {{0, 1}, {1, 2}, {2, 0}}); }
inline BaseGraph square() { return BaseGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }
inline BaseGraph wedge2() { return BaseGraph(1, {{0, 0}, {0, 0}}); }
inline BaseGraph k4() {
  return BaseGraph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

struct NamedGraph {
  std::string name;
  BaseGraph graph;
};

inline std::vector<NamedGraph> suite_graphs() {
  return {{"path3", path3()},
          {"triangle", triangle()},
          {"square", square()},
          {"wedge2", wedge2()},
          {"k4", k4()}};
}

inline std::vector<std::string> suite_groups() { return {"Z2", "Z3", "Z4", "S3", "D4", "Q8"}; }

/// Connected graph on n vertices: a random spanning tree plus extra edges,
/// from a fixed seed.
inline BaseGraph random_connected(std::size_t n, std::size_t extra_edges, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 1; v < n; ++v) {
    std::uniform_int_distribution<Vertex> pick(0, v - 1);
    edges.emplace_back(pick(rng), v);
  }
  std::uniform_int_distribution<Vertex> any(0, static_cast<Vertex>(n - 1));
  for (std::size_t i = 0; i < extra_edges; ++i) edges.emplace_back(any(rng), any(rng));
  return BaseGraph(n, std::move(edges));
}

struct NamedBundle {
  std::string name;
  CocycleBundle bundle;
};

/// Edge i carries element (2i + 1) mod |G|.
inline CocycleBundle patterned_bundle(const BaseGraph& g, const FiniteGroup& grp) {
  std::vector<Elem> labels;
  for (std::size_t i = 0; i < g.edge_count(); ++i)
    labels.push_back(static_cast<Elem>((2 * i + 1) % grp.order()));
  return CocycleBundle::from_edge_labels(g, grp, labels);
}

/// Every suite group over every suite graph, patterned labels.
inline std::vector<NamedBundle> construction_suite() {
  std::vector<NamedBundle> r;
  for (const auto& gname : suite_groups())
    for (const auto& [name, graph] : suite_graphs())
      r.push_back({gname + "/" + name, patterned_bundle(graph, preset_group(gname))});
  return r;
}

inline CocycleBundle labeled(BaseGraph g, std::string_view group, std::vector<Elem> labels) {
  return CocycleBundle::from_edge_labels(std::move(g), preset_group(group), labels);
}

/// The named corpus shipped with the CLI.
inline std::vector<NamedBundle> corpus() {
  return {
      {"z2_triangle_trivial", labeled(triangle(), "Z2", {0, 0, 0})},
      {"z2_triangle_twisted", labeled(triangle(), "Z2", {0, 0, 1})},
      {"z3_wedge", labeled(wedge2(), "Z3", {1, 0})},
      {"s3_edge", labeled(edge(), "S3", {1})},
      {"s3_loop_t1", labeled(BaseGraph(1, {{0, 0}}), "S3", {1})},
      {"s3_loop_t2", labeled(BaseGraph(1, {{0, 0}}), "S3", {2})},
      {"trivial_triangle", labeled(triangle(), "Z1", {0, 0, 0})},
      {"trivial_wedge", labeled(wedge2(), "Z1", {0, 0})},
      {"trivial_path3", labeled(path3(), "Z1", {0, 0})},
      {"point_z2", labeled(point(), "Z2", {})},
      {"point_s3", labeled(point(), "S3", {})},
  };
}

/// Trivial structural group over every suite graph.
inline std::vector<NamedBundle> trivial_group_bundles() {
  std::vector<NamedBundle> r;
  for (const auto& [name, graph] : suite_graphs())
    r.push_back({"Z1/" + name, patterned_bundle(graph, preset_group("Z1"))});
  r.push_back({"Z1/point", patterned_bundle(point(), preset_group("Z1"))});
  return r;
}

/// For bundles with trivial structural group: every standard action has
/// invariant sections, one per fixed fiber point, each a single orbit
/// meeting every fiber once.
inline std::vector<SectionSuiteEntry> trivial_group_section_suite(
    const std::vector<NamedBundle>& bundles, Object x0 = 0) {
  std::vector<SectionSuiteEntry> r;
  for (const auto& [name, b] : bundles) {
    if (b.group.order() != 1) throw Error("fixture " + name + " has a nontrivial group");
    const BundleGroupoid bg = groupoid_of_bundle(b);
    for (const auto& [aname, action] : standard_actions(bg, x0, 64)) {
      if (!anchor_is_proper(action).proper) continue;
      r.push_back(section_suite_entry(name, aname, action, x0));
    }
  }
  return r;
}

}  // namespace gpdyn::fixtures
