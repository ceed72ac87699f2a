#pragma once

// Actions of G(P) that come with the bundle: on P itself and on the coset
// spaces P/H. For y over v and an arrow g out of v, y.g is the second
// component of the representative of g whose first component is y.

#include <algorithm>
#include <map>
#include <vector>

#include "gpdyn/dynamics.hpp"
#include "gpdyn/ehresmann.hpp"

namespace gpdyn {

/// G(P) acting on P/H for a subgroup H (sorted element list). Points are the
/// left cosets kH over each vertex, ordered by vertex and then by least
/// element.
inline GroupoidAction coset_action(const BundleGroupoid& bg, const std::vector<Elem>& subgroup) {
  const auto& grp = bg.group();
  if (generated_subgroup(grp, subgroup) != subgroup) throw Error("not a subgroup");
  const TotalSpace ts = bg.total_space();
  const std::size_t m = bg.bundle->base.vertex_count();

  // coset index of each fiber element
  std::vector<Point> coset(grp.order(), ~Point{0});
  Point count = 0;
  for (Elem k = 0; k < grp.order(); ++k) {
    if (coset[k] != ~Point{0}) continue;
    for (Elem h : subgroup) coset[grp.mul(k, h)] = count;
    ++count;
  }
  std::vector<Elem> rep(count);
  for (Elem k = grp.order(); k-- > 0;) rep[coset[k]] = k;

  std::vector<Object> anchor;
  for (Vertex v = 0; v < m; ++v)
    for (Point c = 0; c < count; ++c) anchor.push_back(v);
  return GroupoidAction::build(bg.groupoid, std::move(anchor), [&](Point y, Arrow g) {
    const Point u = ts.point(y / count, rep[y % count]);
    const Point w = bg.second_given_first(g, u);
    return static_cast<Point>(ts.proj(w) * count + coset[ts.fiber_coord(w)]);
  });
}

/// G(P) acting on P: point index equals the total-space index.
inline GroupoidAction principal_action(const BundleGroupoid& bg) {
  return coset_action(bg, {bg.group().identity()});
}

struct NamedAction {
  std::string name;
  GroupoidAction action;
};

/// Catalog of actions of one bundle groupoid used by the test suites: the
/// ambit at x0, the base action, P/H for every cyclic subgroup H, and two
/// disjoint unions. Only actions with at most max_points points are kept.
inline std::vector<NamedAction> standard_actions(const BundleGroupoid& bg, Object x0,
                                                 std::size_t max_points) {
  std::vector<NamedAction> r;
  auto keep = [&](std::string name, GroupoidAction a) {
    if (a.size() <= max_points) r.push_back({std::move(name), std::move(a)});
  };
  const Ambit ambit = build_ambit(bg.groupoid, x0);
  keep("ambit", ambit.action);
  const GroupoidAction base = base_action(bg.groupoid);
  keep("base", base);
  std::vector<std::vector<Elem>> subgroups;
  for (Elem k = 0; k < bg.group().order(); ++k) {
    const Elem gens[] = {k};
    auto h = generated_subgroup(bg.group(), gens);
    if (std::find(subgroups.begin(), subgroups.end(), h) == subgroups.end())
      subgroups.push_back(std::move(h));
  }
  for (const auto& h : subgroups) {
    if (h.size() == bg.group().order()) continue;  // same as base
    std::string name = "cosets_order_" + std::to_string(h.size());
    for (Elem e : h) name += "_" + std::to_string(e);
    keep(name, coset_action(bg, h));
  }
  keep("base+base", disjoint_union(base, base));
  keep("ambit+ambit", disjoint_union(ambit.action, ambit.action));
  return r;
}

}  // namespace gpdyn
