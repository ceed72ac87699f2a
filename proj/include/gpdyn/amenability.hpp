#pragma once

// Fixed points of group actions, invariant sections of groupoid actions,
// and the finite form of the correspondence between the two: a fiber point
// fixed by every loop at x0 spreads to a unique invariant section.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/core.hpp"
#include "gpdyn/dynamics.hpp"
#include "gpdyn/groupoid.hpp"

namespace gpdyn {

/// Right action of a finite group on 0..points-1: table[g][x] = x.g.
struct GroupAction {
  std::size_t points = 0;
  std::vector<std::vector<Point>> table;
};

inline Diagnostics verify_group_action(const FiniteGroup& grp, const GroupAction& a) {
  if (a.table.size() != grp.order())
    return Diagnostics::structural("shape", "one row per group element is required");
  for (Elem g = 0; g < grp.order(); ++g) {
    if (a.table[g].size() != a.points)
      return Diagnostics::structural("shape", "row length differs from point count", {g});
    for (Point x = 0; x < a.points; ++x)
      if (a.table[g][x] >= a.points)
        return Diagnostics::structural("range", "action value out of range", {g, x});
  }
  for (Point x = 0; x < a.points; ++x)
    if (a.table[grp.identity()][x] != x)
      return Diagnostics::fail("identity", "identity does not act trivially", {x});
  for (Elem g = 0; g < grp.order(); ++g)
    for (Elem h = 0; h < grp.order(); ++h)
      for (Point x = 0; x < a.points; ++x)
        if (a.table[h][a.table[g][x]] != a.table[grp.mul(g, h)][x])
          return Diagnostics::fail("compatibility", "(x.g).h != x.(gh)", {x, g, h});
  return Diagnostics::passed();
}

/// x.g = xg on the group's own elements.
inline GroupAction translation_action(const FiniteGroup& grp) {
  GroupAction a{grp.order(), std::vector<std::vector<Point>>(grp.order())};
  for (Elem g = 0; g < grp.order(); ++g)
    for (Elem x = 0; x < grp.order(); ++x) a.table[g].push_back(grp.mul(x, g));
  return a;
}

inline std::vector<Point> fixed_points(const FiniteGroup& grp, const GroupAction& a) {
  if (auto d = verify_group_action(grp, a); !d) throw Error("invalid group action: " + d.message);
  std::vector<Point> r;
  for (Point x = 0; x < a.points; ++x) {
    bool fixed = true;
    for (Elem g = 0; g < grp.order() && fixed; ++g) fixed = a.table[g][x] == x;
    if (fixed) r.push_back(x);
  }
  return r;
}

/// The vertex group G[x0] acting on the fiber anchor^{-1}(x0), with fiber
/// points renumbered 0..k-1 in ascending order.
struct FiberAction {
  HomSet vertex_group;
  std::vector<Point> fiber;
  GroupAction action;
};

inline FiberAction fiber_action(const GroupoidAction& a, Object x0) {
  FiberAction f{vertex_group(a.groupoid(), x0), a.fiber(x0), {}};
  std::vector<Point> local(a.size(), 0);
  for (std::size_t i = 0; i < f.fiber.size(); ++i) local[f.fiber[i]] = static_cast<Point>(i);
  f.action.points = f.fiber.size();
  for (Arrow loop : f.vertex_group.arrows) {
    std::vector<Point> row;
    for (Point y : f.fiber) row.push_back(local[a.apply(y, loop)]);
    f.action.table.push_back(std::move(row));
  }
  return f;
}

struct InvariantSection {
  std::vector<Point> section;  // per object
  Point seed = 0;              // the fixed fiber point it was spread from
};

inline Diagnostics verify_invariant_section(const GroupoidAction& a, const std::vector<Point>& s) {
  const Groupoid& g = a.groupoid();
  if (s.size() != g.object_count()) return Diagnostics::structural("shape", "not one point per object");
  for (Object x = 0; x < s.size(); ++x)
    if (s[x] >= a.size() || a.anchor(s[x]) != x)
      return Diagnostics::fail("section", "anchor(sigma(x)) != x", {x});
  for (Arrow h = 0; h < g.arrow_count(); ++h)
    if (a.apply(s[g.src(h)], h) != s[g.tgt(h)])
      return Diagnostics::fail("invariance", "sigma(s(g)).g != sigma(t(g))", {h});
  return Diagnostics::passed();
}

/// For each fiber point z over x0 fixed by all of G[x0], sigma(x) = z.g with
/// g the least arrow in G[x0, x]; well-definedness is checked against every
/// arrow of G[x0, x] before the section is accepted.
inline std::vector<InvariantSection> invariant_sections(const GroupoidAction& a, Object x0 = 0) {
  const Groupoid& g = a.groupoid();
  if (x0 >= g.object_count()) throw Error("basepoint out of range");
  if (!is_transitive(g).transitive) throw Error("groupoid is not transitive");
  const FiberAction fa = fiber_action(a, x0);
  std::vector<InvariantSection> r;
  for (Point local : fixed_points(*fa.vertex_group.group, fa.action)) {
    const Point z = fa.fiber[local];
    InvariantSection sec{std::vector<Point>(g.object_count()), z};
    bool well_defined = true;
    for (Object x = 0; x < g.object_count() && well_defined; ++x) {
      const auto arrows = g.hom(x0, x);
      sec.section[x] = a.apply(z, arrows.front());
      for (Arrow h : arrows)
        if (a.apply(z, h) != sec.section[x]) {
          well_defined = false;
          break;
        }
    }
    if (!well_defined) throw std::logic_error("section from a fixed point is not well defined");
    if (auto d = verify_invariant_section(a, sec.section); !d)
      throw std::logic_error("section from a fixed point is not invariant: " + d.message);
    r.push_back(std::move(sec));
  }
  return r;
}

/// Orbit z.G1 of a point; compared against section images.
inline std::vector<Point> orbit_of(const GroupoidAction& a, Point z) {
  std::vector<Point> r;
  for (Arrow h : a.groupoid().outgoing(a.anchor(z))) r.push_back(a.apply(z, h));
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

struct AmenabilityVerdict {
  bool extremely_amenable = false;
  GroupAction certificate;            // translation action of the group on itself
  Diagnostics certificate_check;      // valid action and free
  std::vector<Point> fixed;           // fixed points of the certificate
};

/// Among finite groups only the trivial group is extremely amenable. The
/// verdict carries the translation action, which is free, so a nontrivial
/// group has no fixed point there.
inline AmenabilityVerdict extreme_amenability_check(const FiniteGroup& grp) {
  AmenabilityVerdict v;
  v.extremely_amenable = grp.order() == 1;
  v.certificate = translation_action(grp);
  v.certificate_check = verify_group_action(grp, v.certificate);
  if (v.certificate_check)
    for (Elem g = 0; g < grp.order() && v.certificate_check; ++g)
      for (Point x = 0; x < v.certificate.points; ++x)
        if (g != grp.identity() && v.certificate.table[g][x] == x) {
          v.certificate_check = Diagnostics::fail("free", "translation action is not free", {x, g});
          break;
        }
  v.fixed = fixed_points(grp, v.certificate);
  return v;
}

struct SectionSuiteEntry {
  std::string fixture;
  std::string action;
  std::size_t sections = 0;
  std::size_t fixed_points = 0;
  bool images_are_orbits = false;
  bool meets_each_fiber_once = false;
  bool ok = false;
};

/// Sections of one action at x0, with the checks the trivial-group direction
/// relies on: nonempty, image of each section a single orbit meeting every
/// anchor fiber exactly once, one section per fixed fiber point.
inline SectionSuiteEntry section_suite_entry(const std::string& fixture, const std::string& name,
                                             const GroupoidAction& a, Object x0) {
  SectionSuiteEntry e{fixture, name};
  const auto secs = invariant_sections(a, x0);
  const FiberAction fa = fiber_action(a, x0);
  e.sections = secs.size();
  e.fixed_points = fixed_points(*fa.vertex_group.group, fa.action).size();
  e.images_are_orbits = true;
  e.meets_each_fiber_once = true;
  for (const auto& s : secs) {
    std::vector<Point> image = s.section;
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (image != orbit_of(a, s.seed)) e.images_are_orbits = false;
    for (Object x = 0; x < a.groupoid().object_count(); ++x) {
      auto hits = std::count_if(image.begin(), image.end(),
                                [&](Point p) { return a.anchor(p) == x; });
      if (hits != 1) e.meets_each_fiber_once = false;
    }
  }
  e.ok = e.sections > 0 && e.sections == e.fixed_points && e.images_are_orbits &&
         e.meets_each_fiber_once;
  return e;
}

}  // namespace gpdyn
