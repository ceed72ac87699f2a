#pragma once

// Groupoid of a principal bundle as the orbit set (P x P)/G, and the reverse
// construction of a bundle from a transitive groupoid with a connection.
//
// An orbit [u, v] is named by its ArrowCoordinate (v0, w0, a): the unique
// representative ((v0, a), (w0, e)) whose second component sits at the
// identity of its fiber. In these coordinates
//   src = v0, tgt = w0, unit(x) = (x, x, e), inverse (v, w, a) = (w, v, a^-1),
//   (v, w, a)(w, z, b) = (v, z, ab).

#include <algorithm>
#include <compare>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/bundle.hpp"
#include "gpdyn/core.hpp"
#include "gpdyn/groupoid.hpp"

namespace gpdyn {

struct ArrowCoordinate {
  Vertex source = 0;
  Vertex target = 0;
  Elem twist = 0;
  auto operator<=>(const ArrowCoordinate&) const = default;
};

/// Per-dart arrow assignment carrying the transition data.
struct Connection {
  BaseGraph base;
  std::vector<Arrow> arrow;  // per dart
};

inline Diagnostics verify_connection(const Groupoid& g, const Connection& c) {
  using detail::str;
  if (c.base.vertex_count() != g.object_count())
    return Diagnostics::structural("shape", "connection base and groupoid objects differ");
  if (c.arrow.size() != c.base.dart_count())
    return Diagnostics::structural("shape", "connection needs one arrow per dart");
  for (Dart d = 0; d < c.arrow.size(); ++d) {
    if (c.arrow[d] >= g.arrow_count())
      return Diagnostics::structural("range", "connection arrow out of range at dart " + str(d),
                                     {d});
    if (g.src(c.arrow[d]) != c.base.dsrc(d) || g.tgt(c.arrow[d]) != c.base.dtgt(d))
      return Diagnostics::fail("endpoints", "connection endpoint mismatch at dart " + str(d), {d});
    if (c.arrow[BaseGraph::rev(d)] != g.inv(c.arrow[d]))
      return Diagnostics::fail("involution",
                               "reverse dart is not assigned the inverse arrow at dart " + str(d),
                               {d});
  }
  return Diagnostics::passed();
}

/// G(P) for a bundle, with the coordinate chart on its arrows.
struct BundleGroupoid {
  std::shared_ptr<const CocycleBundle> bundle;
  std::shared_ptr<const Groupoid> groupoid;
  Connection connection;
  std::vector<ArrowCoordinate> coords;  // per arrow
  std::vector<Arrow> arrow_index;       // flattened (v, w, a) -> arrow

  const FiniteGroup& group() const { return bundle->group; }
  TotalSpace total_space() const { return TotalSpace(*bundle); }

  Arrow arrow_of(const ArrowCoordinate& c) const {
    const std::size_t m = bundle->base.vertex_count(), n = group().order();
    return arrow_index[(c.source * m + c.target) * n + c.twist];
  }

  /// Coordinate of the orbit of the pair (u, v): translate so that the
  /// second component is at the identity.
  ArrowCoordinate coordinate_of(Point u, Point v) const {
    const TotalSpace ts = total_space();
    const Elem back = group().inv(ts.fiber_coord(v));
    return {ts.proj(u), ts.proj(v), group().mul(ts.fiber_coord(u), back)};
  }

  Arrow orbit_of(Point u, Point v) const { return arrow_of(coordinate_of(u, v)); }

  /// Representative (u, v) of arrow a with the given second component.
  Point first_given_second(Arrow a, Point second) const {
    const TotalSpace ts = total_space();
    const auto& c = coords[a];
    if (ts.proj(second) != c.target) throw Error("point is not over the arrow's target");
    return ts.point(c.source, group().mul(c.twist, ts.fiber_coord(second)));
  }

  /// Representative (u, v) of arrow a with the given first component.
  Point second_given_first(Arrow a, Point first) const {
    const TotalSpace ts = total_space();
    const auto& c = coords[a];
    if (ts.proj(first) != c.source) throw Error("point is not over the arrow's source");
    return ts.point(c.target, group().mul(group().inv(c.twist), ts.fiber_coord(first)));
  }
};

/// Enumerates the orbits of the diagonal action on P x P, names each by its
/// coordinate, and lays the arrows out as: units (x, x, e) at index x, then
/// the remaining coordinates in lexicographic order.
inline BundleGroupoid groupoid_of_bundle(const CocycleBundle& b) {
  if (auto d = verify_cocycle(b); !d) throw Error("invalid cocycle: " + d.message);
  auto bundle = std::make_shared<const CocycleBundle>(b);
  const TotalSpace ts(*bundle);
  const auto& grp = bundle->group;
  const std::size_t m = bundle->base.vertex_count(), n = grp.order(), np = ts.size();

  std::vector<char> visited(np * np);
  std::vector<ArrowCoordinate> orbits;
  for (Point u = 0; u < np; ++u)
    for (Point v = 0; v < np; ++v) {
      if (visited[u * np + v]) continue;
      std::optional<ArrowCoordinate> coord;
      for (Elem k = 0; k < n; ++k) {
        const Point uk = ts.raction(u, k), vk = ts.raction(v, k);
        visited[uk * np + vk] = 1;
        if (ts.fiber_coord(vk) == grp.identity())
          coord = ArrowCoordinate{ts.proj(uk), ts.proj(vk), ts.fiber_coord(uk)};
      }
      orbits.push_back(*coord);
    }
  if (orbits.size() != m * m * n) throw std::logic_error("diagonal action is not free");

  std::sort(orbits.begin(), orbits.end());
  std::vector<ArrowCoordinate> coords;
  for (Vertex x = 0; x < m; ++x) coords.push_back({x, x, grp.identity()});
  for (const auto& c : orbits)
    if (!(c.source == c.target && c.twist == grp.identity())) coords.push_back(c);

  BundleGroupoid out;
  out.bundle = bundle;
  out.coords = coords;
  out.arrow_index.resize(m * m * n);
  for (Arrow a = 0; a < coords.size(); ++a)
    out.arrow_index[(coords[a].source * m + coords[a].target) * n + coords[a].twist] = a;

  std::vector<Object> src, tgt;
  std::vector<Arrow> unit(m), inv;
  for (const auto& c : coords) {
    src.push_back(c.source);
    tgt.push_back(c.target);
    inv.push_back(out.arrow_of({c.target, c.source, grp.inv(c.twist)}));
  }
  for (Vertex x = 0; x < m; ++x) unit[x] = x;
  out.groupoid = std::make_shared<const Groupoid>(
      Groupoid::build(m, std::move(src), std::move(tgt), std::move(unit), std::move(inv),
                      [&](Arrow g, Arrow h) {
                        return out.arrow_of({coords[g].source, coords[h].target,
                                             grp.mul(coords[g].twist, coords[h].twist)});
                      }));

  // The connection arrow of d is the orbit of (u, T_d u), for any u over dsrc(d).
  out.connection.base = bundle->base;
  for (Dart d = 0; d < bundle->base.dart_count(); ++d) {
    const Vertex v = bundle->base.dsrc(d);
    const Arrow a = out.orbit_of(ts.point(v, 0), ts.transport(d, ts.point(v, 0)));
    for (Elem h = 1; h < n; ++h)
      if (out.orbit_of(ts.point(v, h), ts.transport(d, ts.point(v, h))) != a)
        throw std::logic_error("connection arrow depends on the fiber point");
    out.connection.arrow.push_back(a);
  }
  return out;
}

// --- charts at a basepoint u0 ----------------------------------------------

/// Map from the loops at x0 = p(u0) to G.
struct VertexChart {
  Point u0 = 0;
  std::vector<Arrow> loops;   // vertex_group order: unit first
  std::vector<Elem> value;    // value[i] is the image of loops[i]
};

namespace detail {

inline Elem fiber_element(const BundleGroupoid& bg, Point from, Point to) {
  // the g with to = from . g
  const TotalSpace ts = bg.total_space();
  return bg.group().mul(bg.group().inv(ts.fiber_coord(from)), ts.fiber_coord(to));
}

}  // namespace detail

/// phi([w, u0]) = g iff w = u0 g.
inline VertexChart vertex_chart_phi(const BundleGroupoid& bg, Point u0) {
  const TotalSpace ts = bg.total_space();
  if (u0 >= ts.size()) throw Error("basepoint is not a point of the total space");
  const Vertex x0 = ts.proj(u0);
  VertexChart c{u0, vertex_group(*bg.groupoid, x0).arrows, {}};
  for (Arrow loop : c.loops) {
    const Point w = bg.first_given_second(loop, u0);
    c.value.push_back(detail::fiber_element(bg, u0, w));
  }
  return c;
}

/// psi([u0, w]) = g^{-1} iff w = u0 g.
inline VertexChart vertex_chart_psi(const BundleGroupoid& bg, Point u0) {
  const TotalSpace ts = bg.total_space();
  if (u0 >= ts.size()) throw Error("basepoint is not a point of the total space");
  const Vertex x0 = ts.proj(u0);
  VertexChart c{u0, vertex_group(*bg.groupoid, x0).arrows, {}};
  for (Arrow loop : c.loops) {
    const Point w = bg.second_given_first(loop, u0);
    c.value.push_back(bg.group().inv(detail::fiber_element(bg, u0, w)));
  }
  return c;
}

/// Chart as a map between the vertex group table and G, checked to be an
/// isomorphism.
inline Diagnostics verify_vertex_chart(const BundleGroupoid& bg, const VertexChart& c) {
  const TotalSpace ts = bg.total_space();
  const HomSet vg = vertex_group(*bg.groupoid, ts.proj(c.u0));
  if (vg.arrows != c.loops) return Diagnostics::structural("shape", "chart domain is not G[x0]");
  return verify_group_isomorphism(*vg.group, bg.group(), c.value);
}

/// Bijection between a set of arrows and P.
struct FiberChart {
  Point u0 = 0;
  std::vector<Arrow> domain;   // ascending
  std::vector<Point> image;    // image[i] for domain[i]
};

/// tau([w, u0]) = w on t^{-1}(x0).
inline FiberChart fiber_chart_tau(const BundleGroupoid& bg, Point u0) {
  const TotalSpace ts = bg.total_space();
  if (u0 >= ts.size()) throw Error("basepoint is not a point of the total space");
  const Vertex x0 = ts.proj(u0);
  FiberChart c{u0, {}, {}};
  for (Arrow a = 0; a < bg.groupoid->arrow_count(); ++a)
    if (bg.groupoid->tgt(a) == x0) {
      c.domain.push_back(a);
      c.image.push_back(bg.first_given_second(a, u0));
    }
  return c;
}

/// sigma([u0, w]) = w on s^{-1}(x0).
inline FiberChart fiber_chart_sigma(const BundleGroupoid& bg, Point u0) {
  const TotalSpace ts = bg.total_space();
  if (u0 >= ts.size()) throw Error("basepoint is not a point of the total space");
  const Vertex x0 = ts.proj(u0);
  FiberChart c{u0, {}, {}};
  for (Arrow a : bg.groupoid->outgoing(x0)) {
    c.domain.push_back(a);
    c.image.push_back(bg.second_given_first(a, u0));
  }
  return c;
}

inline Diagnostics verify_fiber_bijection(const BundleGroupoid& bg, const FiberChart& c) {
  const TotalSpace ts = bg.total_space();
  if (c.domain.size() != ts.size())
    return Diagnostics::structural("bijection", "domain and total space sizes differ");
  std::vector<char> hit(ts.size());
  for (std::size_t i = 0; i < c.image.size(); ++i)
    if (c.image[i] >= ts.size() || hit[c.image[i]]++)
      return Diagnostics::fail("bijection", "chart is not injective", {c.domain[i]});
  return Diagnostics::passed();
}

struct ChartLaw {
  std::string name;
  Diagnostics result;
};

/// Every chart law at u0, each as a named check: phi and psi are
/// isomorphisms and rebase by conjugation along the fiber, tau and sigma are
/// bijections with p o tau = s, p o sigma = t, tau(y.g) = tau(y).psi(g),
/// sigma(g^{-1}.y) = sigma(y).phi(g), and both rebase by right translation.
inline std::vector<ChartLaw> chart_laws(const BundleGroupoid& bg, Point u0) {
  const TotalSpace ts = bg.total_space();
  const Groupoid& g = *bg.groupoid;
  const auto& grp = bg.group();
  const VertexChart phi = vertex_chart_phi(bg, u0), psi = vertex_chart_psi(bg, u0);
  const FiberChart tau = fiber_chart_tau(bg, u0), sigma = fiber_chart_sigma(bg, u0);
  std::vector<ChartLaw> r;
  r.push_back({"phi isomorphism", verify_vertex_chart(bg, phi)});
  r.push_back({"psi isomorphism", verify_vertex_chart(bg, psi)});

  auto rebase_vertex = [&](const VertexChart& base, bool use_phi) {
    for (Elem h = 0; h < grp.order(); ++h) {
      const Point u1 = ts.raction(u0, h);
      const VertexChart c = use_phi ? vertex_chart_phi(bg, u1) : vertex_chart_psi(bg, u1);
      for (std::size_t i = 0; i < c.loops.size(); ++i)
        if (c.value[i] != grp.conj(base.value[i], h))
          return Diagnostics::fail("rebase", "chart at u0.h is not conjugation by h",
                                   {h, c.loops[i]});
    }
    return Diagnostics::passed();
  };
  r.push_back({"phi rebasing", rebase_vertex(phi, true)});
  r.push_back({"psi rebasing", rebase_vertex(psi, false)});

  std::vector<Point> tau_of(g.arrow_count(), 0), sigma_of(g.arrow_count(), 0);
  for (std::size_t i = 0; i < tau.domain.size(); ++i) tau_of[tau.domain[i]] = tau.image[i];
  for (std::size_t i = 0; i < sigma.domain.size(); ++i) sigma_of[sigma.domain[i]] = sigma.image[i];

  r.push_back({"tau bijection", verify_fiber_bijection(bg, tau)});
  Diagnostics base = Diagnostics::passed(), equi = Diagnostics::passed();
  for (Arrow y : tau.domain) {
    if (base && ts.proj(tau_of[y]) != g.src(y)) base = Diagnostics::fail("base", "p o tau != s", {y});
    for (std::size_t i = 0; i < psi.loops.size() && equi; ++i)
      if (tau_of[g.compose(y, psi.loops[i])] != ts.raction(tau_of[y], psi.value[i]))
        equi = Diagnostics::fail("equivariance", "tau(y.g) != tau(y).psi(g)", {y, psi.loops[i]});
  }
  r.push_back({"tau base", base});
  r.push_back({"tau equivariance", equi});

  r.push_back({"sigma bijection", verify_fiber_bijection(bg, sigma)});
  base = Diagnostics::passed();
  equi = Diagnostics::passed();
  for (Arrow y : sigma.domain) {
    if (base && ts.proj(sigma_of[y]) != g.tgt(y))
      base = Diagnostics::fail("base", "p o sigma != t", {y});
    for (std::size_t i = 0; i < phi.loops.size() && equi; ++i)
      if (sigma_of[g.compose(g.inv(phi.loops[i]), y)] != ts.raction(sigma_of[y], phi.value[i]))
        equi = Diagnostics::fail("equivariance", "sigma(g^-1.y) != sigma(y).phi(g)",
                                 {y, phi.loops[i]});
  }
  r.push_back({"sigma base", base});
  r.push_back({"sigma equivariance", equi});

  Diagnostics tau_rebase = Diagnostics::passed(), sigma_rebase = Diagnostics::passed();
  for (Elem h = 0; h < grp.order(); ++h) {
    const Point u1 = ts.raction(u0, h);
    const FiberChart t1 = fiber_chart_tau(bg, u1), s1 = fiber_chart_sigma(bg, u1);
    for (std::size_t i = 0; i < t1.domain.size() && tau_rebase; ++i)
      if (t1.image[i] != ts.raction(tau_of[t1.domain[i]], h))
        tau_rebase = Diagnostics::fail("rebase", "tau at u0.h != tau(-).h", {h, t1.domain[i]});
    for (std::size_t i = 0; i < s1.domain.size() && sigma_rebase; ++i)
      if (s1.image[i] != ts.raction(sigma_of[s1.domain[i]], h))
        sigma_rebase =
            Diagnostics::fail("rebase", "sigma at u0.h != sigma(-).h", {h, s1.domain[i]});
  }
  r.push_back({"tau rebasing", tau_rebase});
  r.push_back({"sigma rebasing", sigma_rebase});
  return r;
}

// --- reconstruction --------------------------------------------------------

/// Bundle s: t^{-1}(x0) -> G0 with structural group G[x0].
struct ReconstructedBundle {
  CocycleBundle bundle;
  HomSet vertex_group;             // element i of the structural group is arrows[i]
  std::vector<Arrow> reference;    // r_v in G[v, x0], composed along the BFS tree
  std::vector<Arrow> points;       // t^{-1}(x0); point (v, k) is r_v . loop_k
  SpanningTree tree;
};

inline ReconstructedBundle bundle_of_groupoid(const Groupoid& g, const Connection& conn,
                                              Object x0 = 0) {
  if (x0 >= g.object_count()) throw Error("basepoint out of range");
  if (auto t = is_transitive(g); !t.transitive)
    throw Error("groupoid is not transitive; some fibers are empty");
  if (auto d = verify_connection(g, conn); !d) throw Error("invalid connection: " + d.message);

  HomSet vg = vertex_group(g, x0);
  const FiniteGroup& grp = *vg.group;
  std::vector<Elem> loop_index(g.arrow_count(), 0);
  for (std::size_t i = 0; i < vg.arrows.size(); ++i) loop_index[vg.arrows[i]] = static_cast<Elem>(i);

  // right action of G[x0] on t^{-1}(x0) must be free and transitive on s-fibers
  std::vector<Arrow> points;
  for (Arrow a = 0; a < g.arrow_count(); ++a)
    if (g.tgt(a) == x0) points.push_back(a);
  for (Arrow y : points) {
    std::vector<Arrow> orbit;
    for (Arrow loop : vg.arrows) orbit.push_back(g.compose(y, loop));
    std::sort(orbit.begin(), orbit.end());
    if (std::adjacent_find(orbit.begin(), orbit.end()) != orbit.end())
      throw std::logic_error("vertex group does not act freely on t^{-1}(x0)");
    if (orbit != g.hom(g.src(y), x0))
      throw std::logic_error("vertex group is not transitive on an s-fiber");
  }

  SpanningTree tree = spanning_tree(conn.base, x0);
  std::vector<Arrow> ref(g.object_count());
  ref[x0] = g.unit(x0);
  for (std::size_t i = 1; i < tree.order.size(); ++i) {
    const Vertex w = tree.order[i];
    const Dart d = *tree.parent[w];
    ref[w] = g.compose(conn.arrow[BaseGraph::rev(d)], ref[conn.base.dsrc(d)]);
  }

  // label(d): the loop gamma with T_d(r_v) = r_w . gamma, T_d = a(rev d) . (-)
  std::vector<Elem> labels(conn.base.dart_count());
  for (Dart d = 0; d < labels.size(); ++d) {
    const Arrow moved = g.compose(conn.arrow[BaseGraph::rev(d)], ref[conn.base.dsrc(d)]);
    const Arrow gamma = g.compose(g.inv(ref[conn.base.dtgt(d)]), moved);
    labels[d] = loop_index[gamma];
  }

  std::vector<Arrow> ordered;
  for (Vertex v = 0; v < g.object_count(); ++v)
    for (Arrow loop : vg.arrows) ordered.push_back(g.compose(ref[v], loop));

  CocycleBundle bundle{conn.base, grp, std::move(labels)};
  if (auto d = verify_cocycle(bundle); !d)
    throw std::logic_error("reconstructed labels are not a cocycle: " + d.message);
  return {std::move(bundle), std::move(vg), std::move(ref), std::move(ordered), std::move(tree)};
}

/// Re-express a bundle over a group H in terms of G through an isomorphism
/// map: H -> G.
inline CocycleBundle relabel_bundle(const CocycleBundle& b, const FiniteGroup& target,
                                    const std::vector<Elem>& map) {
  if (auto d = verify_group_isomorphism(b.group, target, map); !d)
    throw Error("relabeling map is not an isomorphism: " + d.message);
  std::vector<Elem> labels;
  for (Elem l : b.label) labels.push_back(map[l]);
  return {b.base, target, std::move(labels)};
}

struct RoundTrip {
  std::optional<BundleIso> witness;
  bool trivial_before = false;
  bool trivial_after = false;
  Holonomy holonomy_before, holonomy_after;
  Diagnostics tau_check;
};

/// b -> G(P) -> bundle at x0 -> (relabeled through phi) compared with b.
/// tau at u0 = (x0, e) is checked as a base-preserving, psi-equivariant
/// bijection from the reconstructed total space onto P.
inline RoundTrip roundtrip_bundle(const CocycleBundle& b, Vertex x0 = 0) {
  const BundleGroupoid bg = groupoid_of_bundle(b);
  const ReconstructedBundle rb = bundle_of_groupoid(*bg.groupoid, bg.connection, x0);
  const TotalSpace ts = bg.total_space();
  const Point u0 = ts.point(x0, b.group.identity());
  const VertexChart phi = vertex_chart_phi(bg, u0);
  const CocycleBundle back = relabel_bundle(rb.bundle, b.group, phi.value);

  RoundTrip r;
  r.witness = bundles_isomorphic(b, back);
  r.trivial_before = is_trivial(b).trivial;
  r.trivial_after = is_trivial(rb.bundle).trivial;
  r.holonomy_before = holonomy_group(b, 0);
  r.holonomy_after = holonomy_group(back, 0);

  const FiberChart tau = fiber_chart_tau(bg, u0);
  const VertexChart psi = vertex_chart_psi(bg, u0);
  r.tau_check = verify_fiber_bijection(bg, tau);
  if (r.tau_check) {
    const Groupoid& g = *bg.groupoid;
    std::vector<Point> tau_of(g.arrow_count(), 0);
    for (std::size_t i = 0; i < tau.domain.size(); ++i) tau_of[tau.domain[i]] = tau.image[i];
    for (Arrow y : tau.domain) {
      if (ts.proj(tau_of[y]) != g.src(y)) {
        r.tau_check = Diagnostics::fail("base", "p o tau != s", {y});
        break;
      }
      for (std::size_t i = 0; i < psi.loops.size(); ++i)
        if (tau_of[g.compose(y, psi.loops[i])] != ts.raction(tau_of[y], psi.value[i])) {
          r.tau_check = Diagnostics::fail("equivariance", "tau(y.gamma) != tau(y).psi(gamma)",
                                          {y, psi.loops[i]});
          break;
        }
      if (!r.tau_check) break;
    }
  }
  return r;
}

struct PointBaseIso {
  BundleGroupoid bundle_groupoid;
  Groupoid group_groupoid;
  std::vector<Arrow> arrow_map;    // arrow [g, 1] -> g
  Diagnostics iso_check;
  Diagnostics product_check;       // [g,1][h,1] = [gh,1] on all pairs
};

/// Over a single point, G(P) is the group itself via [g, 1] -> g.
inline PointBaseIso point_base_degenerate(const FiniteGroup& grp) {
  CocycleBundle b{BaseGraph(1, {}), grp, {}};
  PointBaseIso r{groupoid_of_bundle(b), groupoid_of_group(grp), {}, {}, {}};
  const auto& bg = r.bundle_groupoid;
  const TotalSpace ts = bg.total_space();
  const Point one = ts.point(0, grp.identity());
  std::vector<Arrow> bracket(grp.order());  // bracket[g] = [g, 1]
  for (Elem g = 0; g < grp.order(); ++g) bracket[g] = bg.orbit_of(ts.point(0, g), one);
  r.arrow_map.resize(grp.order());
  for (Elem g = 0; g < grp.order(); ++g) r.arrow_map[bracket[g]] = g;
  const std::vector<Object> obj{0};
  r.iso_check = verify_groupoid_iso(*bg.groupoid, r.group_groupoid, obj, r.arrow_map);
  for (Elem g = 0; g < grp.order() && r.product_check; ++g)
    for (Elem h = 0; h < grp.order(); ++h)
      if (bg.groupoid->compose(bracket[g], bracket[h]) != bracket[grp.mul(g, h)]) {
        r.product_check = Diagnostics::fail("product", "[g,1][h,1] != [gh,1]", {g, h});
        break;
      }
  return r;
}

}  // namespace gpdyn
