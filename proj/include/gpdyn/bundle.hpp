#pragma once

// Principal G-bundles over finite connected graphs, given by dart labels
// (transition data). Transport along a dart multiplies on the left by its
// label, so it commutes with the right principal action.

#include <algorithm>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/core.hpp"

namespace gpdyn {

/// Undirected multigraph; edge i yields dart 2i (u -> v) and dart 2i+1
/// (v -> u). Loops are allowed.
class BaseGraph {
 public:
  BaseGraph() = default;
  BaseGraph(std::size_t vertices, std::vector<std::pair<Vertex, Vertex>> edges)
      : vertices_(vertices), edges_(std::move(edges)) {
    out_.resize(vertices_);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      auto [u, v] = edges_[i];
      if (u >= vertices_ || v >= vertices_)
        throw Error("edge " + std::to_string(i) + " has an endpoint out of range");
      out_[u].push_back(static_cast<Dart>(2 * i));
      out_[v].push_back(static_cast<Dart>(2 * i + 1));
    }
    // neighbors in ascending index order, ties by dart index
    for (auto& darts : out_)
      std::sort(darts.begin(), darts.end(), [&](Dart a, Dart b) {
        return std::pair(dtgt(a), a) < std::pair(dtgt(b), b);
      });
  }

  std::size_t vertex_count() const { return vertices_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t dart_count() const { return 2 * edges_.size(); }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }

  static Dart rev(Dart d) { return d ^ 1u; }
  Vertex dsrc(Dart d) const { return d % 2 == 0 ? edges_[d / 2].first : edges_[d / 2].second; }
  Vertex dtgt(Dart d) const { return dsrc(rev(d)); }

  /// Darts leaving v, ordered by target vertex then dart index.
  const std::vector<Dart>& out_darts(Vertex v) const { return out_[v]; }

  bool connected() const {
    if (vertices_ == 0) return false;
    std::vector<char> seen(vertices_);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (Dart d : out_[v])
        if (!seen[dtgt(d)]) {
          seen[dtgt(d)] = 1;
          ++count;
          stack.push_back(dtgt(d));
        }
    }
    return count == vertices_;
  }

  friend bool operator==(const BaseGraph& a, const BaseGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t vertices_ = 0;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<std::vector<Dart>> out_;
};

struct CocycleBundle {
  BaseGraph base;
  FiniteGroup group;
  std::vector<Elem> label;  // per dart

  /// Dart 2i gets labels[i], dart 2i+1 its inverse.
  static CocycleBundle from_edge_labels(BaseGraph base, FiniteGroup group,
                                        const std::vector<Elem>& labels) {
    if (labels.size() != base.edge_count()) throw Error("one label per edge is required");
    std::vector<Elem> darts(base.dart_count());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!group.contains(labels[i]))
        throw Error("label of edge " + std::to_string(i) + " out of range");
      darts[2 * i] = labels[i];
      darts[2 * i + 1] = group.inv(labels[i]);
    }
    return {std::move(base), std::move(group), std::move(darts)};
  }

  std::vector<Elem> edge_labels() const {
    std::vector<Elem> r;
    for (std::size_t i = 0; i < base.edge_count(); ++i) r.push_back(label[2 * i]);
    return r;
  }
};

inline Diagnostics verify_cocycle(const CocycleBundle& b) {
  using detail::str;
  if (b.label.size() != b.base.dart_count())
    return Diagnostics::structural("shape", "label count differs from dart count");
  for (Dart d = 0; d < b.label.size(); ++d)
    if (!b.group.contains(b.label[d]))
      return Diagnostics::structural("range", "label of dart " + str(d) + " out of range", {d});
  if (!b.base.connected()) return Diagnostics::structural("connectivity", "base not connected");
  for (Dart d = 0; d < b.label.size(); ++d)
    if (b.label[BaseGraph::rev(d)] != b.group.inv(b.label[d]))
      return Diagnostics::fail("involution",
                               "label of reverse dart is not the inverse at dart " + str(d), {d});
  return Diagnostics::passed();
}

/// P = V x G; point (v, h) has index v * |G| + h.
class TotalSpace {
 public:
  explicit TotalSpace(const CocycleBundle& b) : bundle_(&b), n_(b.group.order()) {}

  std::size_t size() const { return bundle_->base.vertex_count() * n_; }
  Point point(Vertex v, Elem h) const { return static_cast<Point>(v * n_ + h); }
  Vertex proj(Point u) const { return static_cast<Vertex>(u / n_); }
  Elem fiber_coord(Point u) const { return static_cast<Elem>(u % n_); }

  Point raction(Point u, Elem k) const {
    return point(proj(u), bundle_->group.mul(fiber_coord(u), k));
  }

  // Precondition: proj(u) == dsrc(d).
  Point transport(Dart d, Point u) const {
    return point(bundle_->base.dtgt(d), bundle_->group.mul(bundle_->label[d], fiber_coord(u)));
  }

  const CocycleBundle& bundle() const { return *bundle_; }

 private:
  const CocycleBundle* bundle_;
  std::size_t n_;
};

inline TotalSpace total_space(const CocycleBundle& b) { return TotalSpace(b); }

/// Fiber preservation, free and fiber-transitive action, transport inverse
/// along reverse darts, and right-equivariance of transport.
inline Diagnostics verify_total_space(const TotalSpace& ts) {
  const auto& b = ts.bundle();
  const auto& grp = b.group;
  for (Point u = 0; u < ts.size(); ++u) {
    std::vector<char> orbit(grp.order());
    for (Elem k = 0; k < grp.order(); ++k) {
      const Point uk = ts.raction(u, k);
      if (ts.proj(uk) != ts.proj(u))
        return Diagnostics::fail("fibers", "action leaves the fiber", {u, k});
      if (uk == u && k != grp.identity())
        return Diagnostics::fail("free", "action is not free", {u, k});
      orbit[ts.fiber_coord(uk)] = 1;
    }
    if (std::find(orbit.begin(), orbit.end(), 0) != orbit.end())
      return Diagnostics::fail("transitive", "action is not transitive on the fiber", {u});
  }
  for (Dart d = 0; d < b.base.dart_count(); ++d) {
    for (Elem h = 0; h < grp.order(); ++h) {
      const Point u = ts.point(b.base.dsrc(d), h);
      if (ts.transport(BaseGraph::rev(d), ts.transport(d, u)) != u)
        return Diagnostics::fail("transport", "reverse transport is not inverse", {d, u});
      for (Elem k = 0; k < grp.order(); ++k)
        if (ts.transport(d, ts.raction(u, k)) != ts.raction(ts.transport(d, u), k))
          return Diagnostics::fail("equivariance", "transport is not right-equivariant",
                                   {d, u, k});
    }
  }
  return Diagnostics::passed();
}

struct GaugeTransformation {
  std::vector<Elem> at;  // per vertex
};

/// label'(d) = h_{dtgt d} label(d) h_{dsrc d}^{-1}
inline CocycleBundle apply_gauge(const CocycleBundle& b, const GaugeTransformation& h) {
  if (h.at.size() != b.base.vertex_count()) throw Error("gauge needs one element per vertex");
  CocycleBundle out = b;
  for (Dart d = 0; d < b.base.dart_count(); ++d)
    out.label[d] = b.group.mul(b.group.mul(h.at[b.base.dtgt(d)], b.label[d]),
                               b.group.inv(h.at[b.base.dsrc(d)]));
  return out;
}

struct SpanningTree {
  Vertex root = 0;
  std::vector<Vertex> order;                   // BFS discovery order
  std::vector<std::optional<Dart>> parent;     // dart into each vertex
  std::vector<char> tree_edge;                 // per edge
};

/// BFS from root visiting neighbors in ascending index order.
inline SpanningTree spanning_tree(const BaseGraph& g, Vertex root) {
  if (root >= g.vertex_count()) throw Error("root vertex out of range");
  SpanningTree t{root, {root}, std::vector<std::optional<Dart>>(g.vertex_count()),
                 std::vector<char>(g.edge_count())};
  std::vector<char> seen(g.vertex_count());
  seen[root] = 1;
  for (std::size_t i = 0; i < t.order.size(); ++i) {
    for (Dart d : g.out_darts(t.order[i])) {
      const Vertex w = g.dtgt(d);
      if (seen[w]) continue;
      seen[w] = 1;
      t.parent[w] = d;
      t.tree_edge[d / 2] = 1;
      t.order.push_back(w);
    }
  }
  if (t.order.size() != g.vertex_count()) throw Error("base not connected");
  return t;
}

struct GaugeFixing {
  CocycleBundle normalized;
  GaugeTransformation gauge;
  SpanningTree tree;
};

/// Gauge making every tree dart carry the identity; the non-tree labels are
/// then the holonomies of the fundamental cycles at the root.
inline GaugeFixing gauge_normalize(const CocycleBundle& b, Vertex root = 0) {
  SpanningTree tree = spanning_tree(b.base, root);
  const auto& grp = b.group;
  GaugeTransformation h{std::vector<Elem>(b.base.vertex_count(), grp.identity())};
  for (std::size_t i = 1; i < tree.order.size(); ++i) {
    const Vertex w = tree.order[i];
    const Dart d = *tree.parent[w];
    h.at[w] = grp.mul(h.at[b.base.dsrc(d)], grp.inv(b.label[d]));
  }
  return {apply_gauge(b, h), std::move(h), std::move(tree)};
}

struct CycleHolonomy {
  std::size_t edge = 0;
  Dart dart = 0;      // canonical orientation: the lower dart of the edge
  Elem holonomy = 0;
};

struct Holonomy {
  Vertex basepoint = 0;
  std::vector<Elem> subgroup;          // sorted
  std::vector<CycleHolonomy> cycles;   // one per non-tree edge, by edge index
};

/// Holonomy along a dart path: label(e_k) ... label(e_1).
inline Elem path_holonomy(const CocycleBundle& b, const std::vector<Dart>& path) {
  Elem acc = b.group.identity();
  for (Dart d : path) acc = b.group.mul(b.label[d], acc);
  return acc;
}

inline Holonomy holonomy_group(const CocycleBundle& b, Vertex v0 = 0) {
  auto fixing = gauge_normalize(b, v0);
  Holonomy r{v0, {}, {}};
  std::vector<Elem> gens;
  for (std::size_t e = 0; e < b.base.edge_count(); ++e) {
    if (fixing.tree.tree_edge[e]) continue;
    const Dart d = static_cast<Dart>(2 * e);
    r.cycles.push_back({e, d, fixing.normalized.label[d]});
    gens.push_back(fixing.normalized.label[d]);
  }
  r.subgroup = generated_subgroup(b.group, gens);
  return r;
}

struct Triviality {
  bool trivial = false;
  bool by_holonomy = false;
  bool by_section = false;
  std::optional<std::vector<Point>> section;  // transport-invariant global section
  Holonomy holonomy;
};

/// Two independent criteria: all normalized non-tree labels are the identity,
/// and a transport-invariant global section of the total space exists.
inline Triviality is_trivial(const CocycleBundle& b) {
  Triviality r;
  r.holonomy = holonomy_group(b, 0);
  r.by_holonomy = std::all_of(r.holonomy.cycles.begin(), r.holonomy.cycles.end(),
                              [&](const CycleHolonomy& c) { return c.holonomy == b.group.identity(); });

  TotalSpace ts(b);
  const std::size_t m = b.base.vertex_count();
  for (Elem h0 = 0; h0 < b.group.order() && !r.section; ++h0) {
    std::vector<std::optional<Point>> sec(m);
    sec[0] = ts.point(0, h0);
    std::deque<Vertex> queue{0};
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      for (Dart d : b.base.out_darts(v)) {
        const Vertex w = b.base.dtgt(d);
        if (!sec[w]) {
          sec[w] = ts.transport(d, *sec[v]);
          queue.push_back(w);
        }
      }
    }
    bool invariant = true;
    for (Dart d = 0; d < b.base.dart_count() && invariant; ++d)
      invariant = ts.transport(d, *sec[b.base.dsrc(d)]) == *sec[b.base.dtgt(d)];
    if (invariant) {
      std::vector<Point> pts;
      for (auto& p : sec) pts.push_back(*p);
      r.section = std::move(pts);
    }
  }
  r.by_section = r.section.has_value();
  if (r.by_holonomy != r.by_section)
    throw std::logic_error("triviality criteria disagree");
  r.trivial = r.by_holonomy;
  return r;
}

struct BundleIso {
  Elem conjugator = 0;          // h with h^{-1} hol1 h = hol2 on aligned cycles
  GaugeTransformation gauge;    // apply_gauge(b1, gauge) == b2
};

/// Gauge equivalence via conjugacy of the aligned normalized holonomy lists.
/// The returned gauge is checked against b2 before returning.
inline std::optional<BundleIso> bundles_isomorphic(const CocycleBundle& b1,
                                                   const CocycleBundle& b2) {
  if (!(b1.base == b2.base)) throw Error("bundles have different base graphs");
  if (!(b1.group == b2.group)) throw Error("bundles have different structural groups");
  const auto& grp = b1.group;
  auto n1 = gauge_normalize(b1, 0);
  auto n2 = gauge_normalize(b2, 0);
  std::vector<Elem> f1, f2;
  for (std::size_t e = 0; e < b1.base.edge_count(); ++e) {
    if (n1.tree.tree_edge[e]) continue;
    f1.push_back(n1.normalized.label[2 * e]);
    f2.push_back(n2.normalized.label[2 * e]);
  }
  auto h = are_conjugate_subgroup_maps(grp, f1, f2);
  if (!h) return std::nullopt;
  // b2 = g2^{-1} . c . g1 . b1 with c the constant gauge h^{-1}
  GaugeTransformation k{std::vector<Elem>(b1.base.vertex_count())};
  for (Vertex v = 0; v < k.at.size(); ++v)
    k.at[v] = grp.mul(grp.mul(grp.inv(n2.gauge.at[v]), grp.inv(*h)), n1.gauge.at[v]);
  if (apply_gauge(b1, k).label != b2.label)
    throw std::logic_error("constructed gauge does not carry b1 to b2");
  return BundleIso{*h, std::move(k)};
}

}  // namespace gpdyn
