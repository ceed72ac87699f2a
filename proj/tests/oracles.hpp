#pragma once

// Brute-force reference computations for the test suites. Nothing here
// calls the library routine it is used to check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/bundle.hpp"
#include "gpdyn/dynamics.hpp"
#include "gpdyn/groupoid.hpp"

namespace oracle {

using namespace gpdyn;

// Closure of gens by repeated products until nothing new appears.
inline std::vector<Elem> closure(const FiniteGroup& g, const std::vector<Elem>& gens) {
  std::set<Elem> s(gens.begin(), gens.end());
  s.insert(g.identity());
  for (bool grew = true; grew;) {
    grew = false;
    std::set<Elem> next = s;
    for (Elem a : s)
      for (Elem b : s) next.insert(g.mul(a, b));
    if (next.size() != s.size()) {
      grew = true;
      s = std::move(next);
    }
  }
  return {s.begin(), s.end()};
}

inline std::optional<std::pair<Elem, Elem>> noncommuting_pair(const FiniteGroup& g) {
  for (Elem a = 0; a < g.order(); ++a)
    for (Elem b = 0; b < g.order(); ++b)
      if (g.mul(a, b) != g.mul(b, a)) return std::pair{a, b};
  return std::nullopt;
}

// --- groupoid axioms by direct lookup in a map of composition triples -----

inline bool groupoid_axioms_hold(const GroupoidData& d) {
  std::map<std::pair<Arrow, Arrow>, Arrow> comp;
  for (const auto& [a, b, ab] : d.comp) comp[{a, b}] = ab;
  for (Arrow a = 0; a < d.arrows; ++a)
    for (Arrow b = 0; b < d.arrows; ++b)
      if ((d.tgt[a] == d.src[b]) != (comp.count({a, b}) == 1)) return false;
  for (const auto& [key, ab] : comp)
    if (d.src[ab] != d.src[key.first] || d.tgt[ab] != d.tgt[key.second]) return false;
  std::set<Arrow> units(d.unit.begin(), d.unit.end());
  if (units.size() != d.objects) return false;
  for (Object x = 0; x < d.objects; ++x)
    if (d.src[d.unit[x]] != x || d.tgt[d.unit[x]] != x) return false;
  for (Arrow a = 0; a < d.arrows; ++a) {
    if (comp.at({d.unit[d.src[a]], a}) != a || comp.at({a, d.unit[d.tgt[a]]}) != a) return false;
    const Arrow b = d.inv[a];
    if (d.src[b] != d.tgt[a] || d.tgt[b] != d.src[a]) return false;
    if (comp.at({a, b}) != d.unit[d.src[a]] || comp.at({b, a}) != d.unit[d.tgt[a]]) return false;
  }
  for (const auto& [ab_key, ab] : comp)
    for (Arrow c = 0; c < d.arrows; ++c) {
      auto bc = comp.find({ab_key.second, c});
      if (bc == comp.end()) continue;
      if (comp.at({ab, c}) != comp.at({ab_key.first, bc->second})) return false;
    }
  return true;
}

// Arrow indices of d permuted by perm (old -> new), composition list resorted.
inline GroupoidData permute_arrows(const GroupoidData& d, const std::vector<Arrow>& perm) {
  GroupoidData r = d;
  for (Arrow a = 0; a < d.arrows; ++a) {
    r.src[perm[a]] = d.src[a];
    r.tgt[perm[a]] = d.tgt[a];
    r.inv[perm[a]] = perm[d.inv[a]];
  }
  for (Object x = 0; x < d.objects; ++x) r.unit[x] = perm[d.unit[x]];
  for (auto& t : r.comp)
    for (auto& a : t) a = perm[a];
  std::sort(r.comp.begin(), r.comp.end());
  return r;
}

// --- groupoid of a bundle by literal orbit calculus ------------------------

using Pair = std::pair<Point, Point>;

// Orbits of the diagonal action as explicit sets of pairs; an orbit is named
// by its lexicographically least pair. Composition finds g with v' = v g and
// returns the orbit of (u g, w').
struct OrbitGroupoid {
  std::vector<Pair> canon;               // per orbit: least pair
  std::map<Pair, std::size_t> orbit_of;  // every pair -> orbit id
  std::vector<std::vector<Pair>> members;
  const CocycleBundle* bundle = nullptr;

  Point act(Point u, Elem k) const {
    const std::size_t n = bundle->group.order();
    return static_cast<Point>((u / n) * n + bundle->group.mul(u % n, k));
  }
  Vertex proj(Point u) const { return static_cast<Vertex>(u / bundle->group.order()); }

  std::size_t src(std::size_t o) const { return proj(canon[o].first); }
  std::size_t tgt(std::size_t o) const { return proj(canon[o].second); }

  std::optional<std::size_t> compose(std::size_t o1, std::size_t o2) const {
    const auto [u, v] = canon[o1];
    const auto [v2, w2] = canon[o2];
    for (Elem g = 0; g < bundle->group.order(); ++g)
      if (act(v, g) == v2) return orbit_of.at({act(u, g), w2});
    return std::nullopt;
  }
  std::size_t inverse(std::size_t o) const {
    return orbit_of.at({canon[o].second, canon[o].first});
  }
  std::size_t unit(Vertex x) const {
    const Point v = static_cast<Point>(x * bundle->group.order());
    return orbit_of.at({v, v});
  }
};

inline OrbitGroupoid orbit_groupoid(const CocycleBundle& b) {
  OrbitGroupoid og;
  og.bundle = &b;
  const std::size_t np = b.base.vertex_count() * b.group.order();
  for (Point u = 0; u < np; ++u)
    for (Point v = 0; v < np; ++v) {
      if (og.orbit_of.count({u, v})) continue;
      std::vector<Pair> orbit;
      for (Elem k = 0; k < b.group.order(); ++k) orbit.push_back({og.act(u, k), og.act(v, k)});
      std::sort(orbit.begin(), orbit.end());
      orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
      const std::size_t id = og.canon.size();
      og.canon.push_back(orbit.front());
      for (const auto& p : orbit) og.orbit_of[p] = id;
      og.members.push_back(std::move(orbit));
    }
  return og;
}

// --- gauges ---------------------------------------------------------------

// First gauge (lexicographic in the vertex values) carrying b1 to b2.
inline std::optional<std::vector<Elem>> gauge_search(const CocycleBundle& b1,
                                                     const CocycleBundle& b2) {
  const std::size_t m = b1.base.vertex_count(), n = b1.group.order();
  std::vector<Elem> h(m, 0);
  const auto& g = b1.group;
  while (true) {
    bool ok = true;
    for (Dart d = 0; d < b1.base.dart_count() && ok; ++d)
      ok = g.mul(g.mul(h[b1.base.dtgt(d)], b1.label[d]), g.inv(h[b1.base.dsrc(d)])) ==
           b2.label[d];
    if (ok) return h;
    std::size_t i = 0;
    while (i < m && ++h[i] == n) h[i++] = 0;
    if (i == m) return std::nullopt;
  }
}

inline bool trivial_by_gauge_search(const CocycleBundle& b) {
  CocycleBundle flat = b;
  std::fill(flat.label.begin(), flat.label.end(), b.group.identity());
  return gauge_search(b, flat).has_value();
}

inline double gauge_space_size(const CocycleBundle& b) {
  double s = 1;
  for (std::size_t i = 0; i < b.base.vertex_count(); ++i) s *= static_cast<double>(b.group.order());
  return s;
}

// --- actions --------------------------------------------------------------

// Minimal nonempty invariant subsets by enumerating all 2^|Y| subsets.
inline std::vector<std::vector<Point>> minimal_invariant_subsets(const GroupoidAction& a) {
  const std::size_t n = a.size();
  std::vector<std::uint32_t> invariant;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool inv = true;
    for (Point y = 0; y < n && inv; ++y) {
      if (!(mask >> y & 1)) continue;
      for (Arrow g : a.groupoid().outgoing(a.anchor(y)))
        if (!(mask >> a.apply(y, g) & 1)) {
          inv = false;
          break;
        }
    }
    if (inv) invariant.push_back(mask);
  }
  std::vector<std::vector<Point>> r;
  for (auto m : invariant) {
    bool minimal = true;
    for (auto o : invariant)
      if (o != m && (o & m) == o) {
        minimal = false;
        break;
      }
    if (!minimal) continue;
    std::vector<Point> s;
    for (Point y = 0; y < n; ++y)
      if (m >> y & 1) s.push_back(y);
    r.push_back(std::move(s));
  }
  std::sort(r.begin(), r.end());
  return r;
}

// All anchor-preserving maps checked one by one for equivariance.
inline std::vector<std::vector<Point>> equivariant_maps(const GroupoidAction& from,
                                                        const GroupoidAction& to) {
  std::vector<std::vector<Point>> choices(from.size());
  for (Point y = 0; y < from.size(); ++y)
    for (Point z = 0; z < to.size(); ++z)
      if (to.anchor(z) == from.anchor(y)) choices[y].push_back(z);
  std::vector<std::vector<Point>> out;
  if (std::any_of(choices.begin(), choices.end(), [](auto& c) { return c.empty(); })) return out;
  std::vector<std::size_t> idx(from.size(), 0);
  while (true) {
    std::vector<Point> f(from.size());
    for (Point y = 0; y < from.size(); ++y) f[y] = choices[y][idx[y]];
    bool ok = true;
    for (Point y = 0; y < from.size() && ok; ++y)
      for (Arrow g : from.groupoid().outgoing(from.anchor(y)))
        if (f[from.apply(y, g)] != to.apply(f[y], g)) {
          ok = false;
          break;
        }
    if (ok) out.push_back(f);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == choices[i].size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double anchor_map_count(const GroupoidAction& from, const GroupoidAction& to) {
  double c = 1;
  for (Point y = 0; y < from.size(); ++y) c *= static_cast<double>(to.fiber(from.anchor(y)).size());
  return c;
}

// All invariant sections by enumerating every section of the anchor.
inline std::vector<std::vector<Point>> invariant_sections(const GroupoidAction& a) {
  const Groupoid& g = a.groupoid();
  std::vector<std::vector<Point>> fibers;
  for (Object x = 0; x < g.object_count(); ++x) fibers.push_back(a.fiber(x));
  std::vector<std::vector<Point>> out;
  if (std::any_of(fibers.begin(), fibers.end(), [](auto& f) { return f.empty(); })) return out;
  std::vector<std::size_t> idx(fibers.size(), 0);
  while (true) {
    std::vector<Point> s(fibers.size());
    for (std::size_t x = 0; x < s.size(); ++x) s[x] = fibers[x][idx[x]];
    bool ok = true;
    for (Arrow h = 0; h < g.arrow_count() && ok; ++h) ok = a.apply(s[g.src(h)], h) == s[g.tgt(h)];
    if (ok) out.push_back(s);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == fibers[i].size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
