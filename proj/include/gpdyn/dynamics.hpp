#pragma once

// Right groupoid actions with anchor maps, their orbits and minimal
// subflows, the finite ambit s^{-1}(x0), universal maps l_y and the fiber
// semigroup.
//
// At finite scale the function algebra defining the ambit is the algebra of
// all functions, so the ambit is the arrow set s^{-1}(x0) itself.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/core.hpp"
#include "gpdyn/groupoid.hpp"

namespace gpdyn {

inline constexpr const char* finite_specialization_note =
    "finite specialization: the ambit is the arrow set s^-1(x0) with the right "
    "action by composition";

using GroupoidPtr = std::shared_ptr<const Groupoid>;

struct ActionData;
struct ActionCheck;
ActionCheck verify_action(const ActionData& d);

// Raw action description: act lists (y, g, y.g) triples.
struct ActionData {
  GroupoidPtr groupoid;
  std::size_t space = 0;
  std::vector<Object> anchor;
  std::vector<std::array<std::uint32_t, 3>> act;
};

/// Right action y.g, defined exactly when src(g) == anchor(y).
class GroupoidAction {
 public:
  using ActFn = std::function<Point(Point, Arrow)>;

  static GroupoidAction build(GroupoidPtr g, std::vector<Object> anchor, const ActFn& act) {
    GroupoidAction a(std::move(g), std::move(anchor));
    for (Point y = 0; y < a.size(); ++y) {
      auto row = a.g_->outgoing(a.anchor_[y]);
      for (std::size_t j = 0; j < row.size(); ++j) a.act_[a.offset_[y] + j] = act(y, row[j]);
    }
    return a;
  }

  const Groupoid& groupoid() const { return *g_; }
  const GroupoidPtr& groupoid_ptr() const { return g_; }
  std::size_t size() const { return anchor_.size(); }
  Object anchor(Point y) const { return anchor_[y]; }
  const std::vector<Object>& anchor_map() const { return anchor_; }

  std::optional<Point> act(Point y, Arrow g) const {
    if (g_->src(g) != anchor_[y]) return std::nullopt;
    return act_[offset_[y] + g_->position_in_outgoing(g)];
  }

  // Precondition: src(g) == anchor(y).
  Point apply(Point y, Arrow g) const { return act_[offset_[y] + g_->position_in_outgoing(g)]; }

  std::vector<Point> fiber(Object x) const {
    std::vector<Point> r;
    for (Point y = 0; y < size(); ++y)
      if (anchor_[y] == x) r.push_back(y);
    return r;
  }

  std::vector<std::array<std::uint32_t, 3>> triples() const {
    std::vector<std::array<std::uint32_t, 3>> t;
    for (Point y = 0; y < size(); ++y)
      for (Arrow g : g_->outgoing(anchor_[y])) t.push_back({y, g, apply(y, g)});
    return t;
  }

 private:
  friend ActionCheck verify_action(const ActionData&);

  GroupoidAction(GroupoidPtr g, std::vector<Object> anchor)
      : g_(std::move(g)), anchor_(std::move(anchor)) {
    offset_.resize(anchor_.size());
    std::size_t total = 0;
    for (Point y = 0; y < anchor_.size(); ++y) {
      if (anchor_[y] >= g_->object_count()) throw Error("anchor out of range");
      offset_[y] = total;
      total += g_->outgoing(anchor_[y]).size();
    }
    act_.assign(total, 0);
  }

  GroupoidPtr g_;
  std::vector<Object> anchor_;
  std::vector<std::size_t> offset_;
  std::vector<Point> act_;
};

/// The three action laws: anchor(y.g) = tgt(g), (y.h).g = y.(hg),
/// y.unit(anchor(y)) = y.
inline Diagnostics verify_action(const GroupoidAction& a) {
  using detail::str;
  const Groupoid& g = a.groupoid();
  for (Point y = 0; y < a.size(); ++y)
    for (Arrow h : g.outgoing(a.anchor(y))) {
      const Point yh = a.apply(y, h);
      if (yh >= a.size())
        return Diagnostics::structural("range", "action value out of range", {y, h});
      if (a.anchor(yh) != g.tgt(h))
        return Diagnostics::fail("anchor", "anchor(y.g) != t(g)", {y, h});
    }
  for (Point y = 0; y < a.size(); ++y)
    if (a.apply(y, g.unit(a.anchor(y))) != y)
      return Diagnostics::fail("unit", "y.u(anchor(y)) != y at point " + str(y), {y});
  for (Point y = 0; y < a.size(); ++y)
    for (Arrow h : g.outgoing(a.anchor(y))) {
      const Point yh = a.apply(y, h);
      for (Arrow k : g.outgoing(g.tgt(h)))
        if (a.apply(yh, k) != a.apply(y, g.compose(h, k)))
          return Diagnostics::fail("compatibility", "(y.h).g != y.(hg)", {y, h, k});
    }
  return Diagnostics::passed();
}

struct ActionCheck {
  Diagnostics diagnostics;
  std::optional<GroupoidAction> action;
};

inline ActionCheck verify_action(const ActionData& d) {
  using detail::str;
  if (!d.groupoid) return {Diagnostics::structural("shape", "action has no groupoid"), {}};
  const Groupoid& g = *d.groupoid;
  if (d.anchor.size() != d.space)
    return {Diagnostics::structural("shape", "anchor length differs from space size"), {}};
  for (Point y = 0; y < d.space; ++y)
    if (d.anchor[y] >= g.object_count())
      return {Diagnostics::structural("range", "anchor out of range at point " + str(y), {y}), {}};
  GroupoidAction a(d.groupoid, d.anchor);
  std::vector<char> set(a.act_.size());
  for (const auto& [y, h, yh] : d.act) {
    if (y >= d.space || h >= g.arrow_count() || yh >= d.space)
      return {Diagnostics::structural("range", "act entry out of range", {y, h, yh}), {}};
    if (g.src(h) != d.anchor[y])
      return {Diagnostics::structural("composability", "composability domain violated", {y, h}),
              {}};
    const std::size_t slot = a.offset_[y] + g.position_in_outgoing(h);
    if (set[slot]++)
      return {Diagnostics::structural("composability", "duplicate act entry", {y, h}), {}};
    a.act_[slot] = yh;
  }
  for (Point y = 0; y < d.space; ++y) {
    auto row = g.outgoing(d.anchor[y]);
    for (std::size_t j = 0; j < row.size(); ++j)
      if (!set[a.offset_[y] + j])
        return {Diagnostics::structural("composability", "act missing on an admissible pair",
                                        {y, row[j]}),
                {}};
  }
  auto diag = verify_action(a);
  if (!diag) return {diag, {}};
  return {diag, std::move(a)};
}

struct ProperCheck {
  bool proper = true;
  std::string note = "all maps between finite discrete spaces are proper";
};

inline ProperCheck anchor_is_proper(const GroupoidAction&) { return {}; }

// --- standard actions ------------------------------------------------------

/// Y = G0, y.g = tgt(g).
inline GroupoidAction base_action(GroupoidPtr g) {
  std::vector<Object> anchor(g->object_count());
  std::iota(anchor.begin(), anchor.end(), 0);
  const Groupoid& ref = *g;
  return GroupoidAction::build(std::move(g), std::move(anchor),
                               [&](Point, Arrow h) { return ref.tgt(h); });
}

/// Points of b are shifted past those of a. Both must act through the same
/// groupoid object.
inline GroupoidAction disjoint_union(const GroupoidAction& a, const GroupoidAction& b) {
  if (a.groupoid_ptr() != b.groupoid_ptr()) throw Error("actions of different groupoids");
  std::vector<Object> anchor = a.anchor_map();
  anchor.insert(anchor.end(), b.anchor_map().begin(), b.anchor_map().end());
  const auto shift = static_cast<Point>(a.size());
  return GroupoidAction::build(a.groupoid_ptr(), std::move(anchor), [&](Point y, Arrow g) {
    return y < shift ? a.apply(y, g) : b.apply(y - shift, g) + shift;
  });
}

struct Ambit {
  GroupoidAction action;
  Object basepoint = 0;
  Point u0 = 0;                   // the point unit(x0)
  std::vector<Arrow> arrow_of;    // point -> arrow of s^{-1}(x0)
};

/// Y = s^{-1}(x0), anchor = tgt, y.g = yg.
inline Ambit build_ambit(GroupoidPtr g, Object x0 = 0) {
  if (x0 >= g->object_count()) throw Error("basepoint out of range");
  const Groupoid& ref = *g;
  auto out = ref.outgoing(x0);
  std::vector<Arrow> arrows(out.begin(), out.end());
  std::vector<Object> anchor;
  std::vector<char> hit(ref.object_count());
  for (Arrow a : arrows) {
    anchor.push_back(ref.tgt(a));
    hit[ref.tgt(a)] = 1;
  }
  for (Object x = 0; x < ref.object_count(); ++x)
    if (!hit[x])
      throw Error("anchor not surjective: no arrow from the basepoint to object " +
                  std::to_string(x) + " (groupoid is not transitive)");
  std::vector<Point> point_of(ref.arrow_count(), 0);
  for (std::size_t i = 0; i < arrows.size(); ++i) point_of[arrows[i]] = static_cast<Point>(i);
  auto action = GroupoidAction::build(std::move(g), anchor, [&](Point y, Arrow h) {
    return point_of[ref.compose(arrows[y], h)];
  });
  const Point u0 = point_of[ref.unit(x0)];
  return {std::move(action), x0, u0, std::move(arrows)};
}

// --- orbits and subflows ---------------------------------------------------

/// Orbits y.G1, each sorted, ordered by least element.
inline std::vector<std::vector<Point>> orbits(const GroupoidAction& a) {
  std::vector<Point> parent(a.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Point x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const Groupoid& g = a.groupoid();
  for (Point y = 0; y < a.size(); ++y)
    for (Arrow h : g.outgoing(a.anchor(y))) {
      const Point r1 = find(y), r2 = find(a.apply(y, h));
      if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
    }
  std::map<Point, std::vector<Point>> by_root;
  for (Point y = 0; y < a.size(); ++y) by_root[find(y)].push_back(y);
  std::vector<std::vector<Point>> r;
  for (auto& [root, members] : by_root) r.push_back(std::move(members));
  std::sort(r.begin(), r.end());
  return r;
}

inline bool is_invariant(const GroupoidAction& a, const std::vector<Point>& subset) {
  std::vector<char> in(a.size());
  for (Point y : subset) in[y] = 1;
  for (Point y : subset)
    for (Arrow h : a.groupoid().outgoing(a.anchor(y)))
      if (!in[a.apply(y, h)]) return false;
  return true;
}

struct SubAction {
  GroupoidAction action;
  std::vector<Point> embedding;  // sub point -> ambient point, ascending
};

/// Restriction to an invariant subset.
inline SubAction restrict_action(const GroupoidAction& a, std::vector<Point> subset) {
  std::sort(subset.begin(), subset.end());
  if (!is_invariant(a, subset)) throw Error("subset is not invariant");
  std::vector<Point> local(a.size(), 0);
  std::vector<Object> anchor;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    local[subset[i]] = static_cast<Point>(i);
    anchor.push_back(a.anchor(subset[i]));
  }
  auto sub = GroupoidAction::build(a.groupoid_ptr(), std::move(anchor), [&](Point y, Arrow h) {
    return local[a.apply(subset[y], h)];
  });
  return {std::move(sub), std::move(subset)};
}

/// Minimal nonempty invariant subsets. Arrows are invertible, so every
/// invariant set is a union of orbits and the minimal ones are the orbits.
inline std::vector<SubAction> minimal_subflows(const GroupoidAction& a) {
  std::vector<SubAction> r;
  for (auto& orbit : orbits(a)) r.push_back(restrict_action(a, orbit));
  return r;
}

// --- equivariant maps ------------------------------------------------------

struct EquivariantMap {
  std::vector<Point> image;
  friend bool operator==(const EquivariantMap&, const EquivariantMap&) = default;
  friend auto operator<=>(const EquivariantMap&, const EquivariantMap&) = default;
};

inline Diagnostics verify_equivariant(const GroupoidAction& from, const GroupoidAction& to,
                                      const EquivariantMap& f) {
  if (from.groupoid_ptr() != to.groupoid_ptr())
    return Diagnostics::structural("groupoid", "actions of different groupoids");
  if (f.image.size() != from.size())
    return Diagnostics::structural("shape", "map is not total");
  for (Point y = 0; y < from.size(); ++y) {
    if (f.image[y] >= to.size()) return Diagnostics::structural("range", "image out of range", {y});
    if (to.anchor(f.image[y]) != from.anchor(y))
      return Diagnostics::fail("anchor", "map does not preserve anchors", {y});
  }
  for (Point y = 0; y < from.size(); ++y)
    for (Arrow g : from.groupoid().outgoing(from.anchor(y)))
      if (f.image[from.apply(y, g)] != to.apply(f.image[y], g))
        return Diagnostics::fail("equivariance", "f(y.g) != f(y).g", {y, g});
  return Diagnostics::passed();
}

inline bool is_bijective(const EquivariantMap& f, std::size_t codomain) {
  if (f.image.size() != codomain) return false;
  std::vector<char> hit(codomain);
  for (Point p : f.image)
    if (p >= codomain || hit[p]++) return false;
  return true;
}

/// l_y(w) = y.w for w in the ambit.
inline EquivariantMap universal_map(const GroupoidAction& a, const Ambit& ambit, Point y) {
  if (a.groupoid_ptr() != ambit.action.groupoid_ptr())
    throw Error("action and ambit use different groupoids");
  if (y >= a.size() || a.anchor(y) != ambit.basepoint)
    throw Error("point is not in the fiber over the ambit basepoint");
  EquivariantMap f;
  for (Arrow w : ambit.arrow_of) f.image.push_back(a.apply(y, w));
  if (auto d = verify_equivariant(ambit.action, a, f); !d)
    throw std::logic_error("l_y is not equivariant: " + d.message);
  return f;
}

/// Every equivariant map between two actions, in lexicographic order of the
/// image vectors. Backtracks over orbits: the least unassigned point takes
/// each candidate value in turn and the choice is propagated along its orbit;
/// conflicts prune. Nothing is assumed about how many values are forced.
inline std::vector<EquivariantMap> enumerate_equivariant_maps(const GroupoidAction& from,
                                                              const GroupoidAction& to) {
  if (from.groupoid_ptr() != to.groupoid_ptr()) throw Error("actions of different groupoids");
  constexpr Point unset = ~Point{0};
  std::vector<EquivariantMap> out;
  std::vector<Point> f(from.size(), unset);
  const Groupoid& g = from.groupoid();

  std::function<void()> search = [&] {
    auto it = std::find(f.begin(), f.end(), unset);
    if (it == f.end()) {
      out.push_back({f});
      return;
    }
    const auto root = static_cast<Point>(it - f.begin());
    for (Point c = 0; c < to.size(); ++c) {
      if (to.anchor(c) != from.anchor(root)) continue;
      std::vector<Point> assigned;
      bool ok = true;
      f[root] = c;
      assigned.push_back(root);
      for (std::size_t i = 0; i < assigned.size() && ok; ++i) {
        const Point y = assigned[i];
        for (Arrow h : g.outgoing(from.anchor(y))) {
          const Point yh = from.apply(y, h), v = to.apply(f[y], h);
          if (f[yh] == unset) {
            f[yh] = v;
            assigned.push_back(yh);
          } else if (f[yh] != v) {
            ok = false;
            break;
          }
        }
      }
      if (ok) search();
      for (Point y : assigned) f[y] = unset;
    }
  };
  search();
  std::sort(out.begin(), out.end());
  return out;
}

struct AmbitMaps {
  std::vector<EquivariantMap> maps;       // full enumeration
  std::vector<EquivariantMap> universal;  // l_y for y in the x0-fiber
  bool all_universal = false;             // the two lists coincide
};

inline AmbitMaps ambit_maps(const Ambit& ambit, const GroupoidAction& a) {
  AmbitMaps r;
  r.maps = enumerate_equivariant_maps(ambit.action, a);
  for (Point y : a.fiber(ambit.basepoint)) r.universal.push_back(universal_map(a, ambit, y));
  std::sort(r.universal.begin(), r.universal.end());
  r.all_universal = r.maps == r.universal;
  return r;
}

// --- finite semigroups -----------------------------------------------------

using SemigroupTable = std::vector<std::vector<std::uint32_t>>;

inline bool is_associative(const SemigroupTable& t) {
  const std::size_t n = t.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (t[t[a][b]][c] != t[a][t[b][c]]) return false;
  return true;
}

inline std::vector<std::uint32_t> idempotents(const SemigroupTable& t) {
  std::vector<std::uint32_t> r;
  for (std::uint32_t a = 0; a < t.size(); ++a)
    if (t[a][a] == a) r.push_back(a);
  return r;
}

/// Minimal left ideals. In a finite semigroup each is of the form S a, so
/// these are the inclusion-minimal sets among {S a}.
inline std::vector<std::vector<std::uint32_t>> minimal_left_ideals(const SemigroupTable& t) {
  std::set<std::vector<std::uint32_t>> principal;
  for (std::uint32_t a = 0; a < t.size(); ++a) {
    std::set<std::uint32_t> sa;
    for (std::uint32_t s = 0; s < t.size(); ++s) sa.insert(t[s][a]);
    principal.emplace(sa.begin(), sa.end());
  }
  std::vector<std::vector<std::uint32_t>> r;
  for (const auto& cand : principal) {
    bool minimal = true;
    for (const auto& other : principal)
      if (other != cand && other.size() < cand.size() &&
          std::includes(cand.begin(), cand.end(), other.begin(), other.end())) {
        minimal = false;
        break;
      }
    if (minimal) r.push_back(cand);
  }
  return r;
}

struct FiberSemigroup {
  std::vector<Point> fiber;             // anchor^{-1}(x0), ascending
  SemigroupTable table;                 // y o z = l_y(z), as fiber indices
  bool associative = false;
  bool composition_law = false;         // l_y o l_z = l_{y o z} for all pairs
  Diagnostics group_check;
  std::optional<FiniteGroup> group;
  std::vector<Point> idempotents;
  std::vector<std::vector<Point>> minimal_left_ideals;
};

inline FiberSemigroup fiber_semigroup(const Ambit& ambit) {
  const GroupoidAction& a = ambit.action;
  FiberSemigroup r;
  r.fiber = a.fiber(ambit.basepoint);
  std::vector<std::uint32_t> index(a.size(), 0);
  for (std::size_t i = 0; i < r.fiber.size(); ++i) index[r.fiber[i]] = static_cast<std::uint32_t>(i);

  std::vector<EquivariantMap> l;
  for (Point y : r.fiber) l.push_back(universal_map(a, ambit, y));
  const std::size_t n = r.fiber.size();
  r.table.assign(n, std::vector<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.table[i][j] = index[l[i].image[r.fiber[j]]];

  r.composition_law = true;
  for (std::size_t i = 0; i < n && r.composition_law; ++i)
    for (std::size_t j = 0; j < n && r.composition_law; ++j) {
      const auto& lyz = l[r.table[i][j]];
      for (Point w = 0; w < a.size(); ++w)
        if (l[i].image[l[j].image[w]] != lyz.image[w]) {
          r.composition_law = false;
          break;
        }
    }

  r.associative = is_associative(r.table);
  std::vector<std::vector<Elem>> tbl(r.table.begin(), r.table.end());
  auto check = verify_group(tbl, index[ambit.u0]);
  r.group_check = check.diagnostics;
  r.group = std::move(check.group);
  for (auto e : idempotents(r.table)) r.idempotents.push_back(r.fiber[e]);
  for (auto& ideal : minimal_left_ideals(r.table)) {
    std::vector<Point> pts;
    for (auto e : ideal) pts.push_back(r.fiber[e]);
    r.minimal_left_ideals.push_back(std::move(pts));
  }
  return r;
}

struct MinimalFlowReport {
  std::size_t subflow_count = 0;
  std::vector<std::vector<Point>> subflows;
  // isomorphisms[i][j]: an equivariant bijection subflow i -> subflow j
  std::vector<std::vector<std::optional<EquivariantMap>>> isomorphisms;
  std::vector<std::size_t> self_map_counts;
  bool all_self_maps_bijective = true;
  bool pairwise_isomorphic = true;
};

/// Every pair of minimal subflows is equivariantly isomorphic, and every
/// equivariant self-map of a minimal subflow is bijective.
inline MinimalFlowReport minimal_flow_uniqueness(const Ambit& ambit) {
  MinimalFlowReport r;
  auto subs = minimal_subflows(ambit.action);
  r.subflow_count = subs.size();
  for (const auto& s : subs) r.subflows.push_back(s.embedding);
  r.isomorphisms.assign(subs.size(), std::vector<std::optional<EquivariantMap>>(subs.size()));
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = 0; j < subs.size(); ++j) {
      for (auto& f : enumerate_equivariant_maps(subs[i].action, subs[j].action))
        if (is_bijective(f, subs[j].action.size())) {
          r.isomorphisms[i][j] = f;
          break;
        }
      if (!r.isomorphisms[i][j]) r.pairwise_isomorphic = false;
    }
  for (const auto& s : subs) {
    auto self = enumerate_equivariant_maps(s.action, s.action);
    r.self_map_counts.push_back(self.size());
    for (const auto& f : self)
      if (!is_bijective(f, s.action.size())) r.all_self_maps_bijective = false;
  }
  return r;
}

}  // namespace gpdyn
