#pragma once

// Finite groupoids with an explicit partial composition table.
//
// Composition is written left to right: comp(g, h) is defined exactly when
// tgt(g) == src(h), and then src(gh) = src(g), tgt(gh) = tgt(h).

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "gpdyn/algebra.hpp"
#include "gpdyn/core.hpp"

namespace gpdyn {

// Raw, unchecked groupoid description, as read from a file. comp lists
// (g, h, gh) triples.
struct GroupoidData {
  std::size_t objects = 0;
  std::size_t arrows = 0;
  std::vector<Object> src, tgt;
  std::vector<Arrow> unit, inv;
  std::vector<std::array<Arrow, 3>> comp;
};

/// Shape-correct groupoid structure. Composition is total on composable
/// pairs by construction; whether the axioms hold is decided by
/// verify_groupoid, which every other operation takes as a precondition.
class Groupoid {
 public:
  using ComposeFn = std::function<Arrow(Arrow, Arrow)>;

  // Builds the table by calling compose on every composable pair.
  static Groupoid build(std::size_t objects, std::vector<Object> src, std::vector<Object> tgt,
                        std::vector<Arrow> unit, std::vector<Arrow> inv,
                        const ComposeFn& compose) {
    Groupoid g(objects, std::move(src), std::move(tgt), std::move(unit), std::move(inv));
    for (Arrow a = 0; a < g.arrow_count(); ++a) {
      const auto row = g.outgoing(g.tgt_[a]);
      Arrow* out = g.comp_.data() + g.offset_[a];
      for (std::size_t j = 0; j < row.size(); ++j) out[j] = compose(a, row[j]);
    }
    return g;
  }

  std::size_t object_count() const { return objects_; }
  std::size_t arrow_count() const { return src_.size(); }
  Object src(Arrow g) const { return src_[g]; }
  Object tgt(Arrow g) const { return tgt_[g]; }
  Arrow unit(Object x) const { return unit_[x]; }
  Arrow inv(Arrow g) const { return inv_[g]; }

  bool composable(Arrow g, Arrow h) const { return tgt_[g] == src_[h]; }

  std::optional<Arrow> comp(Arrow g, Arrow h) const {
    if (!composable(g, h)) return std::nullopt;
    return comp_[offset_[g] + pos_[h]];
  }

  // Precondition: composable(g, h).
  Arrow compose(Arrow g, Arrow h) const { return comp_[offset_[g] + pos_[h]]; }

  /// Arrows with source x, ascending.
  std::span<const Arrow> outgoing(Object x) const { return out_[x]; }

  /// Row of products g*h for h ranging over outgoing(tgt(g)).
  std::span<const Arrow> comp_row(Arrow g) const {
    return {comp_.data() + offset_[g], out_[tgt_[g]].size()};
  }

  std::size_t position_in_outgoing(Arrow h) const { return pos_[h]; }

  /// G[x,y], ascending.
  std::vector<Arrow> hom(Object x, Object y) const {
    std::vector<Arrow> r;
    for (Arrow a : out_[x])
      if (tgt_[a] == y) r.push_back(a);
    return r;
  }

  const std::vector<Object>& src_map() const { return src_; }
  const std::vector<Object>& tgt_map() const { return tgt_; }
  const std::vector<Arrow>& unit_map() const { return unit_; }
  const std::vector<Arrow>& inv_map() const { return inv_; }

  // Composition triples in lexicographic order.
  GroupoidData data() const {
    GroupoidData d{objects_, arrow_count(), src_, tgt_, unit_, inv_, {}};
    for (Arrow g = 0; g < arrow_count(); ++g) {
      auto row = out_[tgt_[g]];
      const std::size_t base = d.comp.size();
      for (std::size_t j = 0; j < row.size(); ++j)
        d.comp.push_back({g, row[j], comp_[offset_[g] + j]});
      std::sort(d.comp.begin() + static_cast<std::ptrdiff_t>(base), d.comp.end());
    }
    return d;
  }

  friend bool operator==(const Groupoid& a, const Groupoid& b) {
    return a.objects_ == b.objects_ && a.src_ == b.src_ && a.tgt_ == b.tgt_ &&
           a.unit_ == b.unit_ && a.inv_ == b.inv_ && a.comp_ == b.comp_;
  }

 private:
  friend std::optional<Groupoid> groupoid_layout(const GroupoidData&, Diagnostics&);

  Groupoid(std::size_t objects, std::vector<Object> src, std::vector<Object> tgt,
           std::vector<Arrow> unit, std::vector<Arrow> inv)
      : objects_(objects),
        src_(std::move(src)),
        tgt_(std::move(tgt)),
        unit_(std::move(unit)),
        inv_(std::move(inv)) {
    if (tgt_.size() != src_.size() || inv_.size() != src_.size() || unit_.size() != objects_)
      throw Error("groupoid structure maps have inconsistent lengths");
    out_.resize(objects_);
    pos_.resize(src_.size());
    for (Arrow a = 0; a < src_.size(); ++a) {
      if (src_[a] >= objects_ || tgt_[a] >= objects_ || inv_[a] >= src_.size())
        throw Error("groupoid structure map out of range");
      pos_[a] = static_cast<Arrow>(out_[src_[a]].size());
      out_[src_[a]].push_back(a);
    }
    for (Arrow u : unit_)
      if (u >= src_.size()) throw Error("unit arrow out of range");
    offset_.resize(src_.size());
    std::size_t total = 0;
    for (Arrow a = 0; a < src_.size(); ++a) {
      offset_[a] = total;
      total += out_[tgt_[a]].size();
    }
    comp_.assign(total, 0);
  }

  std::size_t objects_ = 0;
  std::vector<Object> src_, tgt_;
  std::vector<Arrow> unit_, inv_;
  std::vector<std::vector<Arrow>> out_;
  std::vector<Arrow> pos_;
  std::vector<std::size_t> offset_;
  std::vector<Arrow> comp_;
};

// Structural pass over raw data: lengths, ranges, and that comp is defined
// on exactly the composable pairs, once each. Returns the layout on success.
inline std::optional<Groupoid> groupoid_layout(const GroupoidData& d, Diagnostics& diag) {
  using detail::cat;
  using detail::str;
  const std::size_t k = d.arrows;
  if (d.src.size() != k || d.tgt.size() != k || d.inv.size() != k || d.unit.size() != d.objects) {
    diag = Diagnostics::structural("shape", "structure map lengths do not match counts");
    return std::nullopt;
  }
  for (Arrow a = 0; a < k; ++a) {
    if (d.src[a] >= d.objects || d.tgt[a] >= d.objects || d.inv[a] >= k) {
      diag = Diagnostics::structural("range", cat("arrow ", str(a), " has out-of-range data"), {a});
      return std::nullopt;
    }
  }
  for (Object x = 0; x < d.objects; ++x) {
    if (d.unit[x] >= k) {
      diag = Diagnostics::structural("range", cat("unit of object ", str(x), " out of range"), {x});
      return std::nullopt;
    }
  }
  Groupoid g(d.objects, d.src, d.tgt, d.unit, d.inv);
  std::vector<char> set(g.comp_.size());
  for (const auto& [a, b, ab] : d.comp) {
    if (a >= k || b >= k || ab >= k) {
      diag = Diagnostics::structural("range", "comp entry out of range", {a, b, ab});
      return std::nullopt;
    }
    if (d.tgt[a] != d.src[b]) {
      diag = Diagnostics::structural("composability", "composability domain violated", {a, b});
      return std::nullopt;
    }
    const std::size_t slot = g.offset_[a] + g.pos_[b];
    if (set[slot]++) {
      diag = Diagnostics::structural("composability", "duplicate comp entry", {a, b});
      return std::nullopt;
    }
    g.comp_[slot] = ab;
  }
  for (Arrow a = 0; a < k; ++a) {
    auto row = g.out_[d.tgt[a]];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!set[g.offset_[a] + j]) {
        diag = Diagnostics::structural("composability",
                                       cat("comp missing on composable pair (", str(a), ",",
                                           str(row[j]), ")"),
                                       {a, row[j]});
        return std::nullopt;
      }
    }
  }
  diag = Diagnostics::passed();
  return g;
}

/// Axiom check in this order: endpoints of products, unit laws, inverses,
/// associativity over every composable triple.
inline Diagnostics verify_groupoid(const Groupoid& g) {
  using detail::cat;
  using detail::str;
  const std::size_t k = g.arrow_count();
  for (Arrow a = 0; a < k; ++a) {
    auto row = g.outgoing(g.tgt(a));
    auto prod = g.comp_row(a);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (g.src(prod[j]) != g.src(a) || g.tgt(prod[j]) != g.tgt(row[j]))
        return Diagnostics::fail("composability",
                                 cat("product of (", str(a), ",", str(row[j]),
                                     ") has wrong endpoints"),
                                 {a, row[j]});
    }
  }

  std::vector<char> used(k);
  for (Object x = 0; x < g.object_count(); ++x) {
    const Arrow u = g.unit(x);
    if (g.src(u) != x || g.tgt(u) != x)
      return Diagnostics::fail("unit law", cat("unit of object ", str(x), " is not a loop at it"),
                               {u});
    if (used[u]++)
      return Diagnostics::fail("unit law", "unit map is not injective", {u});
  }
  for (Arrow a = 0; a < k; ++a) {
    if (g.compose(g.unit(g.src(a)), a) != a || g.compose(a, g.unit(g.tgt(a))) != a)
      return Diagnostics::fail("unit law", cat("unit law fails at arrow ", str(a)), {a});
  }

  for (Arrow a = 0; a < k; ++a) {
    const Arrow b = g.inv(a);
    if (g.src(b) != g.tgt(a) || g.tgt(b) != g.src(a))
      return Diagnostics::fail("inverse", cat("inverse of ", str(a), " has wrong endpoints"), {a});
    if (g.compose(a, b) != g.unit(g.src(a)) || g.compose(b, a) != g.unit(g.tgt(a)))
      return Diagnostics::fail("inverse", cat("inverse law fails at arrow ", str(a)), {a});
  }

  // (ab)c = a(bc): for fixed (a, b) the rows of ab and b are aligned with
  // outgoing(tgt(b)), so the inner loop is sequential except for one lookup.
  for (Arrow a = 0; a < k; ++a) {
    auto row_a = g.comp_row(a);
    auto mids = g.outgoing(g.tgt(a));
    for (std::size_t j = 0; j < mids.size(); ++j) {
      const Arrow b = mids[j];
      const Arrow ab = row_a[j];
      auto row_ab = g.comp_row(ab);
      auto row_b = g.comp_row(b);
      for (std::size_t i = 0; i < row_b.size(); ++i) {
        if (row_ab[i] != row_a[g.position_in_outgoing(row_b[i])]) {
          const Arrow c = g.outgoing(g.tgt(b))[i];
          return Diagnostics::fail("associativity",
                                   cat("(ab)c != a(bc) for (", str(a), ",", str(b), ",", str(c),
                                       ")"),
                                   {a, b, c});
        }
      }
    }
  }
  return Diagnostics::passed();
}

struct GroupoidCheck {
  Diagnostics diagnostics;
  std::optional<Groupoid> groupoid;  // set iff diagnostics.ok()
};

inline GroupoidCheck verify_groupoid(const GroupoidData& d) {
  Diagnostics diag;
  auto layout = groupoid_layout(d, diag);
  if (!layout) return {diag, std::nullopt};
  diag = verify_groupoid(*layout);
  if (!diag) return {diag, std::nullopt};
  return {diag, std::move(layout)};
}

/// Verified groupoid from raw data; throws with the diagnostic message.
inline Groupoid make_groupoid(const GroupoidData& d) {
  auto check = verify_groupoid(d);
  if (!check.groupoid) throw Error("not a groupoid: " + check.diagnostics.message);
  return *std::move(check.groupoid);
}

// --- constructions --------------------------------------------------------

/// One-object groupoid whose arrows are the elements of grp.
inline Groupoid groupoid_of_group(const FiniteGroup& grp) {
  const std::size_t n = grp.order();
  std::vector<Arrow> inv(n);
  for (Elem a = 0; a < n; ++a) inv[a] = grp.inv(a);
  return Groupoid::build(1, std::vector<Object>(n, 0), std::vector<Object>(n, 0),
                         {grp.identity()}, std::move(inv),
                         [&](Arrow a, Arrow b) { return grp.mul(a, b); });
}

/// Pair groupoid on m objects: arrows (a, b), units first, then the rest in
/// lexicographic order.
inline Groupoid pair_groupoid(std::size_t m) {
  std::vector<std::pair<Object, Object>> pairs;
  for (Object x = 0; x < m; ++x) pairs.emplace_back(x, x);
  for (Object a = 0; a < m; ++a)
    for (Object b = 0; b < m; ++b)
      if (a != b) pairs.emplace_back(a, b);
  auto index = [&](Object a, Object b) -> Arrow {
    if (a == b) return a;
    // rank of (a,b) among off-diagonal pairs
    return static_cast<Arrow>(m + a * (m - 1) + (b < a ? b : b - 1));
  };
  std::vector<Object> src, tgt;
  std::vector<Arrow> unit(m), inv;
  for (auto [a, b] : pairs) {
    src.push_back(a);
    tgt.push_back(b);
    inv.push_back(index(b, a));
  }
  std::iota(unit.begin(), unit.end(), 0);
  return Groupoid::build(m, src, tgt, unit, inv, [&](Arrow g, Arrow h) {
    return index(pairs[g].first, pairs[h].second);
  });
}

/// Objects and arrows of b are shifted past those of a.
inline Groupoid disjoint_union(const Groupoid& a, const Groupoid& b) {
  const auto m = static_cast<Object>(a.object_count());
  const auto k = static_cast<Arrow>(a.arrow_count());
  std::vector<Object> src = a.src_map(), tgt = a.tgt_map();
  std::vector<Arrow> unit = a.unit_map(), inv = a.inv_map();
  for (Arrow g = 0; g < b.arrow_count(); ++g) {
    src.push_back(b.src(g) + m);
    tgt.push_back(b.tgt(g) + m);
    inv.push_back(b.inv(g) + k);
  }
  for (Object x = 0; x < b.object_count(); ++x) unit.push_back(b.unit(x) + k);
  return Groupoid::build(a.object_count() + b.object_count(), src, tgt, unit, inv,
                         [&](Arrow g, Arrow h) -> Arrow {
                           if (g < k) return a.compose(g, h);
                           return b.compose(g - k, h - k) + k;
                         });
}

struct Normalized {
  Groupoid groupoid;
  std::vector<Arrow> new_index;  // old arrow -> new arrow
};

/// Reindexes arrows so that unit(x) = x; the remaining arrows keep their
/// relative order. Precondition: the unit map is injective.
inline Normalized normalize(const Groupoid& g) {
  const std::size_t k = g.arrow_count();
  std::vector<Arrow> new_index(k, static_cast<Arrow>(k));
  for (Object x = 0; x < g.object_count(); ++x) new_index[g.unit(x)] = x;
  Arrow next = static_cast<Arrow>(g.object_count());
  for (Arrow a = 0; a < k; ++a)
    if (new_index[a] == k) new_index[a] = next++;
  std::vector<Arrow> old_index(k);
  for (Arrow a = 0; a < k; ++a) old_index[new_index[a]] = a;
  std::vector<Object> src(k), tgt(k);
  std::vector<Arrow> inv(k), unit(g.object_count());
  for (Arrow a = 0; a < k; ++a) {
    src[new_index[a]] = g.src(a);
    tgt[new_index[a]] = g.tgt(a);
    inv[new_index[a]] = new_index[g.inv(a)];
  }
  std::iota(unit.begin(), unit.end(), 0);
  Groupoid out = Groupoid::build(g.object_count(), src, tgt, unit, inv, [&](Arrow a, Arrow b) {
    return new_index[g.compose(old_index[a], old_index[b])];
  });
  return {std::move(out), std::move(new_index)};
}

// --- structure queries ----------------------------------------------------

struct Transitivity {
  bool transitive = true;
  std::optional<std::pair<Object, Object>> witness;  // pair with empty hom-set
};

/// Connectivity of the object graph by union-find over arrows; the witness
/// is the lexicographically first disconnected pair.
inline Transitivity is_transitive(const Groupoid& g) {
  std::vector<Object> parent(g.object_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<Object(Object)> find = [&](Object x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Arrow a = 0; a < g.arrow_count(); ++a) parent[find(g.src(a))] = find(g.tgt(a));
  for (Object x = 0; x < g.object_count(); ++x)
    for (Object y = 0; y < g.object_count(); ++y)
      if (find(x) != find(y)) return {false, std::pair{x, y}};
  return {};
}

struct HomSet {
  Object source = 0, target = 0;
  std::vector<Arrow> arrows;          // G[x,y]; for loops: unit first, then ascending
  std::optional<FiniteGroup> group;   // only when source == target
};

/// G[x] with its induced Cayley table; element i of the table is arrows[i],
/// and unit(x) is element 0.
inline HomSet vertex_group(const Groupoid& g, Object x) {
  if (x >= g.object_count()) throw Error("object out of range: " + std::to_string(x));
  HomSet h{x, x, {g.unit(x)}, std::nullopt};
  for (Arrow a : g.hom(x, x))
    if (a != g.unit(x)) h.arrows.push_back(a);
  const std::size_t n = h.arrows.size();
  std::vector<Arrow> index(g.arrow_count(), 0);
  for (std::size_t i = 0; i < n; ++i) index[h.arrows[i]] = static_cast<Arrow>(i);
  std::vector<std::vector<Elem>> table(n, std::vector<Elem>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      table[i][j] = index[g.compose(h.arrows[i], h.arrows[j])];
  auto check = verify_group(table, 0);
  if (!check.group) throw Error("vertex group fails group axioms: " + check.diagnostics.message);
  h.group = std::move(check.group);
  return h;
}

inline HomSet hom_set(const Groupoid& g, Object x, Object y) {
  if (x >= g.object_count() || y >= g.object_count()) throw Error("object out of range");
  if (x == y) return vertex_group(g, x);
  return {x, y, g.hom(x, y), std::nullopt};
}

struct VertexGroupIso {
  Arrow connector = 0;        // lowest arrow in G[x,y]
  HomSet from, to;
  std::vector<Elem> map;      // element of G[x] -> element of G[y], as table indices
  Diagnostics check;
};

/// Conjugation g -> a^{-1} g a along the lowest-index a in G[x,y].
inline VertexGroupIso vertex_groups_isomorphic(const Groupoid& g, Object x, Object y) {
  auto arrows = g.hom(x, y);
  if (arrows.empty()) throw Error("no arrow between the objects; groupoid is not transitive");
  VertexGroupIso iso{arrows.front(), vertex_group(g, x), vertex_group(g, y), {}, {}};
  const Arrow a = iso.connector;
  std::vector<Elem> index_y(g.arrow_count(), 0);
  for (std::size_t i = 0; i < iso.to.arrows.size(); ++i)
    index_y[iso.to.arrows[i]] = static_cast<Elem>(i);
  for (Arrow loop : iso.from.arrows)
    iso.map.push_back(index_y[g.compose(g.compose(g.inv(a), loop), a)]);
  iso.check = verify_group_isomorphism(*iso.from.group, *iso.to.group, iso.map);
  return iso;
}

struct LocalTriviality {
  bool locally_trivial = true;
  // sections[x][y]: an arrow x -> y, lowest index
  std::vector<std::vector<Arrow>> sections;
  std::optional<std::pair<Object, Object>> witness;
};

/// For each basepoint x, looks for a section tau of tgt with src(tau(y)) = x.
inline LocalTriviality check_local_triviality(const Groupoid& g) {
  const std::size_t m = g.object_count();
  LocalTriviality r;
  for (Object x = 0; x < m; ++x) {
    std::vector<Arrow> tau(m, static_cast<Arrow>(g.arrow_count()));
    for (Arrow a = 0; a < g.arrow_count(); ++a)
      if (g.src(a) == x && tau[g.tgt(a)] == g.arrow_count()) tau[g.tgt(a)] = a;
    for (Object y = 0; y < m; ++y) {
      if (tau[y] == g.arrow_count()) {
        r.locally_trivial = false;
        r.witness = std::pair{x, y};
        r.sections.clear();
        return r;
      }
    }
    r.sections.push_back(std::move(tau));
  }
  return r;
}

inline Diagnostics verify_groupoid_iso(const Groupoid& a, const Groupoid& b,
                                       std::span<const Object> obj_map,
                                       std::span<const Arrow> arr_map) {
  using detail::cat;
  using detail::str;
  if (obj_map.size() != a.object_count() || arr_map.size() != a.arrow_count() ||
      a.object_count() != b.object_count() || a.arrow_count() != b.arrow_count())
    return Diagnostics::structural("bijection", "maps are not bijections (sizes differ)");
  std::vector<char> hit(b.object_count());
  for (std::size_t x = 0; x < obj_map.size(); ++x)
    if (obj_map[x] >= b.object_count() || hit[obj_map[x]]++)
      return Diagnostics::structural("bijection", "object map is not a bijection", {x});
  hit.assign(b.arrow_count(), 0);
  for (std::size_t g = 0; g < arr_map.size(); ++g)
    if (arr_map[g] >= b.arrow_count() || hit[arr_map[g]]++)
      return Diagnostics::structural("bijection", "arrow map is not a bijection", {g});

  for (Arrow g = 0; g < a.arrow_count(); ++g) {
    if (b.src(arr_map[g]) != obj_map[a.src(g)] || b.tgt(arr_map[g]) != obj_map[a.tgt(g)])
      return Diagnostics::fail("endpoints", cat("src/tgt not preserved at arrow ", str(g)), {g});
    if (arr_map[a.inv(g)] != b.inv(arr_map[g]))
      return Diagnostics::fail("inverse", cat("inverse not preserved at arrow ", str(g)), {g});
  }
  for (Object x = 0; x < a.object_count(); ++x)
    if (arr_map[a.unit(x)] != b.unit(obj_map[x]))
      return Diagnostics::fail("unit", cat("unit not preserved at object ", str(x)), {x});
  for (Arrow g = 0; g < a.arrow_count(); ++g)
    for (Arrow h : a.outgoing(a.tgt(g)))
      if (arr_map[a.compose(g, h)] != b.compose(arr_map[g], arr_map[h]))
        return Diagnostics::fail("comp", cat("comp not preserved at (", str(g), ",", str(h), ")"),
                                 {g, h});
  return Diagnostics::passed();
}

}  // namespace gpdyn
