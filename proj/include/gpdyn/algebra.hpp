#pragma once

// Finite groups given extensionally by Cayley tables.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gpdyn/core.hpp"

namespace gpdyn {

class FiniteGroup;

struct GroupCheck;

GroupCheck verify_group(const std::vector<std::vector<Elem>>& table, Elem identity);

/// A finite group on the elements 0..order-1. Instances only come out of
/// verify_group, so every FiniteGroup satisfies the group axioms.
class FiniteGroup {
 public:
  std::size_t order() const { return order_; }
  Elem identity() const { return identity_; }
  Elem mul(Elem a, Elem b) const { return mult_[a * order_ + b]; }
  Elem inv(Elem a) const { return inv_[a]; }

  // h^{-1} a h
  Elem conj(Elem a, Elem h) const { return mul(mul(inv(h), a), h); }

  bool contains(Elem a) const { return a < order_; }

  std::vector<std::vector<Elem>> table() const {
    std::vector<std::vector<Elem>> rows(order_);
    for (std::size_t a = 0; a < order_; ++a)
      rows[a].assign(mult_.begin() + a * order_, mult_.begin() + (a + 1) * order_);
    return rows;
  }

  friend bool operator==(const FiniteGroup& x, const FiniteGroup& y) {
    return x.identity_ == y.identity_ && x.mult_ == y.mult_;
  }

 private:
  friend GroupCheck verify_group(const std::vector<std::vector<Elem>>&, Elem);

  FiniteGroup(std::size_t order, Elem identity, std::vector<Elem> mult,
              std::vector<Elem> inv)
      : order_(order), identity_(identity), mult_(std::move(mult)), inv_(std::move(inv)) {}

  std::size_t order_ = 0;
  Elem identity_ = 0;
  std::vector<Elem> mult_;  // row-major order x order
  std::vector<Elem> inv_;
};

struct GroupCheck {
  Diagnostics diagnostics;
  std::optional<FiniteGroup> group;  // set iff diagnostics.ok()
};

// Checks, in order: shape and range (structural), identity laws, that every
// row then every column is a permutation, associativity over all triples,
// and two-sided inverses.
inline GroupCheck verify_group(const std::vector<std::vector<Elem>>& table, Elem identity) {
  using detail::cat;
  using detail::str;
  const std::size_t n = table.size();
  if (n == 0) return {Diagnostics::structural("shape", "empty table"), std::nullopt};
  for (std::size_t r = 0; r < n; ++r) {
    if (table[r].size() != n)
      return {Diagnostics::structural("shape", cat("table is not square at row ", str(r)), {r}),
              std::nullopt};
  }
  if (identity >= n)
    return {Diagnostics::structural("range", "identity out of range", {identity}), std::nullopt};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (table[r][c] >= n)
        return {Diagnostics::structural(
                    "range", cat("entry (", str(r), ",", str(c), ") out of range"), {r, c}),
                std::nullopt};

  for (std::size_t a = 0; a < n; ++a) {
    if (table[identity][a] != a || table[a][identity] != a)
      return {Diagnostics::fail("identity", cat("identity law fails at ", str(a)), {a}),
              std::nullopt};
  }

  std::vector<char> seen(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t c = 0; c < n; ++c) {
      if (seen[table[r][c]]++)
        return {Diagnostics::fail("latin", cat("row ", str(r), " not a permutation"), {r}),
                std::nullopt};
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      if (seen[table[r][c]]++)
        return {Diagnostics::fail("latin", cat("column ", str(c), " not a permutation"), {c}),
                std::nullopt};
    }
  }

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Elem ab = table[a][b];
      for (std::size_t c = 0; c < n; ++c) {
        if (table[ab][c] != table[a][table[b][c]])
          return {Diagnostics::fail("associativity",
                                    cat("(ab)c != a(bc) for (", str(a), ",", str(b), ",",
                                        str(c), ")"),
                                    {a, b, c}),
                  std::nullopt};
      }
    }

  std::vector<Elem> inv(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto it = std::find(table[a].begin(), table[a].end(), identity);
    const Elem b = static_cast<Elem>(it - table[a].begin());
    if (table[b][a] != identity)
      return {Diagnostics::fail("inverse", cat("no two-sided inverse for ", str(a)), {a}),
              std::nullopt};
    inv[a] = b;
  }

  std::vector<Elem> flat;
  flat.reserve(n * n);
  for (const auto& row : table) flat.insert(flat.end(), row.begin(), row.end());
  return {Diagnostics::passed(), FiniteGroup(n, identity, std::move(flat), std::move(inv))};
}

inline FiniteGroup make_group(const std::vector<std::vector<Elem>>& table, Elem identity = 0) {
  auto check = verify_group(table, identity);
  if (!check.group) throw Error("not a group: " + check.diagnostics.message);
  return *std::move(check.group);
}

namespace detail {

using Perm = std::vector<Elem>;

// Product "p then q": (p*q)(i) = q(p(i)).
inline Perm then(const Perm& p, const Perm& q) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
  return r;
}

// Cayley table of a closed list of permutations; index order is list order.
inline FiniteGroup group_of_permutations(const std::vector<Perm>& elems) {
  std::map<Perm, Elem> index;
  for (std::size_t i = 0; i < elems.size(); ++i) index.emplace(elems[i], static_cast<Elem>(i));
  std::vector<std::vector<Elem>> table(elems.size(), std::vector<Elem>(elems.size()));
  for (std::size_t a = 0; a < elems.size(); ++a)
    for (std::size_t b = 0; b < elems.size(); ++b)
      table[a][b] = index.at(then(elems[a], elems[b]));
  return make_group(table, 0);
}

inline FiniteGroup symmetric_group(std::size_t k) {
  Perm p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = static_cast<Elem>(i);
  std::vector<Perm> elems;
  do elems.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return group_of_permutations(elems);
}

}  // namespace detail

inline FiniteGroup cyclic_group(std::size_t n) {
  if (n == 0) throw Error("cyclic group of order 0");
  std::vector<std::vector<Elem>> table(n, std::vector<Elem>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a][b] = static_cast<Elem>((a + b) % n);
  return make_group(table, 0);
}

inline constexpr std::array<std::string_view, 9> preset_names = {
    "Z1", "Z2", "Z3", "Z4", "Z6", "S3", "D4", "Q8", "S4"};

// Element orders of the presets (element 0 is always the identity):
//   Zn  residues 0..n-1 under addition.
//   S3, S4  permutations of {0..k-1} in lexicographic order, multiplied as
//           "left factor first": (ab)(i) = b(a(i)).
//   D4  r^i s^j at index i + 4j, r = rotation of the square, s = reflection
//       fixing vertex 0, same multiplication convention as Sk.
//   Q8  1, -1, i, -i, j, -j, k, -k.
inline FiniteGroup preset_group(std::string_view name) {
  using detail::Perm;
  if (name == "Z1") return cyclic_group(1);
  if (name == "Z2") return cyclic_group(2);
  if (name == "Z3") return cyclic_group(3);
  if (name == "Z4") return cyclic_group(4);
  if (name == "Z6") return cyclic_group(6);
  if (name == "S3") return detail::symmetric_group(3);
  if (name == "S4") return detail::symmetric_group(4);
  if (name == "D4") {
    const Perm id{0, 1, 2, 3}, r{1, 2, 3, 0}, s{0, 3, 2, 1};
    std::vector<Perm> elems;
    for (int j = 0; j < 2; ++j) {
      Perm rot = id;
      for (int i = 0; i < 4; ++i) {
        elems.push_back(j == 0 ? rot : detail::then(rot, s));
        rot = detail::then(rot, r);
      }
    }
    return detail::group_of_permutations(elems);
  }
  if (name == "Q8") {
    // unit u in {1,i,j,k} = {0,1,2,3}; element = 2u + (negative ? 1 : 0)
    static constexpr int unit_prod[4][4] = {
        {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static constexpr int unit_sign[4][4] = {
        {1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    std::vector<std::vector<Elem>> table(8, std::vector<Elem>(8));
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        const int ua = a / 2, ub = b / 2;
        int sign = unit_sign[ua][ub] * ((a % 2) ? -1 : 1) * ((b % 2) ? -1 : 1);
        table[a][b] = static_cast<Elem>(2 * unit_prod[ua][ub] + (sign < 0 ? 1 : 0));
      }
    return make_group(table, 0);
  }
  throw Error("unknown preset group '" + std::string(name) + "'");
}

/// Smallest subgroup containing gens, as a sorted element list.
inline std::vector<Elem> generated_subgroup(const FiniteGroup& g, std::span<const Elem> gens) {
  std::vector<char> in(g.order());
  std::vector<Elem> members{g.identity()};
  in[g.identity()] = 1;
  for (Elem x : gens) {
    if (!g.contains(x)) throw Error("generator index out of range: " + std::to_string(x));
    if (!in[x]) {
      in[x] = 1;
      members.push_back(x);
    }
  }
  // Fixpoint: close under products and inverses.
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Elem a = members[i];
    const Elem ai = g.inv(a);
    if (!in[ai]) {
      in[ai] = 1;
      members.push_back(ai);
    }
    for (std::size_t j = 0; j <= i; ++j) {
      for (Elem p : {g.mul(a, members[j]), g.mul(members[j], a)}) {
        if (!in[p]) {
          in[p] = 1;
          members.push_back(p);
        }
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

inline std::vector<Elem> conjugate_set(const FiniteGroup& g, std::span<const Elem> set, Elem h) {
  std::vector<Elem> out;
  out.reserve(set.size());
  for (Elem a : set) out.push_back(g.conj(a, h));
  std::sort(out.begin(), out.end());
  return out;
}

/// Lowest-index h with h^{-1} f1[i] h = f2[i] for every i, if any.
inline std::optional<Elem> are_conjugate_subgroup_maps(const FiniteGroup& g,
                                                       std::span<const Elem> f1,
                                                       std::span<const Elem> f2) {
  if (f1.size() != f2.size()) throw Error("holonomy lists differ in length");
  for (std::size_t i = 0; i < f1.size(); ++i)
    if (!g.contains(f1[i]) || !g.contains(f2[i])) throw Error("element index out of range");
  for (Elem h = 0; h < g.order(); ++h) {
    bool all = true;
    for (std::size_t i = 0; i < f1.size() && all; ++i) all = g.conj(f1[i], h) == f2[i];
    if (all) return h;
  }
  return std::nullopt;
}

// map[a] is the image of a; checks bijectivity and map(ab) = map(a)map(b).
inline Diagnostics verify_group_isomorphism(const FiniteGroup& from, const FiniteGroup& to,
                                            std::span<const Elem> map) {
  using detail::str;
  if (map.size() != from.order() || from.order() != to.order())
    return Diagnostics::structural("bijection", "orders differ");
  std::vector<char> hit(to.order());
  for (std::size_t a = 0; a < map.size(); ++a) {
    if (map[a] >= to.order() || hit[map[a]]++)
      return Diagnostics::structural("bijection", "map is not a bijection", {a});
  }
  for (Elem a = 0; a < from.order(); ++a)
    for (Elem b = 0; b < from.order(); ++b)
      if (map[from.mul(a, b)] != to.mul(map[a], map[b]))
        return Diagnostics::fail("homomorphism",
                                 detail::cat("not multiplicative at (", str(a), ",", str(b), ")"),
                                 {a, b});
  return Diagnostics::passed();
}

inline bool is_abelian(const FiniteGroup& g) {
  for (Elem a = 0; a < g.order(); ++a)
    for (Elem b = 0; b < g.order(); ++b)
      if (g.mul(a, b) != g.mul(b, a)) return false;
  return true;
}

}  // namespace gpdyn
