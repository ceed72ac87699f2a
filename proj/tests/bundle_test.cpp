#include <gtest/gtest.h>

#include <random>

#include "gpdyn/bundle.hpp"
#include "gpdyn/fixtures.hpp"
#include "oracles.hpp"

using namespace gpdyn;
using fixtures::labeled;

namespace {

CocycleBundle random_labels(const BaseGraph& g, const FiniteGroup& grp, std::mt19937& rng) {
  std::vector<Elem> labels;
  for (std::size_t i = 0; i < g.edge_count(); ++i)
    labels.push_back(static_cast<Elem>(rng() % grp.order()));
  return CocycleBundle::from_edge_labels(g, grp, labels);
}

GaugeTransformation random_gauge(const CocycleBundle& b, std::mt19937& rng) {
  GaugeTransformation h;
  for (std::size_t v = 0; v < b.base.vertex_count(); ++v)
    h.at.push_back(static_cast<Elem>(rng() % b.group.order()));
  return h;
}

// Small bundles for exhaustive comparisons: |G|^|V| stays well below 10^6.
std::vector<BaseGraph> small_graphs() {
  return {fixtures::point(),  fixtures::edge(),   fixtures::path3(), fixtures::triangle(),
          fixtures::square(), fixtures::wedge2(), fixtures::k4(),
          BaseGraph(2, {{0, 1}, {0, 1}, {1, 1}})};
}

}  // namespace

TEST(BaseGraph, DartConventions) {
  auto g = fixtures::triangle();
  EXPECT_EQ(g.dart_count(), 6u);
  for (Dart d = 0; d < g.dart_count(); ++d) {
    EXPECT_EQ(BaseGraph::rev(BaseGraph::rev(d)), d);
    EXPECT_NE(BaseGraph::rev(d), d);
    EXPECT_EQ(g.dsrc(BaseGraph::rev(d)), g.dtgt(d));
  }
  EXPECT_EQ(g.dsrc(4), 2u);
  EXPECT_EQ(g.dtgt(4), 0u);
}

TEST(VerifyCocycle, Examples) {
  EXPECT_TRUE(verify_cocycle(labeled(fixtures::triangle(), "Z3", {0, 0, 0})).ok());
  auto b = labeled(fixtures::triangle(), "Z3", {1, 0, 0});
  b.label[1] = 1;  // reverse of dart 0 should carry 2
  auto d = verify_cocycle(b);
  EXPECT_EQ(d.verdict, Verdict::axiom_failure);
  EXPECT_EQ(d.check, "involution");
  EXPECT_EQ(d.witness, std::vector<std::size_t>{0});
  auto split = CocycleBundle{BaseGraph(2, {}), preset_group("Z2"), {}};
  auto c = verify_cocycle(split);
  EXPECT_EQ(c.verdict, Verdict::structural_error);
  EXPECT_EQ(c.message, "base not connected");
  EXPECT_THROW(labeled(fixtures::edge(), "Z2", {2}), Error);
}

TEST(TotalSpace, Examples) {
  auto b = labeled(fixtures::triangle(), "Z2", {0, 0, 1});
  auto ts = total_space(b);
  EXPECT_EQ(ts.size(), 6u);
  EXPECT_TRUE(verify_total_space(ts).ok());
  auto s4 = labeled(fixtures::point(), "S4", {});
  EXPECT_EQ(total_space(s4).size(), 24u);
  EXPECT_TRUE(verify_total_space(total_space(s4)).ok());
  auto e = labeled(fixtures::edge(), "S3", {4});
  auto te = total_space(e);
  EXPECT_EQ(te.transport(0, te.point(0, 0)), te.point(1, 4));
}

TEST(TotalSpace, FreeAndEquivariantOnSuite) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto ts = total_space(b);
    EXPECT_TRUE(verify_total_space(ts).ok()) << name;
    for (Point u = 0; u < ts.size(); ++u)
      for (Elem k = 1; k < b.group.order(); ++k) EXPECT_NE(ts.raction(u, k), u);
  }
}

TEST(GaugeNormalize, Examples) {
  auto flat = labeled(fixtures::square(), "S3", {0, 0, 0, 0});
  auto n = gauge_normalize(flat);
  EXPECT_EQ(n.normalized.label, flat.label);
  EXPECT_EQ(n.gauge.at, std::vector<Elem>(4, 0));

  auto path = labeled(fixtures::path3(), "S3", {3, 5});
  for (Elem l : gauge_normalize(path).normalized.label) EXPECT_EQ(l, 0u);

  auto twisted = labeled(fixtures::triangle(), "Z2", {0, 1, 0});
  auto t = gauge_normalize(twisted);
  // BFS from 0 discovers 1 then 2 via edges 0 and 2; edge 1 closes the cycle
  EXPECT_EQ(t.tree.tree_edge, (std::vector<char>{1, 0, 1}));
  int nontrivial = 0;
  for (std::size_t e = 0; e < 3; ++e) nontrivial += t.normalized.label[2 * e] != 0;
  EXPECT_EQ(nontrivial, 1);
  EXPECT_EQ(t.normalized.label[2], 1u);
}

TEST(GaugeNormalize, IdempotentAndTreeIsIdentity) {
  std::mt19937 rng(3);
  for (const auto& g : small_graphs())
    for (auto name : {"S3", "Q8", "Z4"}) {
      auto b = random_labels(g, preset_group(name), rng);
      auto n = gauge_normalize(b);
      EXPECT_EQ(apply_gauge(b, n.gauge).label, n.normalized.label);
      auto again = gauge_normalize(n.normalized);
      EXPECT_EQ(again.normalized.label, n.normalized.label);
      for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (n.tree.tree_edge[e]) {
          EXPECT_EQ(n.normalized.label[2 * e], 0u);
        }
      EXPECT_TRUE(verify_cocycle(n.normalized).ok());
    }
}

TEST(Holonomy, Examples) {
  EXPECT_EQ(holonomy_group(labeled(fixtures::path3(), "S3", {1, 4})).subgroup,
            std::vector<Elem>{0});
  auto tw = holonomy_group(labeled(fixtures::triangle(), "Z2", {0, 0, 1}));
  EXPECT_EQ(tw.subgroup, (std::vector<Elem>{0, 1}));
  ASSERT_EQ(tw.cycles.size(), 1u);
  EXPECT_EQ(tw.cycles[0].holonomy, 1u);
  auto wedge = holonomy_group(labeled(fixtures::wedge2(), "Z3", {1, 0}));
  EXPECT_EQ(wedge.subgroup, (std::vector<Elem>{0, 1, 2}));
  EXPECT_EQ(wedge.cycles.size(), 2u);
}

TEST(Holonomy, GaugeInvarianceUpToConjugation) {
  std::mt19937 rng(17);
  for (const auto& g : small_graphs())
    for (auto name : {"S3", "D4", "Q8"}) {
      const auto grp = preset_group(name);
      auto b = random_labels(g, grp, rng);
      auto h = random_gauge(b, rng);
      for (Vertex v0 = 0; v0 < g.vertex_count(); ++v0) {
        auto before = holonomy_group(b, v0).subgroup;
        auto after = holonomy_group(apply_gauge(b, h), v0).subgroup;
        std::vector<Elem> conj;
        for (Elem x : before) conj.push_back(grp.mul(grp.mul(h.at[v0], x), grp.inv(h.at[v0])));
        std::sort(conj.begin(), conj.end());
        EXPECT_EQ(conj, after);
      }
    }
}

TEST(Holonomy, TransportAroundCycle) {
  // triangle 0 -> 1 -> 2 -> 0 via darts 0, 2, 4
  auto b = labeled(fixtures::triangle(), "S3", {1, 3, 5});
  auto ts = total_space(b);
  const std::vector<Dart> cycle = {0, 2, 4};
  const Elem hol = path_holonomy(b, cycle);
  EXPECT_EQ(hol, b.group.mul(5, b.group.mul(3, 1)));
  for (Elem h = 0; h < 6; ++h) {
    Point u = ts.point(0, h);
    for (Dart d : cycle) u = ts.transport(d, u);
    EXPECT_EQ(u, ts.point(0, b.group.mul(hol, h)));
  }
}

TEST(IsTrivial, Examples) {
  EXPECT_TRUE(is_trivial(labeled(fixtures::triangle(), "Z2", {0, 0, 0})).trivial);
  auto tw = is_trivial(labeled(fixtures::triangle(), "Z2", {0, 0, 1}));
  EXPECT_FALSE(tw.trivial);
  EXPECT_FALSE(tw.section);
  EXPECT_FALSE(oracle::trivial_by_gauge_search(labeled(fixtures::triangle(), "Z2", {0, 0, 1})));
  EXPECT_TRUE(is_trivial(labeled(fixtures::path3(), "Q8", {3, 6})).trivial);
}

TEST(IsTrivial, AgreesWithGaugeSearchAndEveryBasepoint) {
  std::mt19937 rng(23);
  for (const auto& g : small_graphs())
    for (auto name : {"Z2", "Z3", "S3", "D4"})
      for (int trial = 0; trial < 4; ++trial) {
        auto b = random_labels(g, preset_group(name), rng);
        ASSERT_LE(oracle::gauge_space_size(b), 1e6);
        auto t = is_trivial(b);
        EXPECT_EQ(t.trivial, oracle::trivial_by_gauge_search(b));
        for (Vertex v0 = 0; v0 < g.vertex_count(); ++v0)
          EXPECT_EQ(t.trivial, holonomy_group(b, v0).subgroup == std::vector<Elem>{0});
        if (t.section) {
          auto ts = total_space(b);
          for (Dart d = 0; d < g.dart_count(); ++d)
            EXPECT_EQ(ts.transport(d, (*t.section)[g.dsrc(d)]), (*t.section)[g.dtgt(d)]);
        }
      }
}

TEST(BundlesIsomorphic, Examples) {
  auto tw = labeled(fixtures::triangle(), "Z2", {0, 0, 1});
  auto self = bundles_isomorphic(tw, tw);
  ASSERT_TRUE(self);
  EXPECT_EQ(self->conjugator, 0u);
  EXPECT_FALSE(bundles_isomorphic(tw, labeled(fixtures::triangle(), "Z2", {0, 0, 0})));
  auto loop = BaseGraph(1, {{0, 0}});
  auto iso = bundles_isomorphic(labeled(loop, "S3", {1}), labeled(loop, "S3", {2}));
  ASSERT_TRUE(iso);
  EXPECT_EQ(preset_group("S3").conj(1, iso->conjugator), 2u);
  EXPECT_THROW(bundles_isomorphic(tw, labeled(fixtures::triangle(), "Z3", {0, 0, 1})), Error);
  EXPECT_THROW(bundles_isomorphic(tw, labeled(fixtures::path3(), "Z2", {0, 0})), Error);
}

TEST(BundlesIsomorphic, AgreesWithGaugeSearch) {
  std::mt19937 rng(29);
  for (const auto& g : small_graphs())
    for (auto name : {"Z2", "S3", "Q8"})
      for (int trial = 0; trial < 6; ++trial) {
        const auto grp = preset_group(name);
        auto b1 = random_labels(g, grp, rng);
        // half the time b2 is a gauge transform of b1
        auto b2 = trial % 2 ? apply_gauge(b1, random_gauge(b1, rng)) : random_labels(g, grp, rng);
        if (oracle::gauge_space_size(b1) > 1e6) continue;
        auto found = bundles_isomorphic(b1, b2);
        EXPECT_EQ(found.has_value(), oracle::gauge_search(b1, b2).has_value());
        if (found) {
          EXPECT_EQ(apply_gauge(b1, found->gauge).label, b2.label);
        }
      }
}
