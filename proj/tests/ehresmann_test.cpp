#include <gtest/gtest.h>

#include "gpdyn/ehresmann.hpp"
#include "gpdyn/fixtures.hpp"
#include "oracles.hpp"

using namespace gpdyn;
using fixtures::labeled;

namespace {

// Checks arrow-for-arrow that the coordinate groupoid is the literal orbit
// quotient: the arrow named (v, w, a) is the orbit of ((v, a), (w, e)), and
// all structure maps agree with orbit calculus.
void expect_matches_orbit_oracle(const CocycleBundle& b, const std::string& name) {
  const auto bg = groupoid_of_bundle(b);
  const auto og = oracle::orbit_groupoid(b);
  const Groupoid& g = *bg.groupoid;
  const TotalSpace ts = bg.total_space();
  ASSERT_EQ(og.canon.size(), g.arrow_count()) << name;
  std::vector<std::size_t> to_orbit(g.arrow_count());
  std::vector<char> hit(og.canon.size());
  for (Arrow a = 0; a < g.arrow_count(); ++a) {
    const auto c = bg.coords[a];
    to_orbit[a] = og.orbit_of.at({ts.point(c.source, c.twist), ts.point(c.target, 0)});
    ASSERT_FALSE(hit[to_orbit[a]]++) << name << ": two arrows name one orbit";
  }
  for (Arrow a = 0; a < g.arrow_count(); ++a) {
    EXPECT_EQ(g.src(a), og.src(to_orbit[a])) << name;
    EXPECT_EQ(g.tgt(a), og.tgt(to_orbit[a])) << name;
    EXPECT_EQ(to_orbit[g.inv(a)], og.inverse(to_orbit[a])) << name;
    for (Arrow h : g.outgoing(g.tgt(a)))
      ASSERT_EQ(to_orbit[g.compose(a, h)], og.compose(to_orbit[a], to_orbit[h])) << name;
  }
  for (Object x = 0; x < g.object_count(); ++x)
    EXPECT_EQ(to_orbit[g.unit(x)], og.unit(x)) << name;
}

}  // namespace

TEST(GroupoidOfBundle, ArrowCountAndAxioms) {
  auto bg = groupoid_of_bundle(labeled(fixtures::triangle(), "Z2", {0, 0, 1}));
  EXPECT_EQ(bg.groupoid->arrow_count(), 18u);
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto g = groupoid_of_bundle(b);
    const std::size_t m = b.base.vertex_count(), n = b.group.order();
    EXPECT_EQ(g.groupoid->arrow_count(), m * m * n) << name;
    EXPECT_TRUE(verify_groupoid(*g.groupoid).ok()) << name;
    EXPECT_TRUE(is_transitive(*g.groupoid).transitive) << name;
    EXPECT_TRUE(check_local_triviality(*g.groupoid).locally_trivial) << name;
    EXPECT_TRUE(verify_connection(*g.groupoid, g.connection).ok()) << name;
    for (Object x = 0; x < m; ++x)
      for (Object y = 0; y < m; ++y) EXPECT_EQ(g.groupoid->hom(x, y).size(), n);
  }
}

TEST(GroupoidOfBundle, CoordinateComposition) {
  auto bg = groupoid_of_bundle(labeled(fixtures::square(), "S3", {1, 3, 4, 5}));
  const Groupoid& g = *bg.groupoid;
  const auto& grp = bg.group();
  for (Arrow a = 0; a < g.arrow_count(); ++a)
    for (Arrow h : g.outgoing(g.tgt(a))) {
      const auto c = bg.coords[g.compose(a, h)];
      EXPECT_EQ(c.source, bg.coords[a].source);
      EXPECT_EQ(c.target, bg.coords[h].target);
      EXPECT_EQ(c.twist, grp.mul(bg.coords[a].twist, bg.coords[h].twist));
    }
}

TEST(GroupoidOfBundle, ConnectionCoordinates) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto bg = groupoid_of_bundle(b);
    for (Dart d = 0; d < b.base.dart_count(); ++d) {
      const auto c = bg.coords[bg.connection.arrow[d]];
      EXPECT_EQ(c.source, b.base.dsrc(d));
      EXPECT_EQ(c.target, b.base.dtgt(d));
      EXPECT_EQ(c.twist, b.group.inv(b.label[d])) << name;
    }
  }
}

TEST(GroupoidOfBundle, MatchesOrbitOracle) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    const double np = static_cast<double>(b.base.vertex_count() * b.group.order());
    if (np * np > 1e4) continue;
    expect_matches_orbit_oracle(b, name);
  }
  expect_matches_orbit_oracle(labeled(fixtures::point(), "S4", {}), "S4/point");
}

TEST(VertexCharts, PhiExamples) {
  auto bg = groupoid_of_bundle(labeled(fixtures::triangle(), "S3", {1, 3, 5}));
  const TotalSpace ts = bg.total_space();
  const Point u0 = ts.point(0, 0);
  auto phi = vertex_chart_phi(bg, u0);
  EXPECT_EQ(phi.loops.front(), bg.groupoid->unit(0));
  EXPECT_EQ(phi.value.front(), 0u);
  EXPECT_TRUE(verify_vertex_chart(bg, phi).ok());
  for (Elem g = 0; g < 6; ++g) {
    const Arrow loop = bg.orbit_of(ts.raction(u0, g), u0);
    auto it = std::find(phi.loops.begin(), phi.loops.end(), loop);
    ASSERT_NE(it, phi.loops.end());
    EXPECT_EQ(phi.value[it - phi.loops.begin()], g);
  }
  EXPECT_THROW(vertex_chart_phi(bg, 99), Error);
}

TEST(VertexCharts, PsiExamplesAndConsistency) {
  auto bg = groupoid_of_bundle(labeled(fixtures::wedge2(), "Q8", {2, 5}));
  const TotalSpace ts = bg.total_space();
  const auto& grp = bg.group();
  for (Elem h = 0; h < grp.order(); ++h) {
    const Point u0 = ts.point(0, h);
    auto phi = vertex_chart_phi(bg, u0);
    auto psi = vertex_chart_psi(bg, u0);
    EXPECT_EQ(psi.value.front(), 0u);
    for (Elem g = 0; g < grp.order(); ++g) {
      const Arrow loop = bg.orbit_of(u0, ts.raction(u0, g));
      auto i = std::find(psi.loops.begin(), psi.loops.end(), loop) - psi.loops.begin();
      EXPECT_EQ(psi.value[i], grp.inv(g));
    }
    for (std::size_t i = 0; i < psi.loops.size(); ++i) {
      const Arrow inv = bg.groupoid->inv(psi.loops[i]);
      auto j = std::find(phi.loops.begin(), phi.loops.end(), inv) - phi.loops.begin();
      EXPECT_EQ(psi.value[i], grp.inv(phi.value[j]));
    }
  }
}

TEST(VertexCharts, RebasingIsConjugation) {
  auto bg = groupoid_of_bundle(labeled(fixtures::k4(), "D4", {1, 2, 3, 4, 5, 6}));
  const TotalSpace ts = bg.total_space();
  const auto& grp = bg.group();
  const Point u0 = ts.point(2, 3);
  auto phi0 = vertex_chart_phi(bg, u0);
  auto psi0 = vertex_chart_psi(bg, u0);
  for (Elem h = 0; h < grp.order(); ++h) {
    auto phi1 = vertex_chart_phi(bg, ts.raction(u0, h));
    auto psi1 = vertex_chart_psi(bg, ts.raction(u0, h));
    for (std::size_t i = 0; i < phi0.loops.size(); ++i) {
      EXPECT_EQ(phi1.value[i], grp.mul(grp.mul(grp.inv(h), phi0.value[i]), h));
      EXPECT_EQ(psi1.value[i], grp.mul(grp.mul(grp.inv(h), psi0.value[i]), h));
    }
  }
}

TEST(FiberCharts, TauExamples) {
  auto b = labeled(fixtures::triangle(), "Z2", {0, 0, 1});
  auto bg = groupoid_of_bundle(b);
  const TotalSpace ts = bg.total_space();
  const Point u0 = ts.point(0, 0);
  auto tau = fiber_chart_tau(bg, u0);
  EXPECT_EQ(tau.domain.size(), ts.size());
  auto at = std::find(tau.domain.begin(), tau.domain.end(), bg.groupoid->unit(0));
  EXPECT_EQ(tau.image[at - tau.domain.begin()], u0);
  EXPECT_TRUE(verify_fiber_bijection(bg, tau).ok());
  auto psi = vertex_chart_psi(bg, u0);
  const Groupoid& g = *bg.groupoid;
  for (std::size_t i = 0; i < tau.domain.size(); ++i) {
    const Arrow y = tau.domain[i];
    EXPECT_EQ(ts.proj(tau.image[i]), g.src(y));
    for (std::size_t j = 0; j < psi.loops.size(); ++j) {
      const Arrow yg = g.compose(y, psi.loops[j]);
      auto k = std::find(tau.domain.begin(), tau.domain.end(), yg) - tau.domain.begin();
      EXPECT_EQ(tau.image[k], ts.raction(tau.image[i], psi.value[j]));
    }
  }
}

TEST(FiberCharts, SigmaExamples) {
  auto b = labeled(fixtures::triangle(), "Z2", {0, 0, 1});
  auto bg = groupoid_of_bundle(b);
  const TotalSpace ts = bg.total_space();
  const Point u0 = ts.point(0, 0);
  auto sigma = fiber_chart_sigma(bg, u0);
  EXPECT_EQ(sigma.domain.size(), 6u);
  auto at = std::find(sigma.domain.begin(), sigma.domain.end(), bg.groupoid->unit(0));
  EXPECT_EQ(sigma.image[at - sigma.domain.begin()], u0);
  std::vector<Point> sorted = sigma.image;
  std::sort(sorted.begin(), sorted.end());
  for (Point p = 0; p < 6; ++p) EXPECT_EQ(sorted[p], p);
  for (std::size_t i = 0; i < sigma.domain.size(); ++i)
    EXPECT_EQ(ts.proj(sigma.image[i]), bg.groupoid->tgt(sigma.domain[i]));
  // sigma([u0, w]) = w
  for (Point w = 0; w < ts.size(); ++w) {
    auto k = std::find(sigma.domain.begin(), sigma.domain.end(), bg.orbit_of(u0, w));
    EXPECT_EQ(sigma.image[k - sigma.domain.begin()], w);
  }
}

TEST(ChartLaws, HoldOnSuiteAtEveryBasepoint) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto bg = groupoid_of_bundle(b);
    for (Point u0 = 0; u0 < bg.total_space().size(); u0 += 5)
      for (const auto& law : chart_laws(bg, u0)) EXPECT_TRUE(law.result.ok()) << name << " " << law.name;
  }
}

TEST(ChartLaws, DetectBrokenCoordinates) {
  auto bg = groupoid_of_bundle(labeled(fixtures::edge(), "S3", {1}));
  // misname two arrows: charts read coordinates, so some law must fail
  std::swap(bg.coords[3], bg.coords[4]);  // loops at 0 with twists 2 and 3
  bool any_failed = false;
  for (const auto& law : chart_laws(bg, 0)) any_failed |= !law.result.ok();
  EXPECT_TRUE(any_failed);
}

TEST(BundleOfGroupoid, Examples) {
  auto flat = groupoid_of_bundle(labeled(fixtures::triangle(), "Z2", {0, 0, 0}));
  auto rb = bundle_of_groupoid(*flat.groupoid, flat.connection, 0);
  for (Elem l : rb.bundle.label) EXPECT_EQ(l, 0u);

  auto tw = groupoid_of_bundle(labeled(fixtures::triangle(), "Z2", {0, 0, 1}));
  auto rt = bundle_of_groupoid(*tw.groupoid, tw.connection, 0);
  EXPECT_EQ(holonomy_group(rt.bundle).subgroup.size(), 2u);
  EXPECT_TRUE(verify_cocycle(rt.bundle).ok());

  auto grp = preset_group("Q8");
  auto one = bundle_of_groupoid(groupoid_of_group(grp), Connection{BaseGraph(1, {}), {}}, 0);
  EXPECT_EQ(one.bundle.group.order(), 8u);
  EXPECT_EQ(one.bundle.base.vertex_count(), 1u);
  EXPECT_EQ(one.bundle.group, grp);
}

TEST(BundleOfGroupoid, Errors) {
  auto z = groupoid_of_group(preset_group("Z2"));
  EXPECT_THROW(bundle_of_groupoid(disjoint_union(z, z), Connection{BaseGraph(2, {}), {}}, 0),
               Error);
  auto bg = groupoid_of_bundle(labeled(fixtures::edge(), "Z2", {1}));
  Connection bad = bg.connection;
  std::swap(bad.arrow[0], bad.arrow[1]);
  EXPECT_THROW(bundle_of_groupoid(*bg.groupoid, bad, 0), Error);
}

TEST(BundleOfGroupoid, ReferencePointsAndBasepoints) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto bg = groupoid_of_bundle(b);
    for (Object x0 = 0; x0 < b.base.vertex_count(); ++x0) {
      auto rb = bundle_of_groupoid(*bg.groupoid, bg.connection, x0);
      const Groupoid& g = *bg.groupoid;
      EXPECT_EQ(rb.points.size(), b.base.vertex_count() * b.group.order());
      for (Vertex v = 0; v < b.base.vertex_count(); ++v) {
        EXPECT_EQ(g.src(rb.reference[v]), v);
        EXPECT_EQ(g.tgt(rb.reference[v]), x0);
      }
      // the reconstructed bundle is gauge-equivalent to b after relabeling
      auto phi = vertex_chart_phi(bg, bg.total_space().point(x0, 0));
      auto back = relabel_bundle(rb.bundle, b.group, phi.value);
      EXPECT_TRUE(bundles_isomorphic(b, back).has_value()) << name << " x0=" << x0;
    }
  }
}

TEST(Roundtrip, Examples) {
  auto t = roundtrip_bundle(labeled(fixtures::triangle(), "Z2", {0, 0, 0}));
  EXPECT_TRUE(t.witness);
  EXPECT_TRUE(t.trivial_before);
  EXPECT_TRUE(t.trivial_after);
  EXPECT_TRUE(t.tau_check.ok());

  auto tw = roundtrip_bundle(labeled(fixtures::triangle(), "Z2", {0, 0, 1}));
  EXPECT_TRUE(tw.witness);
  EXPECT_FALSE(tw.trivial_before);
  EXPECT_FALSE(tw.trivial_after);
  EXPECT_EQ(tw.holonomy_before.subgroup, (std::vector<Elem>{0, 1}));
  EXPECT_EQ(tw.holonomy_after.subgroup, (std::vector<Elem>{0, 1}));

  auto w = roundtrip_bundle(labeled(fixtures::wedge2(), "Z3", {1, 0}));
  EXPECT_TRUE(w.witness);
  EXPECT_EQ(w.holonomy_before.subgroup, w.holonomy_after.subgroup);
}

TEST(Roundtrip, WholeSuite) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto r = roundtrip_bundle(b);
    EXPECT_TRUE(r.witness) << name;
    EXPECT_EQ(r.trivial_before, r.trivial_after) << name;
    EXPECT_TRUE(r.tau_check.ok()) << name;
    const auto& grp = b.group;
    std::vector<Elem> conj;
    for (Elem x : r.holonomy_before.subgroup) conj.push_back(grp.conj(x, r.witness->conjugator));
    std::sort(conj.begin(), conj.end());
    EXPECT_EQ(conj, r.holonomy_after.subgroup) << name;
  }
}

// Composing connection arrows around each fundamental cycle gives a loop
// whose phi-image generates the bundle's holonomy subgroup.
TEST(Connection, CycleLoopsGenerateHolonomy) {
  for (const auto& [name, b] : fixtures::construction_suite()) {
    auto bg = groupoid_of_bundle(b);
    const Groupoid& g = *bg.groupoid;
    const TotalSpace ts = bg.total_space();
    auto tree = spanning_tree(b.base, 0);
    // path from 0 to v along the tree as arrows
    std::vector<Arrow> to(b.base.vertex_count());
    to[0] = g.unit(0);
    for (std::size_t i = 1; i < tree.order.size(); ++i) {
      const Vertex w = tree.order[i];
      const Dart d = *tree.parent[w];
      to[w] = g.compose(to[b.base.dsrc(d)], bg.connection.arrow[d]);
    }
    auto phi = vertex_chart_phi(bg, ts.point(0, 0));
    std::vector<Elem> gens;
    for (std::size_t e = 0; e < b.base.edge_count(); ++e) {
      if (tree.tree_edge[e]) continue;
      const Dart d = static_cast<Dart>(2 * e);
      const Arrow loop = g.compose(g.compose(to[b.base.dsrc(d)], bg.connection.arrow[d]),
                                   g.inv(to[b.base.dtgt(d)]));
      auto i = std::find(phi.loops.begin(), phi.loops.end(), loop) - phi.loops.begin();
      gens.push_back(phi.value[i]);
    }
    EXPECT_EQ(generated_subgroup(b.group, gens), holonomy_group(b, 0).subgroup) << name;
  }
}

TEST(PointBase, Degenerate) {
  for (auto name : {"Z1", "Z2", "S3", "S4"}) {
    auto r = point_base_degenerate(preset_group(name));
    EXPECT_TRUE(r.iso_check.ok()) << name;
    EXPECT_TRUE(r.product_check.ok()) << name;
    EXPECT_EQ(r.bundle_groupoid.groupoid->arrow_count(), preset_group(name).order());
  }
}
