#pragma once

// Command dispatch for the batch tool. Each command turns loaded models into a
// Report: a list of checked properties (each with a tag naming the property),
// a result object answering the question asked, and optionally a model that
// can be fed back into another command.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gpdyn/amenability.hpp"
#include "gpdyn/bundle_actions.hpp"
#include "gpdyn/fixtures.hpp"
#include "gpdyn/io.hpp"

namespace gpdyn::cli {

using io::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Check {
  std::string name;
  std::string tag;
  bool passed = false;
  std::string detail;
  std::vector<std::size_t> witness;
};

struct Report {
  std::string command;
  std::string input_digest;
  std::vector<Check> verdicts;
  json result = json::object();
  json model;  // null unless the command produces one
  std::string note;

  bool all_passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Check& c) { return c.passed; });
  }
  int exit_code() const { return all_passed() ? 0 : 1; }

  json to_json() const {
    json v = json::array();
    for (const auto& c : verdicts)
      v.push_back({{"name", c.name},
                   {"tag", c.tag},
                   {"passed", c.passed},
                   {"detail", c.detail},
                   {"witness", c.witness}});
    json j = {{"command", command},
              {"input_digest", input_digest},
              {"verdicts", v},
              {"result", result},
              {"timings", json::object()}};
    if (!model.is_null()) j["model"] = model;
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

struct Options {
  Object basepoint = 0;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "verify", "groupoidify", "bundleize", "roundtrip", "holonomy", "trivial",
      "orbits", "ambit",       "universal", "sections",  "semigroup", "ea"};
  return names;
}

inline std::string fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string input_digest(const std::vector<io::Model>& models) {
  std::string all;
  for (const auto& m : models) all += m.source.dump() + "\n";
  return fnv1a64(all);
}

namespace detail {

inline Check from_diag(std::string name, std::string tag, const Diagnostics& d) {
  Check c{std::move(name), std::move(tag), d.ok(), "ok", d.witness};
  if (!d.ok()) c.detail = std::string(to_string(d.verdict)) + " in " + d.check + ": " + d.message;
  return c;
}

inline Check boolean(std::string name, std::string tag, bool ok, std::string detail = {},
                     std::vector<std::size_t> witness = {}) {
  if (detail.empty()) detail = ok ? "ok" : "violated";
  return {std::move(name), std::move(tag), ok, std::move(detail), std::move(witness)};
}

// Adds a check and reports whether it passed.
inline bool add(Report& r, Check c) {
  const bool ok = c.passed;
  r.verdicts.push_back(std::move(c));
  return ok;
}

inline std::optional<FiniteGroup> resolve_group(Report& r, const io::GroupModel& m) {
  auto check = io::to_group(m);
  if (!add(r, from_diag("structural group is a group", "group-axioms", check.diagnostics)))
    return std::nullopt;
  return std::move(check.group);
}

inline std::optional<CocycleBundle> resolve_bundle(Report& r, const io::BundleModel& m) {
  auto grp = resolve_group(r, m.group);
  if (!grp) return std::nullopt;
  auto b = CocycleBundle::from_edge_labels(io::to_graph(m.graph), *grp, m.labels);
  if (!add(r, from_diag("cocycle over a connected base", "cocycle", verify_cocycle(b))))
    return std::nullopt;
  return b;
}

inline GroupoidPtr resolve_groupoid(Report& r, const io::GroupoidModel& m) {
  auto check = verify_groupoid(m.data);
  if (!add(r, from_diag("groupoid axioms", "groupoid-axioms", check.diagnostics))) return nullptr;
  return std::make_shared<const Groupoid>(std::move(*check.groupoid));
}

inline std::optional<GroupoidAction> resolve_action(Report& r, const io::ActionModel& m) {
  auto g = resolve_groupoid(r, m.groupoid);
  if (!g) return std::nullopt;
  auto check = verify_action(ActionData{g, m.space, m.anchor, m.act});
  if (!add(r, from_diag("action laws", "action-axioms", check.diagnostics))) return std::nullopt;
  return std::move(check.action);
}

inline void require_basepoint(std::size_t objects, Object x0) {
  if (x0 >= objects)
    throw UsageError("basepoint " + std::to_string(x0) + " out of range (" +
                     std::to_string(objects) + " objects)");
}

inline const io::Model& single(const std::vector<io::Model>& models, const std::string& cmd) {
  if (models.size() != 1)
    throw UsageError(cmd + " expects exactly one input, got " + std::to_string(models.size()));
  return models.front();
}

[[noreturn]] inline void wrong_kind(const std::string& cmd, const io::Model& m) {
  throw UsageError(cmd + " does not accept a model of kind \"" + m.kind + "\"");
}

inline json cycles_json(const Holonomy& h) {
  json c = json::array();
  for (const auto& cy : h.cycles)
    c.push_back({{"edge", cy.edge}, {"dart", cy.dart}, {"holonomy", cy.holonomy}});
  return c;
}

inline json holonomy_json(const Holonomy& h) {
  return {{"basepoint", h.basepoint}, {"subgroup", h.subgroup}, {"cycles", cycles_json(h)}};
}

// h with h^-1 A h = B for sorted subgroups A, B.
inline std::optional<Elem> subgroups_conjugate(const FiniteGroup& g, const std::vector<Elem>& a,
                                               const std::vector<Elem>& b) {
  for (Elem h = 0; h < g.order(); ++h)
    if (conjugate_set(g, a, h) == b) return h;
  return std::nullopt;
}

/// The groupoid acted on by a groupoid-carrying model: G(P) for a bundle,
/// the groupoid itself otherwise.
struct Carrier {
  GroupoidPtr groupoid;
  std::optional<BundleGroupoid> bundle_groupoid;
};

inline std::optional<Carrier> resolve_carrier(Report& r, const io::Model& m, const std::string& cmd) {
  if (auto* b = std::get_if<io::BundleModel>(&m.payload)) {
    auto bundle = resolve_bundle(r, *b);
    if (!bundle) return std::nullopt;
    BundleGroupoid bg = groupoid_of_bundle(*bundle);
    return Carrier{bg.groupoid, std::move(bg)};
  }
  if (auto* g = std::get_if<io::GroupoidModel>(&m.payload)) {
    auto gp = resolve_groupoid(r, *g);
    if (!gp) return std::nullopt;
    auto t = is_transitive(*gp);
    std::vector<std::size_t> w;
    if (t.witness) w = {t.witness->first, t.witness->second};
    if (!add(r, boolean("groupoid is transitive", "transitivity", t.transitive, {}, w)))
      return std::nullopt;
    return Carrier{gp, std::nullopt};
  }
  wrong_kind(cmd, m);
}

// --- commands ---------------------------------------------------------------

inline void cmd_verify(Report& r, const io::Model& m, const Options&) {
  if (auto* g = std::get_if<io::GroupModel>(&m.payload)) {
    auto check = io::to_group(*g);
    add(r, from_diag("group axioms", "group-axioms", check.diagnostics));
    if (check.group)
      r.result = {{"order", check.group->order()}, {"abelian", is_abelian(*check.group)}};
  } else if (auto* gr = std::get_if<io::GraphModel>(&m.payload)) {
    const BaseGraph graph = io::to_graph(*gr);
    add(r, boolean("base graph is connected", "base-graph", graph.connected()));
    r.result = {{"vertices", graph.vertex_count()}, {"edges", graph.edge_count()}};
  } else if (auto* b = std::get_if<io::BundleModel>(&m.payload)) {
    auto bundle = resolve_bundle(r, *b);
    if (!bundle) return;
    const TotalSpace ts = total_space(*bundle);
    add(r, from_diag("free fiber-transitive right action on the total space", "total-space",
                     verify_total_space(ts)));
    r.result = {{"vertices", bundle->base.vertex_count()},
                {"edges", bundle->base.edge_count()},
                {"group_order", bundle->group.order()},
                {"total_space", ts.size()}};
  } else if (auto* gd = std::get_if<io::GroupoidModel>(&m.payload)) {
    auto g = resolve_groupoid(r, *gd);
    if (!g) return;
    auto t = is_transitive(*g);
    auto lt = check_local_triviality(*g);
    r.result = {{"objects", g->object_count()},
                {"arrows", g->arrow_count()},
                {"transitive", t.transitive},
                {"locally_trivial", lt.locally_trivial}};
    if (t.witness) r.result["disconnected_pair"] = {t.witness->first, t.witness->second};
    add(r, boolean("local triviality agrees with transitivity", "local-triviality",
                   lt.locally_trivial == t.transitive));
    if (gd->connection) {
      try {
        add(r, from_diag("connection", "connection",
                         verify_connection(*g, io::to_connection(*g, *gd->connection))));
      } catch (const Error& e) {
        add(r, boolean("connection", "connection", false, e.what()));
      }
    }
  } else if (auto* a = std::get_if<io::ActionModel>(&m.payload)) {
    auto action = resolve_action(r, *a);
    if (!action) return;
    r.result = {{"space", action->size()},
                {"orbits", orbits(*action).size()},
                {"anchor_proper", anchor_is_proper(*action).proper}};
    r.note = anchor_is_proper(*action).note;
  }
}

inline void cmd_groupoidify(Report& r, const io::Model& m, const Options&) {
  auto* b = std::get_if<io::BundleModel>(&m.payload);
  if (!b) wrong_kind(r.command, m);
  auto bundle = resolve_bundle(r, *b);
  if (!bundle) return;
  const BundleGroupoid bg = groupoid_of_bundle(*bundle);
  const Groupoid& g = *bg.groupoid;
  const std::size_t v = bundle->base.vertex_count(), n = bundle->group.order();
  add(r, from_diag("groupoid axioms", "groupoid-axioms", verify_groupoid(g)));
  add(r, boolean("groupoid is transitive", "transitivity", is_transitive(g).transitive));
  add(r, boolean("groupoid is locally trivial", "local-triviality",
                 check_local_triviality(g).locally_trivial));
  add(r, boolean("arrow count is |V|^2 |G|", "arrow-count", g.arrow_count() == v * v * n,
                 std::to_string(g.arrow_count()) + " arrows"));
  add(r, from_diag("connection", "connection", verify_connection(g, bg.connection)));
  r.result = {{"objects", g.object_count()},
              {"arrows", g.arrow_count()},
              {"vertex_group_order", vertex_group(g, 0).arrows.size()}};
  r.model = io::to_json(bg);
}

inline void cmd_bundleize(Report& r, const io::Model& m, const Options& opt) {
  auto* gd = std::get_if<io::GroupoidModel>(&m.payload);
  if (!gd) wrong_kind(r.command, m);
  if (!gd->connection) throw UsageError("bundleize needs a groupoid with a \"connection\" field");
  auto g = resolve_groupoid(r, *gd);
  if (!g) return;
  require_basepoint(g->object_count(), opt.basepoint);
  Connection conn;
  try {
    conn = io::to_connection(*g, *gd->connection);
  } catch (const Error& e) {
    add(r, boolean("connection", "connection", false, e.what()));
    return;
  }
  if (!add(r, from_diag("connection", "connection", verify_connection(*g, conn)))) return;
  auto t = is_transitive(*g);
  std::vector<std::size_t> w;
  if (t.witness) w = {t.witness->first, t.witness->second};
  if (!add(r, boolean("groupoid is transitive", "transitivity", t.transitive, {}, w))) return;

  const ReconstructedBundle rb = bundle_of_groupoid(*g, conn, opt.basepoint);
  CocycleBundle out = rb.bundle;
  // with coordinates and a structural group at hand, label loops through the
  // vertex chart instead of by arrow index
  if (gd->coords && gd->group) {
    auto grp = resolve_group(r, *gd->group);
    if (!grp) return;
    std::map<Arrow, ArrowCoordinate> coord(gd->coords->begin(), gd->coords->end());
    std::vector<Elem> map;
    bool found = true;
    for (Arrow loop : rb.vertex_group.arrows) {
      auto it = coord.find(loop);
      if (it == coord.end() || it->second.source != opt.basepoint ||
          it->second.target != opt.basepoint || it->second.twist >= grp->order()) {
        found = false;
        map.push_back(0);
      } else {
        map.push_back(it->second.twist);
      }
    }
    if (!add(r, boolean("every loop at the basepoint has a coordinate", "vertex-chart", found)))
      return;
    if (!add(r, from_diag("loop coordinates give an isomorphism onto the structural group",
                          "vertex-chart",
                          verify_group_isomorphism(*rb.vertex_group.group, *grp, map))))
      return;
    out = relabel_bundle(rb.bundle, *grp, map);
  }
  add(r, from_diag("reconstructed labels form a cocycle", "cocycle", verify_cocycle(out)));
  r.result = {{"basepoint", opt.basepoint},
              {"vertex_group_order", rb.vertex_group.arrows.size()},
              {"vertex_group_arrows", rb.vertex_group.arrows},
              {"reference_arrows", rb.reference},
              {"points", rb.points}};
  r.model = io::to_json(out);
}

inline void cmd_roundtrip(Report& r, const io::Model& m, const Options& opt) {
  auto* b = std::get_if<io::BundleModel>(&m.payload);
  if (!b) wrong_kind(r.command, m);
  auto bundle = resolve_bundle(r, *b);
  if (!bundle) return;
  require_basepoint(bundle->base.vertex_count(), opt.basepoint);
  const RoundTrip rt = roundtrip_bundle(*bundle, opt.basepoint);
  add(r, boolean("reconstructed bundle is isomorphic to the input", "ehresmann-roundtrip",
                 rt.witness.has_value()));
  add(r, boolean("triviality agrees on both sides", "ehresmann-roundtrip",
                 rt.trivial_before == rt.trivial_after));
  auto h = subgroups_conjugate(bundle->group, rt.holonomy_before.subgroup,
                               rt.holonomy_after.subgroup);
  add(r, boolean("holonomy groups are conjugate", "holonomy-conjugacy", h.has_value()));
  add(r, from_diag("fiber chart is a base-preserving equivariant bijection", "fiber-chart",
                   rt.tau_check));
  r.result = {{"basepoint", opt.basepoint},
              {"trivial", rt.trivial_before},
              {"holonomy_before", holonomy_json(rt.holonomy_before)},
              {"holonomy_after", holonomy_json(rt.holonomy_after)}};
  if (rt.witness)
    r.result["isomorphism"] = {{"conjugator", rt.witness->conjugator},
                               {"gauge", rt.witness->gauge.at}};
}

inline void cmd_holonomy(Report& r, const std::vector<io::Model>& models, const Options& opt) {
  if (models.empty() || models.size() > 2)
    throw UsageError("holonomy expects one or two bundles");
  std::vector<CocycleBundle> bundles;
  for (const auto& m : models) {
    auto* b = std::get_if<io::BundleModel>(&m.payload);
    if (!b) wrong_kind(r.command, m);
    auto bundle = resolve_bundle(r, *b);
    if (!bundle) return;
    require_basepoint(bundle->base.vertex_count(), opt.basepoint);
    bundles.push_back(std::move(*bundle));
  }
  json list = json::array();
  std::vector<Holonomy> hol;
  for (const auto& b : bundles) {
    hol.push_back(holonomy_group(b, opt.basepoint));
    list.push_back(holonomy_json(hol.back()));
  }
  r.result = {{"holonomy", list}};
  if (bundles.size() == 2) {
    if (!(bundles[0].group == bundles[1].group))
      throw UsageError("holonomy comparison needs the same structural group table");
    auto h = subgroups_conjugate(bundles[0].group, hol[0].subgroup, hol[1].subgroup);
    add(r, boolean("holonomy groups are conjugate", "holonomy-conjugacy", h.has_value()));
    if (h) r.result["conjugator"] = *h;
  }
}

inline void cmd_trivial(Report& r, const io::Model& m, const Options&) {
  auto* b = std::get_if<io::BundleModel>(&m.payload);
  if (!b) wrong_kind(r.command, m);
  auto bundle = resolve_bundle(r, *b);
  if (!bundle) return;
  Triviality t;
  try {
    t = is_trivial(*bundle);
  } catch (const std::logic_error& e) {
    add(r, boolean("holonomy and section criteria agree", "triviality-criteria", false, e.what()));
    return;
  }
  add(r, boolean("holonomy and section criteria agree", "triviality-criteria",
                 t.by_holonomy == t.by_section));
  json witness = json::array();
  for (const auto& c : t.holonomy.cycles)
    if (c.holonomy != bundle->group.identity())
      witness.push_back({{"edge", c.edge}, {"dart", c.dart}, {"holonomy", c.holonomy}});
  r.result = {{"trivial", t.trivial},
              {"holonomy", holonomy_json(t.holonomy)},
              {"holonomy_witness", witness},
              {"section", t.section ? json(*t.section) : json(nullptr)}};
  if (t.section) {
    const TotalSpace ts = total_space(*bundle);
    bool invariant = true;
    for (Dart d = 0; d < bundle->base.dart_count(); ++d)
      invariant &= ts.transport(d, (*t.section)[bundle->base.dsrc(d)]) ==
                   (*t.section)[bundle->base.dtgt(d)];
    add(r, boolean("global section is transport invariant", "global-section", invariant));
  }
}

inline std::vector<NamedAction> actions_of(Report& r, const io::Model& m, const Options& opt) {
  if (auto* a = std::get_if<io::ActionModel>(&m.payload)) {
    auto action = resolve_action(r, *a);
    if (!action) return {};
    return {{"input", std::move(*action)}};
  }
  auto carrier = resolve_carrier(r, m, r.command);
  if (!carrier) return {};
  require_basepoint(carrier->groupoid->object_count(), opt.basepoint);
  if (carrier->bundle_groupoid) return standard_actions(*carrier->bundle_groupoid, opt.basepoint, 64);
  return {{"ambit", build_ambit(carrier->groupoid, opt.basepoint).action},
          {"base", base_action(carrier->groupoid)}};
}

inline void cmd_orbits(Report& r, const io::Model& m, const Options& opt) {
  auto actions = actions_of(r, m, opt);
  json list = json::array();
  for (const auto& [name, a] : actions) {
    add(r, from_diag("action laws (" + name + ")", "action-axioms", verify_action(a)));
    const auto orb = orbits(a);
    std::vector<std::vector<Point>> subs;
    for (const auto& s : minimal_subflows(a)) subs.push_back(s.embedding);
    add(r, boolean("minimal subflows are the orbits (" + name + ")", "minimal-subflows",
                   subs == orb));
    list.push_back({{"name", name}, {"points", a.size()}, {"orbits", orb}, {"minimal_subflows", subs}});
  }
  r.result = {{"actions", list}};
}

inline void cmd_ambit(Report& r, const io::Model& m, const Options& opt) {
  auto carrier = resolve_carrier(r, m, r.command);
  if (!carrier) return;
  const Groupoid& g = *carrier->groupoid;
  require_basepoint(g.object_count(), opt.basepoint);
  const Ambit ambit = build_ambit(carrier->groupoid, opt.basepoint);
  const GroupoidAction& a = ambit.action;
  add(r, from_diag("action laws", "action-axioms", verify_action(a)));
  std::vector<std::size_t> fixed;
  for (Point y = 0; y < a.size() && fixed.empty(); ++y)
    for (Arrow h : g.outgoing(a.anchor(y)))
      if (h != g.unit(a.anchor(y)) && a.apply(y, h) == y) {
        fixed = {y, h};
        break;
      }
  add(r, boolean("action is free", "ambit-free", fixed.empty(), {}, fixed));
  add(r, boolean("action has a single orbit", "ambit-orbit", orbits(a).size() == 1));
  const MinimalFlowReport mf = minimal_flow_uniqueness(ambit);
  add(r, boolean("exactly one minimal subflow, equal to the whole ambit", "minimal-flow",
                 mf.subflow_count == 1 && mf.subflows[0].size() == a.size()));
  add(r, boolean("every equivariant self-map of a minimal subflow is bijective", "minimal-flow",
                 mf.all_self_maps_bijective));
  add(r, boolean("minimal subflows are pairwise isomorphic", "minimal-flow", mf.pairwise_isomorphic));
  r.result = {{"basepoint", ambit.basepoint},
              {"u0", ambit.u0},
              {"points", a.size()},
              {"fiber", a.fiber(ambit.basepoint)},
              {"self_map_counts", mf.self_map_counts}};
  r.model = io::to_json(ambit);
  r.note = finite_specialization_note;
}

inline void cmd_universal(Report& r, const io::Model& m, const Options& opt) {
  std::optional<GroupoidAction> target;
  GroupoidPtr g;
  if (auto* a = std::get_if<io::ActionModel>(&m.payload)) {
    target = resolve_action(r, *a);
    if (!target) return;
    g = target->groupoid_ptr();
    auto t = is_transitive(*g);
    if (!add(r, boolean("groupoid is transitive", "transitivity", t.transitive))) return;
  } else {
    auto carrier = resolve_carrier(r, m, r.command);
    if (!carrier) return;
    g = carrier->groupoid;
  }
  require_basepoint(g->object_count(), opt.basepoint);
  const Ambit ambit = build_ambit(g, opt.basepoint);
  const GroupoidAction& a = target ? *target : ambit.action;
  const AmbitMaps maps = ambit_maps(ambit, a);
  json list = json::array();
  bool equivariant = true, sends_u0 = true;
  for (const auto& l : maps.universal) {
    equivariant &= verify_equivariant(ambit.action, a, l).ok();
    list.push_back({{"y", l.image[ambit.u0]}, {"image", l.image}});
  }
  for (Point y : a.fiber(opt.basepoint))
    sends_u0 &= universal_map(a, ambit, y).image[ambit.u0] == y;
  add(r, boolean("each l_y is equivariant", "universal-property", equivariant));
  add(r, boolean("each l_y sends u0 to y", "universal-property", sends_u0));
  add(r, boolean("full enumeration finds exactly the maps l_y", "universal-property",
                 maps.all_universal,
                 std::to_string(maps.maps.size()) + " equivariant maps, " +
                     std::to_string(maps.universal.size()) + " fiber points"));
  r.result = {{"basepoint", opt.basepoint},
              {"u0", ambit.u0},
              {"maps", list},
              {"enumerated", maps.maps.size()}};
}

inline void cmd_sections(Report& r, const io::Model& m, const Options& opt) {
  std::optional<GroupoidAction> action;
  if (auto* a = std::get_if<io::ActionModel>(&m.payload)) {
    action = resolve_action(r, *a);
    if (!action) return;
    auto t = is_transitive(action->groupoid());
    if (!add(r, boolean("groupoid is transitive", "transitivity", t.transitive))) return;
  } else {
    auto carrier = resolve_carrier(r, m, r.command);
    if (!carrier) return;
    require_basepoint(carrier->groupoid->object_count(), opt.basepoint);
    action = build_ambit(carrier->groupoid, opt.basepoint).action;
  }
  require_basepoint(action->groupoid().object_count(), opt.basepoint);
  const auto entry = section_suite_entry("input", "action", *action, opt.basepoint);
  const auto secs = invariant_sections(*action, opt.basepoint);
  json list = json::array();
  bool verified = true;
  for (const auto& s : secs) {
    verified &= verify_invariant_section(*action, s.section).ok();
    list.push_back(io::section_json(s.section));
  }
  add(r, boolean("every section is invariant", "invariant-section", verified));
  add(r, boolean("one section per fixed fiber point", "section-fixed-point",
                 entry.sections == entry.fixed_points,
                 std::to_string(entry.sections) + " sections, " +
                     std::to_string(entry.fixed_points) + " fixed points"));
  add(r, boolean("each section image meets every fiber once", "invariant-section",
                 entry.meets_each_fiber_once));
  r.result = {{"basepoint", opt.basepoint},
              {"sections", list},
              {"fixed_points", entry.fixed_points}};
  r.note = "section counts are reported; uniqueness is not asserted";
}

inline void cmd_semigroup(Report& r, const io::Model& m, const Options& opt) {
  auto carrier = resolve_carrier(r, m, r.command);
  if (!carrier) return;
  require_basepoint(carrier->groupoid->object_count(), opt.basepoint);
  const Ambit ambit = build_ambit(carrier->groupoid, opt.basepoint);
  const FiberSemigroup fs = fiber_semigroup(ambit);
  add(r, boolean("l_y o l_z = l_(y o z) on all fiber pairs", "fiber-semigroup", fs.composition_law));
  add(r, boolean("fiber product is associative", "fiber-semigroup", fs.associative));
  add(r, from_diag("fiber semigroup is a group", "group-axioms", fs.group_check));
  bool iso = false;
  if (fs.group) {
    // fiber point y corresponds to the loop it is the image of
    const HomSet vg = vertex_group(*carrier->groupoid, opt.basepoint);
    std::vector<Elem> map;
    for (Point y : fs.fiber)
      map.push_back(static_cast<Elem>(
          std::find(vg.arrows.begin(), vg.arrows.end(), ambit.arrow_of[y]) - vg.arrows.begin()));
    iso = verify_group_isomorphism(*fs.group, *vg.group, map).ok();
  }
  add(r, boolean("fiber semigroup is isomorphic to the vertex group", "fiber-semigroup", iso));
  add(r, boolean("the only idempotent is u0", "fiber-semigroup",
                 fs.idempotents == std::vector<Point>{ambit.u0}));
  add(r, boolean("one minimal left ideal, the whole fiber", "fiber-semigroup",
                 fs.minimal_left_ideals.size() == 1 && fs.minimal_left_ideals[0] == fs.fiber));
  r.result = {{"basepoint", opt.basepoint},
              {"u0", ambit.u0},
              {"fiber", fs.fiber},
              {"table", fs.table},
              {"idempotents", fs.idempotents},
              {"minimal_left_ideals", fs.minimal_left_ideals}};
}

inline void cmd_ea(Report& r, const io::Model& m, const Options& opt) {
  std::optional<FiniteGroup> grp;
  std::optional<Carrier> carrier;
  if (auto* g = std::get_if<io::GroupModel>(&m.payload)) {
    grp = resolve_group(r, *g);
    if (!grp) return;
  } else if (std::holds_alternative<io::BundleModel>(m.payload)) {
    carrier = resolve_carrier(r, m, r.command);
    if (!carrier) return;
    grp = carrier->bundle_groupoid->group();
  } else {
    wrong_kind(r.command, m);
  }
  const AmenabilityVerdict v = extreme_amenability_check(*grp);
  add(r, from_diag("translation action is a free action", "translation-certificate",
                   v.certificate_check));
  add(r, boolean("certificate has a fixed point only for the trivial group",
                 "translation-certificate", v.fixed.empty() != v.extremely_amenable));
  r.result = {{"extremely_amenable", v.extremely_amenable},
              {"certificate", {{"points", v.certificate.points}, {"table", v.certificate.table}}},
              {"fixed_points", v.fixed}};
  if (carrier) {
    require_basepoint(carrier->groupoid->object_count(), opt.basepoint);
    const Ambit ambit = build_ambit(carrier->groupoid, opt.basepoint);
    const auto n = invariant_sections(ambit.action, opt.basepoint).size();
    add(r, boolean("ambit has an invariant section exactly when the group is trivial",
                   "amenability-sections", (n > 0) == v.extremely_amenable,
                   std::to_string(n) + " invariant sections of the ambit"));
    r.result["ambit_sections"] = n;
  }
}

}  // namespace detail

/// Runs one command. Throws UsageError for bad invocations; checked
/// properties that fail are reported in the verdicts, never thrown.
inline Report run_command(const std::string& name, const std::vector<io::Model>& models,
                          const Options& opt = {}) {
  using namespace detail;
  if (std::find(command_names().begin(), command_names().end(), name) == command_names().end())
    throw UsageError("unknown command \"" + name + "\"");
  Report r;
  r.command = name;
  r.input_digest = input_digest(models);
  if (name == "holonomy") {
    cmd_holonomy(r, models, opt);
    return r;
  }
  const io::Model& m = single(models, name);
  static const std::map<std::string, std::function<void(Report&, const io::Model&, const Options&)>>
      table = {{"verify", cmd_verify},       {"groupoidify", cmd_groupoidify},
               {"bundleize", cmd_bundleize}, {"roundtrip", cmd_roundtrip},
               {"trivial", cmd_trivial},     {"orbits", cmd_orbits},
               {"ambit", cmd_ambit},         {"universal", cmd_universal},
               {"sections", cmd_sections},   {"semigroup", cmd_semigroup},
               {"ea", cmd_ea}};
  table.at(name)(r, m, opt);
  return r;
}

// --- rendering ----------------------------------------------------------------

inline void flatten(const json& j, const std::string& path, std::ostream& out) {
  const bool nested = (j.is_object() && !j.empty()) ||
                      (j.is_array() && std::any_of(j.begin(), j.end(), [](const json& e) {
                         return e.is_object() || (e.is_array() && !e.empty() && e[0].is_object());
                       }));
  if (!nested) {
    out << path << " = " << j.dump() << "\n";
    return;
  }
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path + "." + it.key(), out);
  else
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
}

inline std::string emit_report(const Report& r, const std::string& format) {
  if (format == "json") return r.to_json().dump() + "\n";
  if (format != "text") throw UsageError("unknown format \"" + format + "\"");
  std::ostringstream out;
  out << "command: " << r.command << "\n";
  out << "input digest: " << r.input_digest << "\n";
  for (const auto& c : r.verdicts) {
    out << (c.passed ? "PASS" : "FAIL") << " [" << c.tag << "] " << c.name << ": " << c.detail;
    if (!c.witness.empty()) out << " witness " << json(c.witness).dump();
    out << "\n";
  }
  flatten(r.result, "result", out);
  if (!r.model.is_null()) out << "model = " << r.model.dump() << "\n";
  if (!r.note.empty()) out << "note: " << r.note << "\n";
  out << "timings = {}\n";
  return out.str();
}

// --- built-in corpus ---------------------------------------------------------

struct CorpusEntry {
  std::string fixture;
  std::string command;
  Report report;
};

/// Every command over every corpus fixture; bundleize is fed the model that
/// groupoidify produced for the same fixture.
inline std::vector<CorpusEntry> run_corpus(const std::vector<std::string>& commands = command_names()) {
  std::vector<CorpusEntry> out;
  for (const auto& [name, bundle] : fixtures::corpus()) {
    const io::Model m = io::parse_model(io::to_json(bundle));
    std::optional<io::Model> groupoid;
    for (const auto& cmd : commands) {
      if (cmd == "bundleize") {
        if (!groupoid) groupoid = io::parse_model(run_command("groupoidify", {m}).to_json());
        out.push_back({name, cmd, run_command(cmd, {*groupoid})});
      } else {
        out.push_back({name, cmd, run_command(cmd, {m})});
      }
    }
  }
  return out;
}

inline json corpus_json(const std::vector<CorpusEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries)
    out.push_back({{"fixture", e.fixture},
                   {"command", e.command},
                   {"exit", e.report.exit_code()},
                   {"report", e.report.to_json()}});
  return out;
}

}  // namespace gpdyn::cli
