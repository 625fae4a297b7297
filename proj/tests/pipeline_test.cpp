#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "eif/eif.hpp"
#include "support.hpp"

using namespace eif;
using namespace eif::test;

namespace {

const std::vector<std::string> kPhases{"Troc", "Prep", "Clip", "Det", "Retr", "Hemo", "Clos"};
const std::vector<std::string> kRoles{"main_surgeon", "assistant_surgeon", "nurse", "circulator", "anesthetist"};

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario fixture() { return parse_scenario(read(std::string(EIF_DATA_DIR) + "/or_cholecystectomy.scn")); }

EventGrid or_grid() { return EventGrid(View("workflow", kPhases), View("roles", kRoles)); }

double sum(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

/// 1/2 (1 + s_i - mean(s)): closed form of the raw impact of an ordering.
std::vector<double> ordering_utilities_oracle(const std::vector<int>& ranks) {
  const auto raw = oracle_raw_impact(oracle_ordering(ranks));
  return {raw.begin(), raw.end()};
}

}  // namespace

TEST(DeriveRatingFromOrderings, TrocarAndRetrievalOrderings) {
  const ItemSet roles(kRoles);
  const std::vector<Ordering> os{make_ordering(roles, {1, 4, 2, 5, 3}), make_ordering(roles, {1, 2, 3, 5, 4})};
  const auto table = derive_rating_from_orderings(os);
  ASSERT_EQ(table.size(), 2u);

  // oracle values, frozen: s = {1, .25, .75, 0, .5} and {1, .75, .5, 0, .25}, mean(s) = .5
  const std::vector<double> troc{0.75, 0.375, 0.625, 0.25, 0.5};
  const std::vector<double> retr{0.75, 0.625, 0.5, 0.25, 0.375};
  const auto troc_oracle = ordering_utilities_oracle({1, 4, 2, 5, 3});
  const auto retr_oracle = ordering_utilities_oracle({1, 2, 3, 5, 4});
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(troc_oracle[i], troc[i], 1e-15);
    EXPECT_NEAR(retr_oracle[i], retr[i], 1e-15);
    EXPECT_NEAR(table[0][i], troc[i], 1e-12);
    EXPECT_NEAR(table[1][i], retr[i], 1e-12);
  }
}

TEST(DeriveRatingFromOrderings, IdenticalOrderingsGiveIdenticalRows) {
  const ItemSet roles(kRoles);
  const std::vector<Ordering> os(4, make_ordering(roles, {2, 1, 3, 5, 4}));
  const auto table = derive_rating_from_orderings(os);
  for (const auto& row : table) EXPECT_EQ(row, table.front());
  EXPECT_THROW(derive_rating_from_orderings(std::vector<Ordering>{}), Error);
}

TEST(EventGrid, LabelsAreRowMajorPhaseThenRole) {
  const auto grid = or_grid();
  EXPECT_EQ(grid.size(), 35u);
  EXPECT_EQ(grid.events()[0], "Troc×main_surgeon");
  EXPECT_EQ(grid.events()[1], "Troc×assistant_surgeon");
  EXPECT_EQ(grid.events()[5], "Prep×main_surgeon");
  EXPECT_EQ(grid.index(1, 0), 5u);
  EXPECT_THROW(EventGrid(View("p", {"a"}), View("r", {"x"})), Error);
}

TEST(ExpandMetaComponent, PhaseOnlyComparesPhases) {
  const auto grid = or_grid();
  Rng rng(1);
  ResolvedMetaComponent mc{"w", Target::Phase, random_reciprocal(rng, ItemSet(kPhases)), {}, 1.0};
  const auto m = expand_meta_component(mc, grid);
  const auto prep_nurse = grid.index(1, 2), prep_anest = grid.index(1, 4);
  EXPECT_EQ(m(prep_nurse, prep_anest), 1.0);
  EXPECT_EQ(m(grid.index(0, 0), grid.index(6, 3)), (*mc.ccm)(0, 6));
}

TEST(ExpandMetaComponent, RoleOnlyComparesRoles) {
  const auto grid = or_grid();
  Rng rng(2);
  ResolvedMetaComponent mc{"r", Target::Role, random_reciprocal(rng, ItemSet(kRoles)), {}, 1.0};
  const auto m = expand_meta_component(mc, grid);
  EXPECT_EQ(m(grid.index(0, 0), grid.index(6, 0)), 1.0);
  EXPECT_EQ(m(grid.index(0, 1), grid.index(6, 3)), (*mc.ccm)(1, 3));
}

TEST(ExpandMetaComponent, PhaseRoleUsesUtilityRatios) {
  const EventGrid grid(View("ph", {"A", "B"}), View("ro", {"x", "y"}));
  // utilities 0.75 vs 0.25 -> raw ratio 3; largest raw ratio is 0.75/0.25 too
  ResolvedMetaComponent mc{"pr", Target::PhaseRole, std::nullopt, {{0.75, 0.5}, {0.5, 0.25}}, 1.0};
  const auto m = expand_meta_component(mc, grid);
  EXPECT_NEAR(m(0, 3), 9.0, 1e-12);
  // 0.75/0.5 = 1.5 -> 1.5^(1/log9(3)) = 1.5^2
  EXPECT_NEAR(m(0, 1), 2.25, 1e-12);
  EXPECT_NEAR(m(1, 2), 1.0, 1e-12);

  ResolvedMetaComponent bad{"pr", Target::PhaseRole, std::nullopt, {{0.75, 0.5}}, 1.0};
  EXPECT_THROW(expand_meta_component(bad, grid), Error);
  ResolvedMetaComponent wrong_items{"w", Target::Phase, ReciprocalMatrix::ones(ItemSet({"A", "C"})), {}, 1.0};
  EXPECT_THROW(expand_meta_component(wrong_items, grid), Error);
}

TEST(ExpandMetaComponent, ConsistentPhaseMatrixStaysConsistent) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t p = uniform_size(rng, 2, 6), q = uniform_size(rng, 1, 4);
    std::vector<std::string> ph, ro;
    for (std::size_t i = 0; i < p; ++i) ph.push_back("p" + std::to_string(i));
    for (std::size_t i = 0; i < q; ++i) ro.push_back("r" + std::to_string(i));
    const EventGrid grid(View("ph", ph), View("ro", ro));
    ResolvedMetaComponent mc{"w", Target::Phase, consistent_from_weights(ItemSet(ph), random_weights(rng, p)), {}, 1.0};
    EXPECT_TRUE(expand_meta_component(mc, grid).is_consistent());
  }
}

TEST(ComputeImpactTable, SinglePhaseComponentWithOneRole) {
  Scenario s;
  s.views = {View("workflow", kPhases), View("roles", {"main_surgeon"})};
  s.phase_view = "workflow";
  s.role_view = "roles";
  const auto durations = make_rating(ItemSet(kPhases), {179, 419, 390, 562, 390, 337, 172});
  s.metas = {MetaComponent{"w", Target::Phase, {Ccf{"durations", durations}}, 1.0}};

  const auto table = compute_impact_table(s);
  const auto direct = impact_vector(rating_to_ccm(durations));
  ASSERT_EQ(table.roles().size(), 1u);
  ASSERT_EQ(table.phases().size(), 7u);
  for (std::size_t ph = 0; ph < 7; ++ph) EXPECT_NEAR(table.at(0, ph), direct.normalized[ph], 1e-12);
}

TEST(ComputeImpactTable, OperatingRoomGolden) {
  const auto table = compute_impact_table(fixture());
  ASSERT_EQ(table.roles(), kRoles);
  ASSERT_EQ(table.phases(), kPhases);
  EXPECT_NEAR(sum(table.cells()), 1.0, 1e-9);

  // frozen from the first verified run of data/or_cholecystectomy.scn
  const std::vector<double> golden{
#include "golden/fixture_table.inc"
  };
  ASSERT_EQ(golden.size(), 35u);
  for (std::size_t k = 0; k < 35; ++k) EXPECT_NEAR(table.cells()[k], golden[k], 1e-12) << "cell " << k;

  EXPECT_EQ(table.cell("main_surgeon", "Prep"), table.max_cell());
}

TEST(ComputeImpactTable, Deterministic) {
  const auto s = fixture();
  const auto a = run_pipeline(s);
  const auto b = run_pipeline(s);
  EXPECT_EQ(a.table, b.table);
  EXPECT_EQ(a.collective, b.collective);
}

TEST(ComputeImpactTable, TraineeSwapIsLocal) {
  const auto base_s = fixture();
  const auto swap_s = apply_what_if(base_s, "trainee_swap");
  const auto base = run_pipeline(base_s);
  const auto swap = run_pipeline(swap_s);

  EXPECT_NE(base.table, swap.table);
  EXPECT_NEAR(sum(swap.table.cells()), 1.0, 1e-9);
  ASSERT_EQ(base.metas.size(), 3u);
  EXPECT_EQ(*base.metas[0].ccm, *swap.metas[0].ccm);           // workflow untouched
  EXPECT_EQ(base.metas[2].utilities, swap.metas[2].utilities);  // per-phase orderings untouched
  EXPECT_NE(*base.metas[1].ccm, *swap.metas[1].ccm);

  // the role-importance survey matrix itself is unchanged
  const auto& base_roles = *base_s.find_meta("roles");
  const auto& swap_roles = *swap_s.find_meta("roles");
  EXPECT_EQ(base_roles.ccfs[0], swap_roles.ccfs[0]);
  EXPECT_NE(base_roles.ccfs[1], swap_roles.ccfs[1]);

  // experience now favours the assistant
  EXPECT_GT(swap.table.cell("assistant_surgeon", "Prep"), base.table.cell("assistant_surgeon", "Prep"));
  EXPECT_LT(swap.table.cell("main_surgeon", "Prep"), base.table.cell("main_surgeon", "Prep"));
}

TEST(ComputeImpactTable, RandomScenariosHaveUnitMass) {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = uniform_size(rng, 1, 6), q = uniform_size(rng, 1, 5);
    if (p * q < 2) continue;
    const auto table = compute_impact_table(random_scenario(rng, p, q));
    EXPECT_NEAR(sum(table.cells()), 1.0, 1e-9);
  }
}

TEST(Scenario, ValidationCarriesProvenance) {
  auto s = fixture();
  s.metas[1].ccfs[1].data = make_rating(ItemSet({"a", "b"}), {1, 2});
  try {
    validate_scenario(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ItemSetMismatch);
    EXPECT_NE(std::string(e.what()).find("meta 'roles', ccf 'experience'"), std::string::npos);
  }
  EXPECT_THROW(compute_impact_table(s), Error);
}

TEST(Scenario, StructuralIssues) {
  auto s = fixture();
  s.metas[2].ccfs.pop_back();  // Clos has no ordering any more
  s.operator_name = "owa";
  s.threshold_fraction = 1.5;
  const auto issues = check_scenario(s);
  ASSERT_EQ(issues.size(), 3u);
  EXPECT_EQ(issues[0].error.code(), ErrorCode::UnknownOperator);
  EXPECT_EQ(issues[1].error.code(), ErrorCode::InvalidConfig);
  EXPECT_EQ(issues[2].error.code(), ErrorCode::LengthMismatch);
  EXPECT_EQ(issues[2].meta, "roles_by_phase");
}

TEST(Scenario, WhatIfAndZOverrides) {
  const auto s = fixture();
  EXPECT_THROW(apply_what_if(s, "nope"), Error);
  const auto z2 = with_z(s, 2.0);
  for (const auto& mc : z2.metas) {
    EXPECT_EQ(mc.z, 2.0);
    for (const auto& c : mc.ccfs) EXPECT_EQ(c.config.z, 2.0);
  }
  // with normalization on, z does not move the table
  const auto a = compute_impact_table(s), b = compute_impact_table(z2);
  for (std::size_t k = 0; k < a.cells().size(); ++k) EXPECT_NEAR(a.cells()[k], b.cells()[k], 1e-9);
  EXPECT_THROW(with_z(s, 0.0), Error);
}

// ---- gating -------------------------------------------------------------------

namespace {

/// Main-surgeon row mirroring the reported call-blocking example.
ImpactTable gating_table() {
  const std::vector<double> ms{0.0300, 0.0364, 0.0359, 0.0360, 0.0350, 0.0330, 0.0250};
  std::vector<double> cells = ms;
  const double rest = (1.0 - sum(ms)) / 28.0;
  cells.insert(cells.end(), 28, rest);
  return ImpactTable(kRoles, kPhases, cells);
}

}  // namespace

TEST(GateCall, ReportedThreshold) {
  const auto t = gating_table();
  EXPECT_NEAR(t.max_cell(), 0.0364, 1e-15);
  const auto d = gate_call(t, "main_surgeon", "Prep", 0.98);
  EXPECT_NEAR(d.threshold, 0.0357, 5e-5);
  EXPECT_EQ(d.action, GateAction::Reject);
  EXPECT_EQ(d.eif, 0.0364);
  EXPECT_EQ(gate_call(t, "main_surgeon", "Clip", 0.98).action, GateAction::Reject);
  EXPECT_EQ(gate_call(t, "main_surgeon", "Det", 0.98).action, GateAction::Reject);
  EXPECT_EQ(gate_call(t, "main_surgeon", "Retr", 0.98).action, GateAction::Accept);
  EXPECT_EQ(gate_call(t, "nurse", "Prep", 0.98).action, GateAction::Accept);
}

TEST(GateCall, FullFractionNeverRejects) {
  const auto t = gating_table();
  for (const auto& r : kRoles)
    for (const auto& p : kPhases) EXPECT_EQ(gate_call(t, r, p, 1.0).action, GateAction::Accept);
}

TEST(GateCall, Errors) {
  const auto t = gating_table();
  try {
    gate_call(t, "surgeon", "Prep", 0.98);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownLabel);
    EXPECT_EQ(e.label(), "surgeon");
  }
  EXPECT_THROW(gate_call(t, "nurse", "Closing", 0.98), Error);
  EXPECT_THROW(gate_call(t, "nurse", "Prep", 0.0), Error);
  EXPECT_THROW(gate_call(t, "nurse", "Prep", 1.01), Error);
}

TEST(GateCall, MonotoneInFraction) {
  Rng rng(8);
  const auto t = compute_impact_table(fixture());
  std::uniform_real_distribution<double> f(0.5, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    double a = f(rng), b = f(rng);
    if (a > b) std::swap(a, b);
    for (const auto& r : kRoles)
      for (const auto& p : kPhases)
        if (gate_call(t, r, p, b).action == GateAction::Reject) {
          EXPECT_EQ(gate_call(t, r, p, a).action, GateAction::Reject);
        }
  }
}

TEST(GateCall, FixtureBlocksMainSurgeonInCriticalPhases) {
  const auto t = compute_impact_table(fixture());
  std::vector<std::string> blocked;
  for (const auto& r : kRoles)
    for (const auto& p : kPhases)
      if (gate_call(t, r, p, 0.98).action == GateAction::Reject) blocked.push_back(r + "@" + p);
  EXPECT_EQ(blocked, (std::vector<std::string>{"main_surgeon@Prep", "main_surgeon@Clip", "main_surgeon@Det"}));
}
