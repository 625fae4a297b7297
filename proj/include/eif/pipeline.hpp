#pragma once

// Operating-room application: phase and role views, meta-components, their
// expansion onto the phase x role event grid, the impact look-up table and
// the call-gating policy.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eif/aggregation.hpp"
#include "eif/error.hpp"
#include "eif/impact.hpp"
#include "eif/preference.hpp"
#include "eif/transforms.hpp"

namespace eif {

/// A named perspective on the domain, e.g. workflow phases or human roles.
/// Unlike ItemSet a view may hold a single element.
class View {
 public:
  View(std::string name, std::vector<std::string> labels)
      : name_(std::move(name)), labels_(std::move(labels)) {
    if (name_.empty()) throw Error(ErrorCode::EmptyLabel, "view name must be non-empty");
    try {
      detail::check_labels(labels_, 1);
    } catch (const Error& e) {
      throw e.with_context("view '" + name_ + "'");
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::optional<std::size_t> index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  /// Throws TooFewItems for single-element views.
  ItemSet item_set() const {
    try {
      return ItemSet(labels_);
    } catch (const Error& e) {
      throw e.with_context("view '" + name_ + "'");
    }
  }

  friend bool operator==(const View&, const View&) = default;

 private:
  std::string name_;
  std::vector<std::string> labels_;
};

/// Which coordinate(s) of an event a meta-component scores.
enum class Target { Phase, Role, PhaseRole };

constexpr std::string_view to_string(Target t) noexcept {
  switch (t) {
    case Target::Phase: return "phase";
    case Target::Role: return "role";
    case Target::PhaseRole: return "phase_role";
  }
  return "";
}

inline std::optional<Target> parse_target(std::string_view s) {
  if (s == "phase") return Target::Phase;
  if (s == "role") return Target::Role;
  if (s == "phase_role") return Target::PhaseRole;
  return std::nullopt;
}

/// A prebuilt matrix (e.g. a survey CCCM) is used as-is.
using CcfData = std::variant<Ordering, Rating, PairwiseComparison, ReciprocalMatrix>;

inline const ItemSet& items_of(const CcfData& data) {
  return std::visit([](const auto& d) -> const ItemSet& { return d.items(); }, data);
}

inline std::string_view kind_of(const CcfData& data) {
  constexpr std::string_view kinds[] = {"ordering", "rating", "pairwise", "matrix"};
  return kinds[data.index()];
}

/// One component characteristic function.
struct Ccf {
  std::string name;
  CcfData data;
  TransformConfig config{};
  /// Phase this entry belongs to; only used by phase_role meta-components.
  std::string phase{};

  friend bool operator==(const Ccf&, const Ccf&) = default;
};

inline ReciprocalMatrix to_ccm(const Ccf& ccf) {
  struct Visitor {
    const TransformConfig& cfg;
    ReciprocalMatrix operator()(const Ordering& o) const { return ordering_to_ccm(o); }
    ReciprocalMatrix operator()(const Rating& r) const { return rating_to_ccm(r, cfg); }
    ReciprocalMatrix operator()(const PairwiseComparison& p) const { return pairwise_to_ccm(p); }
    ReciprocalMatrix operator()(const ReciprocalMatrix& m) const { return m; }
  };
  return std::visit(Visitor{ccf.config}, ccf.data);
}

struct MetaComponent {
  std::string name;
  Target target = Target::Phase;
  std::vector<Ccf> ccfs;
  /// Ratio exponent used when a phase_role look-up table is expanded.
  double z = 1.0;

  friend bool operator==(const MetaComponent&, const MetaComponent&) = default;
};

/// Replaces the CCF named `replacement.name` inside meta-component `meta`.
struct CcfPatch {
  std::string meta;
  Ccf replacement;
  friend bool operator==(const CcfPatch&, const CcfPatch&) = default;
};

struct WhatIf {
  std::string name;
  std::vector<CcfPatch> patches;
  friend bool operator==(const WhatIf&, const WhatIf&) = default;
};

inline constexpr double kDefaultThresholdFraction = 0.98;

struct Scenario {
  std::string name;
  std::vector<View> views;
  std::string phase_view;
  std::string role_view;
  std::vector<MetaComponent> metas;
  std::string operator_name = "geometric_mean";
  std::string impact_normalization = "l1";
  double threshold_fraction = kDefaultThresholdFraction;
  std::vector<WhatIf> what_ifs;

  const View* find_view(std::string_view view_name) const {
    for (const auto& v : views)
      if (v.name() == view_name) return &v;
    return nullptr;
  }
  const MetaComponent* find_meta(std::string_view meta_name) const {
    for (const auto& m : metas)
      if (m.name == meta_name) return &m;
    return nullptr;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Cross product of phases and roles. Event k = phase (k / q), role (k % q).
class EventGrid {
 public:
  EventGrid(View phases, View roles)
      : phases_(std::move(phases)), roles_(std::move(roles)), events_(build(phases_, roles_)) {}

  static std::string event_label(std::string_view phase, std::string_view role) {
    return std::string(phase) + "\xC3\x97" + std::string(role);  // U+00D7
  }

  const View& phases() const noexcept { return phases_; }
  const View& roles() const noexcept { return roles_; }
  const ItemSet& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  std::size_t index(std::size_t phase, std::size_t role) const noexcept {
    return phase * roles_.size() + role;
  }

 private:
  static ItemSet build(const View& phases, const View& roles) {
    std::vector<std::string> labels;
    labels.reserve(phases.size() * roles.size());
    for (const auto& p : phases.labels())
      for (const auto& r : roles.labels()) labels.push_back(event_label(p, r));
    if (labels.size() < 2) {
      throw Error(ErrorCode::TooFewItems, "event grid needs at least 2 events");
    }
    return ItemSet(std::move(labels));
  }

  View phases_;
  View roles_;
  ItemSet events_;
};

/// A meta-component after its CCFs were transformed and aggregated: either a
/// matrix over one view or a phase x role utility table.
struct ResolvedMetaComponent {
  std::string name;
  Target target = Target::Phase;
  std::optional<ReciprocalMatrix> ccm;
  /// utilities[phase][role], phase_role only.
  std::vector<std::vector<double>> utilities;
  double z = 1.0;
};

/// Raw impact of each per-phase role ordering, one row per phase.
inline std::vector<std::vector<double>> derive_rating_from_orderings(
    std::span<const Ordering> per_phase) {
  if (per_phase.empty()) throw Error(ErrorCode::EmptyInput, "no per-phase orderings");
  std::vector<std::vector<double>> table;
  table.reserve(per_phase.size());
  for (const auto& o : per_phase) {
    require_same_items(per_phase.front().items(), o.items());
    table.push_back(raw_impact(ordering_to_ccm(o)));
  }
  return table;
}

/// A CCF-level problem found while checking a scenario.
struct ScenarioIssue {
  std::string meta;
  std::string ccf;  // empty for meta-level issues
  Error error;
};

namespace detail {

inline std::string provenance(std::string_view meta, std::string_view ccf) {
  std::string s = "meta '" + std::string(meta) + "'";
  if (!ccf.empty()) s += ", ccf '" + std::string(ccf) + "'";
  return s;
}

}  // namespace detail

/// Every structural problem of the scenario, without stopping at the first.
inline std::vector<ScenarioIssue> check_scenario(const Scenario& s) {
  std::vector<ScenarioIssue> issues;
  auto scenario_issue = [&](ErrorCode code, std::string msg, std::string label = {}) {
    issues.push_back({"", "", Error(code, std::move(msg), std::move(label))});
  };

  for (std::size_t i = 0; i < s.views.size(); ++i)
    for (std::size_t j = i + 1; j < s.views.size(); ++j)
      if (s.views[i].name() == s.views[j].name())
        scenario_issue(ErrorCode::DuplicateLabel, "duplicate view '" + s.views[i].name() + "'",
                       s.views[i].name());

  const View* phases = s.find_view(s.phase_view);
  const View* roles = s.find_view(s.role_view);
  if (!phases) scenario_issue(ErrorCode::UnknownLabel, "unknown phase view '" + s.phase_view + "'", s.phase_view);
  if (!roles) scenario_issue(ErrorCode::UnknownLabel, "unknown role view '" + s.role_view + "'", s.role_view);
  if (phases && roles && phases == roles)
    scenario_issue(ErrorCode::InvalidScenario, "phase and role views must differ");
  if (phases && roles && phases->size() * roles->size() < 2)
    scenario_issue(ErrorCode::TooFewItems, "event grid needs at least 2 events");
  try {
    make_operator(s.operator_name);
  } catch (const Error& e) {
    issues.push_back({"", "", e});
  }
  if (s.impact_normalization != "l1")
    scenario_issue(ErrorCode::InvalidConfig,
                   "unsupported impact normalization '" + s.impact_normalization + "'");
  if (!(s.threshold_fraction > 0.0 && s.threshold_fraction <= 1.0))
    scenario_issue(ErrorCode::InvalidConfig,
                   "threshold_fraction must lie in (0, 1], got " + std::to_string(s.threshold_fraction));
  if (s.metas.empty()) scenario_issue(ErrorCode::EmptyInput, "scenario has no meta-components");

  for (std::size_t i = 0; i < s.metas.size(); ++i) {
    const auto& mc = s.metas[i];
    auto meta_issue = [&](std::string ccf, Error e) {
      issues.push_back({mc.name, std::move(ccf), std::move(e)});
    };
    for (std::size_t j = 0; j < i; ++j)
      if (s.metas[j].name == mc.name)
        meta_issue("", Error(ErrorCode::DuplicateLabel, "duplicate meta-component name", mc.name));
    if (mc.ccfs.empty()) meta_issue("", Error(ErrorCode::EmptyInput, "meta-component has no CCFs"));
    if (!(mc.z > 0.0)) meta_issue("", Error(ErrorCode::InvalidConfig, "z must be positive"));

    const View* view = mc.target == Target::Phase ? phases : roles;
    if (!view) continue;
    std::optional<ItemSet> expected;
    try {
      expected = view->item_set();
    } catch (const Error& e) {
      meta_issue("", e);
      continue;
    }

    for (std::size_t c = 0; c < mc.ccfs.size(); ++c) {
      const auto& ccf = mc.ccfs[c];
      for (std::size_t d = 0; d < c; ++d)
        if (mc.ccfs[d].name == ccf.name)
          meta_issue(ccf.name, Error(ErrorCode::DuplicateLabel, "duplicate CCF name", ccf.name));
      try {
        validate(ccf.config);
        require_same_items(*expected, items_of(ccf.data));
      } catch (const Error& e) {
        meta_issue(ccf.name, e);
      }
      if (mc.target == Target::PhaseRole) {
        if (!phases || !phases->index_of(ccf.phase))
          meta_issue(ccf.name, Error(ErrorCode::UnknownLabel, "unknown phase '" + ccf.phase + "'", ccf.phase));
      } else if (!ccf.phase.empty()) {
        meta_issue(ccf.name, Error(ErrorCode::InvalidScenario,
                                   "phase= is only meaningful for phase_role targets"));
      }
    }
    if (mc.target == Target::PhaseRole && phases) {
      for (const auto& p : phases->labels()) {
        const bool covered = std::any_of(mc.ccfs.begin(), mc.ccfs.end(),
                                         [&](const Ccf& c) { return c.phase == p; });
        if (!covered)
          meta_issue("", Error(ErrorCode::LengthMismatch, "no CCF for phase '" + p + "'", p));
      }
    }
  }
  return issues;
}

/// Throws the first issue of check_scenario(), with provenance.
inline void validate_scenario(const Scenario& s) {
  auto issues = check_scenario(s);
  if (issues.empty()) return;
  const auto& first = issues.front();
  if (first.meta.empty()) throw first.error;
  throw first.error.with_context(detail::provenance(first.meta, first.ccf));
}

inline EventGrid make_grid(const Scenario& s) {
  const View* phases = s.find_view(s.phase_view);
  const View* roles = s.find_view(s.role_view);
  if (!phases || !roles) throw Error(ErrorCode::UnknownLabel, "phase or role view missing");
  return EventGrid(*phases, *roles);
}

/// Transforms and aggregates the CCFs of one meta-component.
inline ResolvedMetaComponent resolve_meta_component(const MetaComponent& mc, const EventGrid& grid,
                                                    const AggregationOperator& op) {
  ResolvedMetaComponent out{mc.name, mc.target, std::nullopt, {}, mc.z};
  auto ccm_of = [&](const Ccf& ccf) {
    try {
      return to_ccm(ccf);
    } catch (const Error& e) {
      throw e.with_context(detail::provenance(mc.name, ccf.name));
    }
  };

  if (mc.target != Target::PhaseRole) {
    std::vector<ReciprocalMatrix> ccms;
    for (const auto& ccf : mc.ccfs) ccms.push_back(ccm_of(ccf));
    try {
      const auto& view = mc.target == Target::Phase ? grid.phases() : grid.roles();
      if (ccms.empty()) throw Error(ErrorCode::EmptyInput, "no CCFs");
      require_same_items(view.item_set(), ccms.front().items());
      out.ccm = aggregate(ccms, op);
    } catch (const Error& e) {
      throw e.with_context(detail::provenance(mc.name, ""));
    }
    return out;
  }

  const ItemSet roles = grid.roles().item_set();
  for (const auto& phase : grid.phases().labels()) {
    std::vector<ReciprocalMatrix> ccms;
    for (const auto& ccf : mc.ccfs) {
      if (ccf.phase != phase) continue;
      auto m = ccm_of(ccf);
      try {
        require_same_items(roles, m.items());
      } catch (const Error& e) {
        throw e.with_context(detail::provenance(mc.name, ccf.name));
      }
      ccms.push_back(std::move(m));
    }
    if (ccms.empty()) {
      throw Error(ErrorCode::LengthMismatch, "no CCF for phase '" + phase + "'", phase)
          .with_context(detail::provenance(mc.name, ""));
    }
    out.utilities.push_back(raw_impact(aggregate(ccms, op)));
  }
  return out;
}

/// Resamples a resolved meta-component onto the event grid. Phase-only and
/// role-only components compare events through their own coordinate;
/// phase_role components compare utility ratios, range-normalized.
inline ReciprocalMatrix expand_meta_component(const ResolvedMetaComponent& mc,
                                              const EventGrid& grid) {
  const std::size_t p = grid.phases().size();
  const std::size_t q = grid.roles().size();
  const std::size_t n = grid.size();
  std::vector<double> upper;
  upper.reserve(upper_count(n));

  if (mc.target == Target::PhaseRole) {
    if (mc.utilities.size() != p || std::any_of(mc.utilities.begin(), mc.utilities.end(),
                                                [q](const auto& row) { return row.size() != q; })) {
      throw Error(ErrorCode::ItemSetMismatch,
                  "utility table of '" + mc.name + "' does not match the event grid");
    }
    std::vector<double> flat;
    flat.reserve(n);
    for (const auto& row : mc.utilities) flat.insert(flat.end(), row.begin(), row.end());
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) upper.push_back(std::pow(flat[a] / flat[b], mc.z));
    return normalize_reciprocal(grid.events(), std::move(upper));
  }

  if (!mc.ccm) throw Error(ErrorCode::EmptyInput, "meta-component '" + mc.name + "' has no matrix");
  const bool by_phase = mc.target == Target::Phase;
  require_same_items((by_phase ? grid.phases() : grid.roles()).item_set(), mc.ccm->items());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      upper.push_back(by_phase ? (*mc.ccm)(a / q, b / q) : (*mc.ccm)(a % q, b % q));
    }
  }
  return ReciprocalMatrix::from_upper(grid.events(), upper);
}

/// EIFs laid out with one row per role and one column per phase.
class ImpactTable {
 public:
  ImpactTable(std::vector<std::string> roles, std::vector<std::string> phases,
              std::vector<double> cells)
      : roles_(std::move(roles)), phases_(std::move(phases)), cells_(std::move(cells)) {
    if (cells_.size() != roles_.size() * phases_.size())
      throw Error(ErrorCode::LengthMismatch, "impact table cell count does not match its labels");
  }

  /// Reorders a grid impact vector into the role x phase layout.
  static ImpactTable from_impact(const EventGrid& grid, const ImpactVector& v) {
    require_same_items(grid.events(), v.items);
    const std::size_t p = grid.phases().size();
    const std::size_t q = grid.roles().size();
    std::vector<double> cells(p * q);
    for (std::size_t r = 0; r < q; ++r)
      for (std::size_t ph = 0; ph < p; ++ph) cells[r * p + ph] = v.normalized[grid.index(ph, r)];
    return ImpactTable(grid.roles().labels(), grid.phases().labels(), std::move(cells));
  }

  const std::vector<std::string>& roles() const noexcept { return roles_; }
  const std::vector<std::string>& phases() const noexcept { return phases_; }
  const std::vector<double>& cells() const noexcept { return cells_; }
  double at(std::size_t role, std::size_t phase) const { return cells_[role * phases_.size() + phase]; }

  double cell(std::string_view role, std::string_view phase) const {
    return at(role_index(role), phase_index(phase));
  }
  double max_cell() const { return *std::max_element(cells_.begin(), cells_.end()); }

  std::size_t role_index(std::string_view role) const { return find(roles_, role, "role"); }
  std::size_t phase_index(std::string_view phase) const { return find(phases_, phase, "phase"); }

  friend bool operator==(const ImpactTable&, const ImpactTable&) = default;

 private:
  static std::size_t find(const std::vector<std::string>& labels, std::string_view label,
                          std::string_view what) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
      throw Error(ErrorCode::UnknownLabel,
                  "unknown " + std::string(what) + " '" + std::string(label) + "'",
                  std::string(label));
    return static_cast<std::size_t>(it - labels.begin());
  }

  std::vector<std::string> roles_;
  std::vector<std::string> phases_;
  std::vector<double> cells_;
};

enum class GateAction { Accept, Reject };

constexpr std::string_view to_string(GateAction a) noexcept {
  return a == GateAction::Accept ? "accept" : "reject";
}

struct GateDecision {
  std::string role;
  std::string phase;
  double eif = 0.0;
  double threshold = 0.0;
  GateAction action = GateAction::Accept;

  friend bool operator==(const GateDecision&, const GateDecision&) = default;
};

/// Rejects a call when the cell's EIF is strictly above
/// threshold_fraction * (largest cell).
inline GateDecision gate_call(const ImpactTable& table, std::string_view role,
                              std::string_view phase,
                              double threshold_fraction = kDefaultThresholdFraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "threshold_fraction must lie in (0, 1], got " + std::to_string(threshold_fraction));
  }
  const double eif = table.cell(role, phase);
  const double threshold = threshold_fraction * table.max_cell();
  return GateDecision{std::string(role), std::string(phase), eif, threshold,
                      eif > threshold ? GateAction::Reject : GateAction::Accept};
}

/// Every intermediate of one pipeline run.
struct PipelineResult {
  EventGrid grid;
  std::vector<ResolvedMetaComponent> metas;
  std::vector<ReciprocalMatrix> expanded;
  ReciprocalMatrix collective;
  ImpactVector impact;
  ImpactTable table;
};

/// CCF transforms -> per-meta aggregation -> expansion -> collective
/// aggregation -> impact -> table.
inline PipelineResult run_pipeline(const Scenario& s) {
  validate_scenario(s);
  const auto op = make_operator(s.operator_name);
  EventGrid grid = make_grid(s);

  std::vector<ResolvedMetaComponent> metas;
  std::vector<ReciprocalMatrix> expanded;
  for (const auto& mc : s.metas) {
    metas.push_back(resolve_meta_component(mc, grid, *op));
    expanded.push_back(expand_meta_component(metas.back(), grid));
  }
  ReciprocalMatrix collective = aggregate(expanded, *op);
  ImpactVector impact = impact_vector(collective);
  ImpactTable table = ImpactTable::from_impact(grid, impact);
  return PipelineResult{std::move(grid),       std::move(metas),  std::move(expanded),
                        std::move(collective), std::move(impact), std::move(table)};
}

inline ImpactTable compute_impact_table(const Scenario& s) { return run_pipeline(s).table; }

/// Copy of `s` with the named what-if's patches applied.
inline Scenario apply_what_if(const Scenario& s, std::string_view name) {
  auto wi = std::find_if(s.what_ifs.begin(), s.what_ifs.end(),
                         [&](const WhatIf& w) { return w.name == name; });
  if (wi == s.what_ifs.end())
    throw Error(ErrorCode::UnknownLabel, "unknown what-if '" + std::string(name) + "'",
                std::string(name));
  Scenario out = s;
  for (const auto& patch : wi->patches) {
    auto mc = std::find_if(out.metas.begin(), out.metas.end(),
                           [&](const MetaComponent& m) { return m.name == patch.meta; });
    if (mc == out.metas.end())
      throw Error(ErrorCode::UnknownLabel, "what-if '" + wi->name + "' patches unknown meta '" +
                                               patch.meta + "'",
                  patch.meta);
    auto ccf = std::find_if(mc->ccfs.begin(), mc->ccfs.end(),
                            [&](const Ccf& c) { return c.name == patch.replacement.name; });
    if (ccf == mc->ccfs.end())
      throw Error(ErrorCode::UnknownLabel, "what-if '" + wi->name + "' patches unknown ccf '" +
                                               patch.replacement.name + "'",
                  patch.replacement.name);
    *ccf = patch.replacement;
  }
  return out;
}

/// Copy of `s` with every CCF and expansion exponent set to z.
inline Scenario with_z(const Scenario& s, double z) {
  validate(TransformConfig{z, true});
  Scenario out = s;
  for (auto& mc : out.metas) {
    mc.z = z;
    for (auto& ccf : mc.ccfs) ccf.config.z = z;
  }
  return out;
}

}  // namespace eif
