#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eif/eif.hpp"

namespace eif::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kUsageError = 2 };

struct Options {
  std::string scenario_path;
  std::string format = "text";
  std::string output_path;
  std::string what_if;
  std::optional<double> z;
  std::optional<double> fraction;
  std::vector<std::string> ccfs;
  bool collective = false;
  std::vector<std::string> roles;
  std::vector<std::string> phases;
};

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parsed scenario with what-if and z overrides applied.
inline Scenario load(const Options& o) {
  Scenario s = parse_scenario(read_file(o.scenario_path));
  if (!o.what_if.empty()) s = apply_what_if(s, o.what_if);
  if (o.z) s = with_z(s, *o.z);
  if (o.fraction) s.threshold_fraction = *o.fraction;
  return s;
}

template <typename T>
std::string render(const T& value, const Provenance& p, const std::string& format) {
  if (format == "json") return to_json(value, p).dump(2) + "\n";
  if (format == "csv") return to_csv(value);
  return to_text(value);
}

inline std::vector<NamedMatrix> transformed(const Scenario& s, const std::vector<std::string>& wanted) {
  std::vector<NamedMatrix> out;
  for (const auto& mc : s.metas) {
    for (const auto& ccf : mc.ccfs) {
      const std::string full = mc.name + "." + ccf.name;
      if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), full) == wanted.end() &&
          std::find(wanted.begin(), wanted.end(), ccf.name) == wanted.end())
        continue;
      try {
        out.push_back({full, to_ccm(ccf)});
      } catch (const Error& e) {
        throw e.with_context(eif::detail::provenance(mc.name, ccf.name));
      }
    }
  }
  if (!wanted.empty() && out.empty()) throw Error(ErrorCode::UnknownLabel, "no CCF matches the --ccf filter");
  return out;
}

/// Per-meta collective matrices; phase_role components yield one per phase.
inline std::vector<NamedMatrix> aggregated(const Scenario& s, bool with_collective) {
  validate_scenario(s);
  const auto op = make_operator(s.operator_name);
  const EventGrid grid = make_grid(s);
  std::vector<NamedMatrix> out;
  for (const auto& mc : s.metas) {
    if (mc.target != Target::PhaseRole) {
      out.push_back({mc.name, *resolve_meta_component(mc, grid, *op).ccm});
      continue;
    }
    for (const auto& phase : grid.phases().labels()) {
      std::vector<ReciprocalMatrix> ccms;
      for (const auto& ccf : mc.ccfs)
        if (ccf.phase == phase) ccms.push_back(to_ccm(ccf));
      out.push_back({mc.name + "@" + phase, aggregate(ccms, *op)});
    }
  }
  if (with_collective) out.push_back({"collective", run_pipeline(s).collective});
  return out;
}

inline std::vector<GateDecision> gate_all(const ImpactTable& t, const Options& o, double fraction) {
  std::vector<GateDecision> out;
  if (o.roles.empty() && o.phases.empty()) {
    for (const auto& r : t.roles())
      for (const auto& ph : t.phases()) out.push_back(gate_call(t, r, ph, fraction));
    return out;
  }
  if (o.roles.size() != o.phases.size())
    throw UsageError("--role and --phase must be given the same number of times");
  for (std::size_t i = 0; i < o.roles.size(); ++i) out.push_back(gate_call(t, o.roles[i], o.phases[i], fraction));
  return out;
}

}  // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event impact factors for phase x role events"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-s,--scenario", o.scenario_path, "Scenario file")->required();
    sub->add_option("-f,--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("-o,--output", o.output_path, "Write the result here instead of stdout");
    sub->add_option("--what-if", o.what_if, "Apply a named what-if override");
    sub->add_option("--z", o.z, "Override every ratio exponent z");
    sub->add_option("--fraction", o.fraction, "Gate threshold as a fraction of the largest EIF");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  auto* transform_cmd = app.add_subcommand("transform", "Print the matrix of each CCF");
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Print the collective matrix of each meta-component");
  auto* impact_cmd = app.add_subcommand("impact", "Print the event impact factor vector");
  auto* table_cmd = app.add_subcommand("table", "Print the role x phase impact table");
  auto* gate_cmd = app.add_subcommand("gate", "Accept or reject calls per (role, phase)");
  for (auto* sub : {validate_cmd, transform_cmd, aggregate_cmd, impact_cmd, table_cmd, gate_cmd}) add_common(sub);
  transform_cmd->add_option("--ccf", o.ccfs, "Only these CCFs ('<meta>.<ccf>' or '<ccf>')");
  aggregate_cmd->add_flag("--collective", o.collective, "Also print the full event-grid collective matrix");
  gate_cmd->add_option("--role", o.roles, "Role of a call (repeatable, paired with --phase)");
  gate_cmd->add_option("--phase", o.phases, "Phase of a call (repeatable, paired with --role)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    const Scenario s = detail::load(o);
    const Provenance prov = make_provenance(s, o.what_if);
    std::string text;
    if (validate_cmd->parsed()) {
      validate_scenario(s);
      err << "ok: scenario '" << s.name << "' (" << s.views.size() << " views, " << s.metas.size()
          << " meta-components, " << make_grid(s).size() << " events)\n";
      return kOk;
    } else if (transform_cmd->parsed()) {
      text = detail::render(detail::transformed(s, o.ccfs), prov, o.format);
    } else if (aggregate_cmd->parsed()) {
      text = detail::render(detail::aggregated(s, o.collective), prov, o.format);
    } else if (impact_cmd->parsed()) {
      text = detail::render(run_pipeline(s).impact, prov, o.format);
    } else if (table_cmd->parsed()) {
      text = detail::render(compute_impact_table(s), prov, o.format);
    } else if (gate_cmd->parsed()) {
      text = detail::render(detail::gate_all(compute_impact_table(s), o, s.threshold_fraction), prov, o.format);
    }

    if (o.output_path.empty()) {
      out << text;
    } else {
      std::ofstream file(o.output_path, std::ios::binary);
      if (!file) throw detail::UsageError("cannot write '" + o.output_path + "'");
      file << text;
    }
    return kOk;
  } catch (const ScenarioParseError& e) {
    for (const auto& d : e.diagnostics()) err << o.scenario_path << ":" << to_string(d) << "\n";
    return kValidationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace eif::cli
