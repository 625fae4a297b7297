#pragma once

// Result documents: JSON (full precision, with provenance), CSV
// (RFC 4180 quoting, 6 significant digits) and a human-readable text form
// (EIFs with 4 decimals).

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eif/error.hpp"
#include "eif/pipeline.hpp"
#include "eif/scenario_io.hpp"

namespace eif {

/// Where a result came from.
struct Provenance {
  struct ZValue {
    std::string ccf;  // "<meta>.<ccf>", or "<meta>" for an expansion exponent
    double z = 1.0;
    friend bool operator==(const ZValue&, const ZValue&) = default;
  };

  std::string scenario;
  std::string scenario_hash;
  std::string operator_name;
  std::string what_if;
  double threshold_fraction = kDefaultThresholdFraction;
  std::vector<ZValue> z_values;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// `s` is the effective scenario, i.e. after what-if and z overrides.
inline Provenance make_provenance(const Scenario& s, std::string what_if = {}) {
  Provenance p{s.name, scenario_hash(s), s.operator_name, std::move(what_if), s.threshold_fraction, {}};
  for (const auto& mc : s.metas) {
    if (mc.target == Target::PhaseRole) p.z_values.push_back({mc.name, mc.z});
    for (const auto& ccf : mc.ccfs)
      if (std::holds_alternative<Rating>(ccf.data)) p.z_values.push_back({mc.name + "." + ccf.name, ccf.config.z});
  }
  return p;
}

/// A named matrix in a result document.
struct NamedMatrix {
  std::string name;
  ReciprocalMatrix matrix;
};

namespace detail {

using nlohmann::json;

inline json provenance_json(const Provenance& p) {
  json z = json::array();
  for (const auto& v : p.z_values) z.push_back({{"ccf", v.ccf}, {"z", v.z}});
  return {{"scenario", p.scenario},
          {"scenario_hash", p.scenario_hash},
          {"operator", p.operator_name},
          {"what_if", p.what_if},
          {"threshold_fraction", p.threshold_fraction},
          {"z", z}};
}

inline Provenance provenance_from(const json& j) {
  Provenance p;
  p.scenario = j.at("scenario").get<std::string>();
  p.scenario_hash = j.at("scenario_hash").get<std::string>();
  p.operator_name = j.at("operator").get<std::string>();
  p.what_if = j.at("what_if").get<std::string>();
  p.threshold_fraction = j.at("threshold_fraction").get<double>();
  for (const auto& v : j.at("z")) p.z_values.push_back({v.at("ccf").get<std::string>(), v.at("z").get<double>()});
  return p;
}

inline json document(std::string_view kind, const Provenance& p, json data) {
  return {{"format", "eif-result"}, {"version", 1}, {"kind", kind},
          {"provenance", provenance_json(p)}, {"data", std::move(data)}};
}

inline const json& expect_kind(const json& doc, std::string_view kind) {
  if (doc.value("format", "") != "eif-result" || doc.value("kind", "") != kind)
    throw Error(ErrorCode::InvalidScenario, "not an eif-result document of kind '" + std::string(kind) + "'");
  return doc.at("data");
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

inline std::string csv_number(double v) { return fmt("%.6g", v); }
inline std::string eif_text(double v) { return fmt("%.4f", v); }

}  // namespace detail

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json to_json(const ImpactVector& v, const Provenance& p) {
  nlohmann::json events = nlohmann::json::array();
  for (std::size_t i = 0; i < v.size(); ++i)
    events.push_back({{"label", v.items[i]}, {"raw", v.raw[i]}, {"eif", v.normalized[i]}});
  return detail::document("impact_vector", p, {{"events", events}});
}

inline nlohmann::json to_json(const ImpactTable& t, const Provenance& p) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t r = 0; r < t.roles().size(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t ph = 0; ph < t.phases().size(); ++ph) row.push_back(t.at(r, ph));
    cells.push_back(row);
  }
  return detail::document("impact_table", p,
                          {{"roles", t.roles()}, {"phases", t.phases()}, {"cells", cells}});
}

inline nlohmann::json to_json(const std::vector<GateDecision>& ds, const Provenance& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : ds)
    arr.push_back({{"role", d.role}, {"phase", d.phase}, {"eif", d.eif},
                   {"threshold", d.threshold}, {"action", to_string(d.action)}});
  return detail::document("gate_decisions", p, {{"decisions", arr}});
}

/// Matrices are stored as upper triangle plus diagonal, one array per row.
inline nlohmann::json to_json(const std::vector<NamedMatrix>& ms, const Provenance& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [name, m] : ms) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = i; j < m.size(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    arr.push_back({{"name", name}, {"items", m.items().labels()}, {"upper", rows}});
  }
  return detail::document("matrices", p, {{"matrices", arr}});
}

inline Provenance read_provenance(const nlohmann::json& doc) {
  return detail::provenance_from(doc.at("provenance"));
}

inline ImpactVector read_impact_vector(const nlohmann::json& doc) {
  const auto& data = detail::expect_kind(doc, "impact_vector");
  std::vector<std::string> labels;
  std::vector<double> raw, eif;
  for (const auto& e : data.at("events")) {
    labels.push_back(e.at("label").get<std::string>());
    raw.push_back(e.at("raw").get<double>());
    eif.push_back(e.at("eif").get<double>());
  }
  return ImpactVector{ItemSet(std::move(labels)), std::move(raw), std::move(eif)};
}

inline ImpactTable read_impact_table(const nlohmann::json& doc) {
  const auto& data = detail::expect_kind(doc, "impact_table");
  std::vector<double> cells;
  for (const auto& row : data.at("cells"))
    for (const auto& c : row) cells.push_back(c.get<double>());
  return ImpactTable(data.at("roles").get<std::vector<std::string>>(),
                     data.at("phases").get<std::vector<std::string>>(), std::move(cells));
}

inline std::vector<GateDecision> read_gate_decisions(const nlohmann::json& doc) {
  const auto& data = detail::expect_kind(doc, "gate_decisions");
  std::vector<GateDecision> out;
  for (const auto& d : data.at("decisions")) {
    out.push_back({d.at("role").get<std::string>(), d.at("phase").get<std::string>(),
                   d.at("eif").get<double>(), d.at("threshold").get<double>(),
                   d.at("action").get<std::string>() == "reject" ? GateAction::Reject : GateAction::Accept});
  }
  return out;
}

inline std::vector<NamedMatrix> read_matrices(const nlohmann::json& doc) {
  const auto& data = detail::expect_kind(doc, "matrices");
  std::vector<NamedMatrix> out;
  for (const auto& m : data.at("matrices")) {
    std::vector<double> upper;
    for (const auto& row : m.at("upper"))
      for (std::size_t k = 1; k < row.size(); ++k) upper.push_back(row[k].get<double>());
    out.push_back({m.at("name").get<std::string>(),
                   ReciprocalMatrix::from_upper(ItemSet(m.at("items").get<std::vector<std::string>>()), upper)});
  }
  return out;
}

// ---- CSV -------------------------------------------------------------------

inline std::string to_csv(const ImpactTable& t) {
  std::string out = "role";
  for (const auto& ph : t.phases()) out += "," + detail::csv_field(ph);
  out += "\n";
  for (std::size_t r = 0; r < t.roles().size(); ++r) {
    out += detail::csv_field(t.roles()[r]);
    for (std::size_t ph = 0; ph < t.phases().size(); ++ph) out += "," + detail::csv_number(t.at(r, ph));
    out += "\n";
  }
  return out;
}

inline std::string to_csv(const ImpactVector& v) {
  std::string out = "event,raw,eif\n";
  for (std::size_t i = 0; i < v.size(); ++i)
    out += detail::csv_field(v.items[i]) + "," + detail::csv_number(v.raw[i]) + "," +
           detail::csv_number(v.normalized[i]) + "\n";
  return out;
}

inline std::string to_csv(const std::vector<GateDecision>& ds) {
  std::string out = "role,phase,eif,threshold,action\n";
  for (const auto& d : ds)
    out += detail::csv_field(d.role) + "," + detail::csv_field(d.phase) + "," + detail::csv_number(d.eif) +
           "," + detail::csv_number(d.threshold) + "," + std::string(to_string(d.action)) + "\n";
  return out;
}

/// One block per matrix: header row of item labels, lower triangle left empty.
inline std::string to_csv(const std::vector<NamedMatrix>& ms) {
  std::string out;
  for (const auto& [name, m] : ms) {
    out += detail::csv_field(name);
    for (const auto& l : m.items().labels()) out += "," + detail::csv_field(l);
    out += "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
      out += detail::csv_field(m.items()[i]);
      for (std::size_t j = 0; j < m.size(); ++j) out += "," + (j >= i ? detail::csv_number(m(i, j)) : "");
      out += "\n";
    }
  }
  return out;
}

// ---- text ------------------------------------------------------------------

inline std::string to_text(const ImpactTable& t) {
  std::size_t width = 4;
  for (const auto& r : t.roles()) width = std::max(width, r.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  std::string out = pad("", width);
  for (const auto& ph : t.phases()) out += " " + pad(ph, 7);
  out += "\n";
  for (std::size_t r = 0; r < t.roles().size(); ++r) {
    std::string line = t.roles()[r];
    line.append(width - line.size(), ' ');
    for (std::size_t ph = 0; ph < t.phases().size(); ++ph)
      line += " " + pad(detail::eif_text(t.at(r, ph)), std::max<std::size_t>(7, t.phases()[ph].size()));
    out += line + "\n";
  }
  return out;
}

inline std::string to_text(const ImpactVector& v) {
  std::string out;
  for (const auto& [label, eif] : rank_events(v)) out += detail::eif_text(eif) + "  " + label + "\n";
  return out;
}

inline std::string to_text(const std::vector<GateDecision>& ds) {
  std::string out;
  for (const auto& d : ds)
    out += std::string(to_string(d.action)) + "  " + d.role + " @ " + d.phase + "  eif " +
           detail::eif_text(d.eif) + " vs threshold " + detail::eif_text(d.threshold) + "\n";
  return out;
}

inline std::string to_text(const std::vector<NamedMatrix>& ms) {
  std::string out;
  for (const auto& [name, m] : ms) {
    std::size_t width = 0;
    for (const auto& l : m.items().labels()) width = std::max(width, l.size());
    out += name + "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
      out += "  " + m.items()[i] + std::string(width - m.items()[i].size(), ' ');
      for (std::size_t j = 0; j < m.size(); ++j) out += " " + detail::fmt("%8.4f", m(i, j));
      out += "\n";
    }
  }
  return out;
}

}  // namespace eif
