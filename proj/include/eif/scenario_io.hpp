#pragma once

// Line-oriented scenario files.
//
//   eif-scenario 1                      header, first non-comment line
//   # comment                           '#' starts a comment anywhere
//   [scenario]                          name, phases, roles, operator,
//                                       impact_normalization, threshold_fraction
//   [view <name>]                       labels = a b c
//   [meta <name>]                       target = phase | role | phase_role
//                                       z = <expansion exponent>
//                                       ccf <name> <kind> [opt=val ...] : <data>
//   [what-if <name>]                    ccf <meta>.<ccf> <kind> [opt=val ...] : <data>
//
// CCF kinds: ordering (ranks), rating (utilities), pairwise (strict upper
// triangle, row-major) and matrix (upper triangle plus diagonal, rows
// separated by '|'). Options: z=<num>, normalize=true|false, phase=<label>.
// Numbers may be written as fractions ("1/3"). A trailing '\' continues a
// line.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eif/error.hpp"
#include "eif/pipeline.hpp"

namespace eif {

inline constexpr std::string_view kScenarioMagic = "eif-scenario";
inline constexpr int kScenarioVersion = 1;

/// One located problem in a scenario file.
struct Diagnostic {
  int line = 0;
  std::string field;
  std::string code;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  std::string s = "line " + std::to_string(d.line);
  if (!d.field.empty()) s += " [" + d.field + "]";
  return s + ": " + d.code + ": " + d.message;
}

class ScenarioParseError : public std::runtime_error {
 public:
  explicit ScenarioParseError(std::vector<Diagnostic> diagnostics)
      : std::runtime_error(summary(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summary(const std::vector<Diagnostic>& ds) {
    std::string s = std::to_string(ds.size()) + " error(s) in scenario";
    for (const auto& d : ds) s += "\n  " + to_string(d);
    return s;
  }

  std::vector<Diagnostic> diagnostics_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline std::optional<double> parse_real(std::string_view tok) {
  auto one = [](std::string_view t) -> std::optional<double> {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
    return v;
  };
  if (auto slash = tok.find('/'); slash != std::string_view::npos) {
    auto num = one(tok.substr(0, slash));
    auto den = one(tok.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  return one(tok);
}

inline std::optional<int> parse_int(std::string_view tok) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct SourceLine {
  int line;
  std::string text;
};

struct Section {
  int line;
  std::string kind;
  std::string name;
  std::vector<SourceLine> body;
};

class ScenarioParser {
 public:
  explicit ScenarioParser(std::string_view document) { split(document); }

  Scenario parse() {
    if (!header_ok_) fail();
    Scenario s;
    const Section* scenario_section = nullptr;
    for (const auto& sec : sections_) {
      if (sec.kind == "scenario") {
        if (scenario_section) error(sec.line, "scenario", ErrorCode::InvalidScenario, "duplicate [scenario] section");
        scenario_section = &sec;
        parse_settings(sec, s);
      } else if (sec.kind == "view") {
        parse_view(sec, s);
      } else if (sec.kind != "meta" && sec.kind != "what-if") {
        error(sec.line, sec.kind, ErrorCode::InvalidScenario, "unknown section kind '" + sec.kind + "'");
      }
    }
    if (!scenario_section) error(1, "scenario", ErrorCode::InvalidScenario, "missing [scenario] section");
    scenario_line_ = scenario_section ? scenario_section->line : 1;

    for (const auto& sec : sections_)
      if (sec.kind == "meta") parse_meta(sec, s);
    for (const auto& sec : sections_)
      if (sec.kind == "what-if") parse_what_if(sec, s);

    if (diagnostics_.empty()) {
      for (const auto& issue : check_scenario(s)) report_issue(issue);
    }
    if (!diagnostics_.empty()) fail();
    return s;
  }

 private:
  void split(std::string_view doc) {
    std::vector<SourceLine> logical;
    int number = 0;
    std::string pending;
    int pending_line = 0;
    std::size_t pos = 0;
    while (pos <= doc.size()) {
      auto eol = doc.find('\n', pos);
      if (eol == std::string_view::npos) eol = doc.size();
      std::string_view raw = doc.substr(pos, eol - pos);
      pos = eol + 1;
      ++number;
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (pending.empty()) pending_line = number;
      if (!raw.empty() && raw.back() == '\\') {
        pending += std::string(raw.substr(0, raw.size() - 1)) + " ";
        continue;
      }
      pending += std::string(raw);
      if (!trim(pending).empty()) logical.push_back({pending_line, std::string(trim(pending))});
      pending.clear();
      if (eol == doc.size()) break;
    }
    if (!trim(pending).empty()) logical.push_back({pending_line, std::string(trim(pending))});

    if (logical.empty()) {
      error(1, "header", ErrorCode::InvalidScenario, "empty document");
      return;
    }
    const auto header = split_ws(logical.front().text);
    if (header.size() != 2 || header[0] != kScenarioMagic) {
      error(logical.front().line, "header", ErrorCode::InvalidScenario,
            "expected '" + std::string(kScenarioMagic) + " " + std::to_string(kScenarioVersion) + "'");
      return;
    }
    if (parse_int(header[1]) != kScenarioVersion) {
      error(logical.front().line, "header", ErrorCode::InvalidScenario,
            "unsupported scenario version '" + header[1] + "'");
      return;
    }
    header_ok_ = true;

    for (std::size_t i = 1; i < logical.size(); ++i) {
      const auto& l = logical[i];
      if (l.text.front() == '[') {
        if (l.text.back() != ']') {
          error(l.line, "section", ErrorCode::InvalidScenario, "unterminated section header");
          sections_.push_back({l.line, "", "", {}});
          continue;
        }
        auto words = split_ws(std::string_view(l.text).substr(1, l.text.size() - 2));
        Section sec{l.line, words.empty() ? "" : words[0], words.size() > 1 ? words[1] : "", {}};
        const bool named = sec.kind == "view" || sec.kind == "meta" || sec.kind == "what-if";
        if (words.size() != (named ? 2u : 1u))
          error(l.line, "section", ErrorCode::InvalidScenario, "malformed section header '" + l.text + "'");
        sections_.push_back(std::move(sec));
      } else if (sections_.empty()) {
        error(l.line, "", ErrorCode::InvalidScenario, "content before the first section");
      } else {
        sections_.back().body.push_back(l);
      }
    }
  }

  static std::optional<std::pair<std::string, std::string>> key_value(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) return std::nullopt;
    return std::pair{std::string(trim(std::string_view(text).substr(0, eq))),
                     std::string(trim(std::string_view(text).substr(eq + 1)))};
  }

  void parse_settings(const Section& sec, Scenario& s) {
    for (const auto& l : sec.body) {
      auto kv = key_value(l.text);
      if (!kv) {
        error(l.line, "", ErrorCode::InvalidScenario, "expected 'key = value'");
        continue;
      }
      const auto& [key, value] = *kv;
      if (key == "name") s.name = value;
      else if (key == "phases") s.phase_view = value;
      else if (key == "roles") s.role_view = value;
      else if (key == "operator") s.operator_name = value;
      else if (key == "impact_normalization") s.impact_normalization = value;
      else if (key == "threshold_fraction") {
        auto v = parse_real(value);
        if (!v) error(l.line, key, ErrorCode::InvalidConfig, "not a number: '" + value + "'");
        else s.threshold_fraction = *v;
      } else {
        error(l.line, key, ErrorCode::InvalidScenario, "unknown setting '" + key + "'");
      }
    }
  }

  void parse_view(const Section& sec, Scenario& s) {
    std::optional<std::vector<std::string>> labels;
    for (const auto& l : sec.body) {
      auto kv = key_value(l.text);
      if (!kv || kv->first != "labels") {
        error(l.line, "", ErrorCode::InvalidScenario, "expected 'labels = ...' in view section");
        continue;
      }
      labels = split_ws(kv->second);
      view_lines_[sec.name] = l.line;
    }
    if (!labels) {
      error(sec.line, "view " + sec.name, ErrorCode::InvalidScenario, "view has no labels");
      return;
    }
    try {
      s.views.emplace_back(sec.name, std::move(*labels));
    } catch (const Error& e) {
      error(view_lines_[sec.name], "labels", e);
      broken_views_.insert(sec.name);
    }
  }

  /// Item set a CCF of the given target is expressed over.
  std::optional<ItemSet> items_for(Target target, const Scenario& s, int line, const std::string& field) {
    const std::string& view_name = target == Target::Phase ? s.phase_view : s.role_view;
    const View* view = s.find_view(view_name);
    if (!view && broken_views_.count(view_name)) return std::nullopt;  // already reported
    if (!view) {
      error(line, field, ErrorCode::UnknownLabel, "view '" + view_name + "' is not declared");
      return std::nullopt;
    }
    try {
      return view->item_set();
    } catch (const Error& e) {
      error(line, field, e);
      return std::nullopt;
    }
  }

  std::optional<Ccf> parse_ccf(const SourceLine& l, Target target, const Scenario& s, std::string& name_out) {
    const auto colon = l.text.find(':');
    if (colon == std::string::npos) {
      error(l.line, "ccf", ErrorCode::InvalidScenario, "ccf line needs ':' before its data");
      return std::nullopt;
    }
    auto head = split_ws(std::string_view(l.text).substr(0, colon));
    const std::string data = l.text.substr(colon + 1);
    if (head.size() < 3) {
      error(l.line, "ccf", ErrorCode::InvalidScenario, "expected 'ccf <name> <kind> [options] : <data>'");
      return std::nullopt;
    }
    name_out = head[1];
    const std::string field = "ccf '" + head[1] + "'";
    const std::string& kind = head[2];

    TransformConfig cfg;
    std::string phase;
    bool ok = true;
    for (std::size_t i = 3; i < head.size(); ++i) {
      auto eq = head[i].find('=');
      const std::string key = head[i].substr(0, eq);
      const std::string value = eq == std::string::npos ? "" : head[i].substr(eq + 1);
      if (key == "z") {
        auto v = parse_real(value);
        if (!v) { error(l.line, field, ErrorCode::InvalidConfig, "z is not a number: '" + value + "'"); ok = false; }
        else cfg.z = *v;
      } else if (key == "normalize" && (value == "true" || value == "false")) {
        cfg.normalize = value == "true";
      } else if (key == "phase" && !value.empty()) {
        phase = value;
      } else {
        error(l.line, field, ErrorCode::InvalidScenario, "unknown option '" + head[i] + "'");
        ok = false;
      }
    }
    if (target == Target::PhaseRole && phase.empty()) {
      error(l.line, field, ErrorCode::InvalidScenario, "phase_role CCFs need a phase=<label> option");
      ok = false;
    }
    if (target != Target::PhaseRole && !phase.empty()) {
      error(l.line, field, ErrorCode::InvalidScenario, "phase= is only valid for phase_role targets");
      ok = false;
    }
    auto items = items_for(target, s, l.line, field);
    if (!items || !ok) return std::nullopt;

    try {
      validate(cfg);
      auto tokens = split_ws(data);
      if (kind == "ordering") {
        std::vector<int> ranks;
        for (const auto& t : tokens) {
          auto v = parse_int(t);
          if (!v) throw Error(ErrorCode::InvalidScenario, "rank is not an integer: '" + t + "'");
          ranks.push_back(*v);
        }
        return Ccf{head[1], make_ordering(*items, std::move(ranks)), cfg, phase};
      }
      if (kind == "rating" || kind == "pairwise") {
        std::vector<double> values;
        for (const auto& t : tokens) {
          auto v = parse_real(t);
          if (!v) throw Error(ErrorCode::InvalidScenario, "not a number: '" + t + "'");
          values.push_back(*v);
        }
        if (kind == "rating") return Ccf{head[1], make_rating(*items, std::move(values)), cfg, phase};
        return Ccf{head[1], make_pairwise(*items, std::move(values)), cfg, phase};
      }
      if (kind == "matrix") return Ccf{head[1], parse_matrix(*items, data), cfg, phase};
      throw Error(ErrorCode::InvalidScenario, "unknown ccf kind '" + kind + "'");
    } catch (const Error& e) {
      error(l.line, field, e);
      return std::nullopt;
    }
  }

  static ReciprocalMatrix parse_matrix(const ItemSet& items, const std::string& data) {
    const std::size_t n = items.size();
    std::vector<std::string> rows;
    std::size_t start = 0;
    for (std::size_t bar; (bar = data.find('|', start)) != std::string::npos; start = bar + 1)
      rows.push_back(data.substr(start, bar - start));
    rows.push_back(data.substr(start));
    if (rows.size() != n)
      throw Error(ErrorCode::LengthMismatch, "matrix over " + std::to_string(n) + " items needs " +
                                                 std::to_string(n) + " rows, got " + std::to_string(rows.size()));
    std::vector<double> upper;
    for (std::size_t i = 0; i < n; ++i) {
      auto tokens = split_ws(rows[i]);
      if (tokens.size() != n - i)
        throw Error(ErrorCode::LengthMismatch, "matrix row " + std::to_string(i + 1) + " ('" + items[i] +
                                                   "') needs " + std::to_string(n - i) + " values",
                    items[i]);
      for (std::size_t k = 0; k < tokens.size(); ++k) {
        auto v = parse_real(tokens[k]);
        if (!v) throw Error(ErrorCode::InvalidScenario, "not a number: '" + tokens[k] + "'");
        if (k == 0) {
          if (*v != 1.0)
            throw Error(ErrorCode::NotReciprocal, "diagonal entry of '" + items[i] + "' must be 1", items[i]);
          continue;
        }
        upper.push_back(*v);
      }
    }
    return ReciprocalMatrix::from_upper(items, upper);
  }

  void parse_meta(const Section& sec, Scenario& s) {
    MetaComponent mc;
    mc.name = sec.name;
    meta_lines_[sec.name] = sec.line;
    std::optional<Target> target;
    for (const auto& l : sec.body) {
      if (l.text.starts_with("ccf ")) {
        if (!target) {
          error(l.line, "target", ErrorCode::InvalidScenario, "'target = ...' must precede ccf lines");
          continue;
        }
        std::string name;
        if (auto ccf = parse_ccf(l, *target, s, name)) mc.ccfs.push_back(std::move(*ccf));
        ccf_lines_[{sec.name, name}] = l.line;
        continue;
      }
      auto kv = key_value(l.text);
      if (!kv) {
        error(l.line, "", ErrorCode::InvalidScenario, "expected 'key = value' or a ccf line");
      } else if (kv->first == "target") {
        target = parse_target(kv->second);
        if (!target) error(l.line, "target", ErrorCode::InvalidScenario, "target must be phase, role or phase_role");
        else mc.target = *target;
      } else if (kv->first == "z") {
        auto v = parse_real(kv->second);
        if (!v) error(l.line, "z", ErrorCode::InvalidConfig, "not a number: '" + kv->second + "'");
        else mc.z = *v;
      } else {
        error(l.line, kv->first, ErrorCode::InvalidScenario, "unknown meta setting '" + kv->first + "'");
      }
    }
    if (!target) error(sec.line, "target", ErrorCode::InvalidScenario, "meta-component has no target");
    s.metas.push_back(std::move(mc));
  }

  void parse_what_if(const Section& sec, Scenario& s) {
    WhatIf wi{sec.name, {}};
    for (const auto& l : sec.body) {
      if (!l.text.starts_with("ccf ")) {
        error(l.line, "", ErrorCode::InvalidScenario, "what-if sections only hold ccf lines");
        continue;
      }
      auto words = split_ws(l.text);
      const std::string ref = words.size() > 1 ? words[1] : "";
      const auto dot = ref.find('.');
      if (dot == std::string::npos) {
        error(l.line, "ccf", ErrorCode::InvalidScenario, "what-if ccf must be named '<meta>.<ccf>'");
        continue;
      }
      const std::string meta = ref.substr(0, dot);
      const std::string ccf_name = ref.substr(dot + 1);
      const MetaComponent* mc = s.find_meta(meta);
      if (!mc) {
        error(l.line, "ccf '" + ref + "'", ErrorCode::UnknownLabel, "unknown meta-component '" + meta + "'");
        continue;
      }
      if (std::none_of(mc->ccfs.begin(), mc->ccfs.end(), [&](const Ccf& c) { return c.name == ccf_name; })) {
        error(l.line, "ccf '" + ref + "'", ErrorCode::UnknownLabel, "meta-component '" + meta + "' has no ccf '" + ccf_name + "'");
        continue;
      }
      SourceLine local = l;
      local.text.replace(local.text.find(ref), ref.size(), ccf_name);
      std::string name;
      if (auto ccf = parse_ccf(local, mc->target, s, name)) wi.patches.push_back({meta, std::move(*ccf)});
    }
    s.what_ifs.push_back(std::move(wi));
  }

  void report_issue(const ScenarioIssue& issue) {
    int line = scenario_line_;
    std::string field = "scenario";
    if (!issue.meta.empty()) {
      field = "meta '" + issue.meta + "'";
      if (auto it = meta_lines_.find(issue.meta); it != meta_lines_.end()) line = it->second;
      if (!issue.ccf.empty()) {
        field = "ccf '" + issue.ccf + "'";
        if (auto it = ccf_lines_.find({issue.meta, issue.ccf}); it != ccf_lines_.end()) line = it->second;
      }
    }
    error(line, field, issue.error);
  }

  void error(int line, std::string field, ErrorCode code, std::string message) {
    diagnostics_.push_back({line, std::move(field), std::string(to_string(code)), std::move(message)});
  }
  void error(int line, std::string field, const Error& e) {
    diagnostics_.push_back({line, std::move(field), std::string(to_string(e.code())), e.detail()});
  }
  [[noreturn]] void fail() { throw ScenarioParseError(diagnostics_); }

  bool header_ok_ = false;
  int scenario_line_ = 1;
  std::vector<Section> sections_;
  std::vector<Diagnostic> diagnostics_;
  std::map<std::string, int> view_lines_;
  std::set<std::string> broken_views_;
  std::map<std::string, int> meta_lines_;
  std::map<std::pair<std::string, std::string>, int> ccf_lines_;
};

inline std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : " ") + format_real(v);
  return out;
}

inline std::string write_ccf_line(const std::string& name, const Ccf& ccf) {
  std::string line = "ccf " + name + " " + std::string(kind_of(ccf.data));
  if (ccf.config.z != 1.0) line += " z=" + format_real(ccf.config.z);
  if (!ccf.config.normalize) line += " normalize=false";
  if (!ccf.phase.empty()) line += " phase=" + ccf.phase;
  line += " :";
  struct Visitor {
    std::string& out;
    void operator()(const Ordering& o) const {
      for (int r : o.ranks()) out += " " + std::to_string(r);
    }
    void operator()(const Rating& r) const { out += " " + join_reals(r.utilities()); }
    void operator()(const PairwiseComparison& p) const { out += " " + join_reals(p.upper()); }
    void operator()(const ReciprocalMatrix& m) const {
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (i > 0) out += " |";
        for (std::size_t j = i; j < m.size(); ++j) out += " " + format_real(m(i, j));
      }
    }
  };
  std::visit(Visitor{line}, ccf.data);
  return line;
}

}  // namespace detail

/// Parses a scenario document; throws ScenarioParseError listing every
/// located problem.
inline Scenario parse_scenario(std::string_view document) {
  return detail::ScenarioParser(document).parse();
}

/// Canonical text form; parse_scenario(write_scenario(s)) == s.
inline std::string write_scenario(const Scenario& s) {
  std::string out = std::string(kScenarioMagic) + " " + std::to_string(kScenarioVersion) + "\n\n";
  out += "[scenario]\n";
  if (!s.name.empty()) out += "name = " + s.name + "\n";
  out += "phases = " + s.phase_view + "\n";
  out += "roles = " + s.role_view + "\n";
  out += "operator = " + s.operator_name + "\n";
  out += "impact_normalization = " + s.impact_normalization + "\n";
  out += "threshold_fraction = " + detail::format_real(s.threshold_fraction) + "\n";
  for (const auto& v : s.views) {
    out += "\n[view " + v.name() + "]\nlabels =";
    for (const auto& l : v.labels()) out += " " + l;
    out += "\n";
  }
  for (const auto& mc : s.metas) {
    out += "\n[meta " + mc.name + "]\ntarget = " + std::string(to_string(mc.target)) + "\n";
    if (mc.z != 1.0) out += "z = " + detail::format_real(mc.z) + "\n";
    for (const auto& ccf : mc.ccfs) out += detail::write_ccf_line(ccf.name, ccf) + "\n";
  }
  for (const auto& wi : s.what_ifs) {
    out += "\n[what-if " + wi.name + "]\n";
    for (const auto& p : wi.patches)
      out += detail::write_ccf_line(p.meta + "." + p.replacement.name, p.replacement) + "\n";
  }
  return out;
}

/// 64-bit FNV-1a of the canonical scenario text, as 16 hex digits.
inline std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : write_scenario(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace eif
