#include "proofforge/log_analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <nlohmann/json.hpp>

namespace proofforge {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::USER: return "user";
    case Role::ASSISTANT: return "assistant";
    case Role::SYSTEM: return "system";
  }
  return "system";
}

std::optional<Role> role_from(std::string_view text) {
  if (text == "user") return Role::USER;
  if (text == "assistant") return Role::ASSISTANT;
  if (text == "system") return Role::SYSTEM;
  return std::nullopt;
}

std::string_view to_string(ToolKind kind) {
  switch (kind) {
    case ToolKind::BASH: return "bash";
    case ToolKind::EDIT: return "edit";
    case ToolKind::READ: return "read";
    case ToolKind::OTHER: return "other";
  }
  return "other";
}

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

ToolKind tool_kind_from(std::string_view text) {
  std::string lowered = lowercase(text);
  if (lowered == "bash") return ToolKind::BASH;
  if (lowered == "edit") return ToolKind::EDIT;
  if (lowered == "read") return ToolKind::READ;
  return ToolKind::OTHER;
}

// Days since the Unix epoch for a civil date (Gregorian, proleptic).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::optional<Millis> parse_iso_timestamp(std::string_view text) {
  auto digits = [&](std::size_t at, std::size_t count, int& out) {
    if (at + count > text.size()) return false;
    out = 0;
    for (std::size_t i = at; i < at + count; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
      out = out * 10 + (text[i] - '0');
    }
    return true;
  };

  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!digits(0, 4, year) || text.size() < 19) return std::nullopt;
  if (text[4] != '-' || !digits(5, 2, month) || text[7] != '-' || !digits(8, 2, day)) {
    return std::nullopt;
  }
  if ((text[10] != 'T' && text[10] != ' ') || !digits(11, 2, hour) || text[13] != ':' ||
      !digits(14, 2, minute) || text[16] != ':' || !digits(17, 2, second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
    return std::nullopt;
  }

  std::size_t at = 19;
  Millis fraction = 0;
  if (at < text.size() && text[at] == '.') {
    ++at;
    std::size_t start = at;
    while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
    if (at == start) return std::nullopt;
    // Milliseconds; extra precision truncates.
    std::string_view frac = text.substr(start, std::min<std::size_t>(3, at - start));
    fraction = 0;
    for (char c : frac) fraction = fraction * 10 + (c - '0');
    for (std::size_t i = frac.size(); i < 3; ++i) fraction *= 10;
  }

  Millis offset_ms = 0;
  if (at < text.size()) {
    char sign = text[at];
    if (sign == 'Z') {
      ++at;
    } else if (sign == '+' || sign == '-') {
      ++at;
      int oh = 0, om = 0;
      if (!digits(at, 2, oh)) return std::nullopt;
      at += 2;
      if (at < text.size() && text[at] == ':') ++at;
      if (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) {
        if (!digits(at, 2, om)) return std::nullopt;
        at += 2;
      }
      offset_ms = (static_cast<Millis>(oh) * 60 + om) * 60000;
      if (sign == '-') offset_ms = -offset_ms;
    } else {
      return std::nullopt;
    }
  }
  if (at != text.size()) return std::nullopt;

  Millis ms = days_from_civil(year, month, day) * 86400000LL;
  ms += (static_cast<Millis>(hour) * 3600 + static_cast<Millis>(minute) * 60 + second) * 1000;
  ms += fraction;
  return ms - offset_ms;
}

std::size_t ingest_log_stream(std::istream& in, const IngestOptions& options,
                              const std::function<void(SessionLogRecord&&)>& sink,
                              std::vector<ParseDiagnostic>* diagnostics) {
  const LogFieldMap& fields = options.fields;
  std::string line;
  int line_no = 0;
  std::size_t accepted = 0;
  auto note = [&](std::string message) {
    if (diagnostics != nullptr) {
      diagnostics->push_back({line_no, 1, Severity::WARNING, std::move(message)});
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) {
      note("malformed JSON record");
      continue;
    }
    SessionLogRecord record;
    if (!row.contains(fields.timestamp)) {
      note("record has no '" + fields.timestamp + "' field");
      continue;
    }
    const nlohmann::json& ts = row[fields.timestamp];
    if (ts.is_string()) {
      auto parsed = parse_iso_timestamp(ts.get<std::string>());
      if (!parsed) {
        note("unparseable timestamp '" + ts.get<std::string>() + "'");
        continue;
      }
      record.timestamp_ms = *parsed;
    } else if (ts.is_number_integer()) {
      record.timestamp_ms = ts.get<Millis>();
    } else {
      note("timestamp must be an ISO string or epoch milliseconds");
      continue;
    }
    if (!row.contains(fields.role) || !row[fields.role].is_string()) {
      note("record has no '" + fields.role + "' field");
      continue;
    }
    auto role = role_from(row[fields.role].get<std::string>());
    if (!role) {
      note("unknown role '" + row[fields.role].get<std::string>() + "'");
      continue;
    }
    record.role = *role;
    if (row.contains(fields.text) && row[fields.text].is_string()) {
      record.text = row[fields.text].get<std::string>();
    }
    if (row.contains(fields.tools)) {
      if (!row[fields.tools].is_array()) {
        note("'" + fields.tools + "' must be an array");
        continue;
      }
      for (const nlohmann::json& tool : row[fields.tools]) {
        if (!tool.is_object()) continue;
        ToolCall call;
        if (tool.contains(fields.tool_kind) && tool[fields.tool_kind].is_string()) {
          call.kind = tool_kind_from(tool[fields.tool_kind].get<std::string>());
        }
        if (tool.contains(fields.tool_payload) && tool[fields.tool_payload].is_string()) {
          call.payload = tool[fields.tool_payload].get<std::string>();
        }
        record.tool_calls.push_back(std::move(call));
      }
    }
    ++accepted;
    sink(std::move(record));
  }
  return accepted;
}

namespace {

bool record_order(const SessionLogRecord& a, const SessionLogRecord& b) {
  if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
  if (a.role != b.role) return static_cast<int>(a.role) < static_cast<int>(b.role);
  if (a.text != b.text) return a.text < b.text;
  return std::lexicographical_compare(
      a.tool_calls.begin(), a.tool_calls.end(), b.tool_calls.begin(), b.tool_calls.end(),
      [](const ToolCall& x, const ToolCall& y) {
        if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind);
        return x.payload < y.payload;
      });
}

}  // namespace

IngestResult ingest_log(std::istream& in, const IngestOptions& options) {
  IngestResult result;
  std::size_t lines = 0;
  ingest_log_stream(
      in, options,
      [&](SessionLogRecord&& record) { result.records.push_back(std::move(record)); },
      &result.diagnostics);
  lines = result.records.size() + result.diagnostics.size();
  result.lines_read = lines;
  // A total order, so any permutation of the input lines ingests identically.
  std::sort(result.records.begin(), result.records.end(), record_order);
  return result;
}

IngestCounts ingest_log_count(std::istream& in, const IngestOptions& options) {
  IngestCounts counts;
  std::vector<ParseDiagnostic> diagnostics;
  counts.records = ingest_log_stream(
      in, options, [](SessionLogRecord&&) {}, &diagnostics);
  counts.malformed = diagnostics.size();
  counts.lines_read = counts.records + counts.malformed;
  return counts;
}

namespace {

bool has_prefix(std::string_view text, std::string_view prefix) {
  return text.size() >= prefix.size() && text.compare(0, prefix.size(), prefix) == 0;
}

bool matches_any_prefix(std::string_view payload, std::span<const std::string> prefixes) {
  for (const std::string& prefix : prefixes) {
    if (has_prefix(payload, prefix)) return true;
  }
  return false;
}

}  // namespace

SessionStats compute_stats(std::span<const SessionLogRecord> records,
                           const StatsOptions& options) {
  SessionStats stats;
  std::optional<Millis> open_session_start;
  auto close_session = [&](Millis end) {
    SessionWindow window;
    window.start_ms = *open_session_start;
    window.end_ms = end;
    window.duration_min = static_cast<double>(end - window.start_ms) / 60000.0;
    stats.sessions.push_back(window);
    open_session_start.reset();
  };

  for (const SessionLogRecord& record : records) {
    for (const ToolCall& tool : record.tool_calls) {
      switch (tool.kind) {
        case ToolKind::BASH:
          stats.bash_calls += 1;
          if (matches_any_prefix(tool.payload, options.build_prefixes)) stats.build_cmds += 1;
          if (matches_any_prefix(tool.payload, options.process_theories_prefixes)) {
            stats.process_theories_cmds += 1;
          }
          break;
        case ToolKind::EDIT: stats.edits += 1; break;
        case ToolKind::READ: stats.reads += 1; break;
        case ToolKind::OTHER: break;
      }
    }
    if (record.role == Role::ASSISTANT) {
      stats.assistant_msgs += 1;
      continue;
    }
    if (record.role != Role::USER) continue;
    stats.user_msgs += 1;
    bool automated = has_prefix(record.text, options.automated_prompt_prefix);
    if (automated) {
      stats.automated_prompts += 1;
    } else {
      stats.manual_msgs += 1;
    }
    if (open_session_start) close_session(record.timestamp_ms);
    if (automated) open_session_start = record.timestamp_ms;
  }
  if (open_session_start && !records.empty()) {
    close_session(records.back().timestamp_ms);
  }

  if (stats.user_msgs > 0) {
    stats.automation_ratio =
        static_cast<double>(stats.automated_prompts) / static_cast<double>(stats.user_msgs);
  }
  if (!stats.sessions.empty()) {
    std::vector<double> minutes;
    minutes.reserve(stats.sessions.size());
    for (const SessionWindow& window : stats.sessions) minutes.push_back(window.duration_min);
    std::sort(minutes.begin(), minutes.end());
    std::size_t n = minutes.size();
    stats.duration_median_min =
        (n % 2 == 1) ? minutes[n / 2] : (minutes[n / 2 - 1] + minutes[n / 2]) / 2.0;
    double sum = 0.0;
    for (double m : minutes) sum += m;
    stats.duration_mean_min = sum / static_cast<double>(n);
    stats.duration_max_min = minutes.back();
  }
  return stats;
}

std::string_view to_string(Theme theme) {
  switch (theme) {
    case Theme::TACTIC_EXPLOSION: return "tactic_explosion";
    case Theme::INEFFICIENT_TOOLING: return "inefficient_tooling";
    case Theme::CHERRY_PICKING: return "cherry_picking";
    case Theme::RESOURCE_MANAGEMENT: return "resource_management";
    case Theme::OTHER: return "other";
  }
  return "other";
}

std::optional<Theme> theme_from(std::string_view text) {
  if (text == "tactic_explosion") return Theme::TACTIC_EXPLOSION;
  if (text == "inefficient_tooling") return Theme::INEFFICIENT_TOOLING;
  if (text == "cherry_picking") return Theme::CHERRY_PICKING;
  if (text == "resource_management") return Theme::RESOURCE_MANAGEMENT;
  if (text == "other") return Theme::OTHER;
  return std::nullopt;
}

std::vector<ThemeRule> default_theme_rules() {
  return {
      {Theme::TACTIC_EXPLOSION, "uncontrolled slow by calls"},
      {Theme::TACTIC_EXPLOSION, "uncontrolled blast"},
      {Theme::TACTIC_EXPLOSION, "uncontrolled auto"},
      {Theme::TACTIC_EXPLOSION, "tactic explosion"},
      {Theme::CHERRY_PICKING, "low hanging fruit"},
      {Theme::CHERRY_PICKING, "jumping around"},
      {Theme::CHERRY_PICKING, "cherry-picking"},
      {Theme::INEFFICIENT_TOOLING, "running isabelle repeatedly"},
      {Theme::INEFFICIENT_TOOLING, "capture the output once"},
      {Theme::INEFFICIENT_TOOLING, "inefficient tool use"},
      {Theme::RESOURCE_MANAGEMENT, "backgrounded process"},
      {Theme::RESOURCE_MANAGEMENT, "consume memory"},
      {Theme::RESOURCE_MANAGEMENT, "out of memory"},
  };
}

std::vector<ThemeRule> load_theme_rules(std::istream& in,
                                        std::vector<ParseDiagnostic>* diagnostics) {
  std::vector<ThemeRule> rules;
  std::string line;
  int line_no = 0;
  auto note = [&](std::string message) {
    if (diagnostics != nullptr) {
      diagnostics->push_back({line_no, 1, Severity::WARNING, std::move(message)});
    }
  };
  auto trim = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::size_t colon = trimmed.find(':');
    if (colon == std::string::npos) {
      note("expected `theme: phrase`");
      continue;
    }
    auto theme = theme_from(trim(trimmed.substr(0, colon)));
    std::string phrase = trim(trimmed.substr(colon + 1));
    if (!theme) {
      note("unknown theme '" + trim(trimmed.substr(0, colon)) + "'");
      continue;
    }
    if (phrase.empty()) {
      note("empty phrase");
      continue;
    }
    rules.push_back({*theme, std::move(phrase)});
  }
  return rules;
}

InterventionReport intervention_report(std::span<const SessionLogRecord> records,
                                       std::span<const ThemeRule> rules,
                                       const StatsOptions& options) {
  InterventionReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SessionLogRecord& record = records[i];
    if (record.role != Role::USER) continue;
    if (has_prefix(record.text, options.automated_prompt_prefix)) continue;
    report.manual_total += 1;
    std::string lowered = lowercase(record.text);
    bool matched = false;
    for (const ThemeRule& rule : rules) {
      if (lowered.find(lowercase(rule.phrase)) == std::string::npos) continue;
      report.themed[rule.theme].push_back({i, rule.phrase});
      matched = true;
      break;
    }
    if (!matched) report.themed[Theme::OTHER].push_back({i, ""});
  }
  return report;
}

}  // namespace proofforge
