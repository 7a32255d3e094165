#ifndef PROOFFORGE_LOG_ANALYZER_HPP
#define PROOFFORGE_LOG_ANALYZER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proofforge/parser.hpp"
#include "proofforge/theory.hpp"

namespace proofforge {

enum class Role {
  USER,
  ASSISTANT,
  SYSTEM,
};

std::string_view to_string(Role role);
std::optional<Role> role_from(std::string_view text);

enum class ToolKind {
  BASH,
  EDIT,
  READ,
  OTHER,
};

std::string_view to_string(ToolKind kind);

struct ToolCall {
  ToolKind kind = ToolKind::OTHER;
  std::string payload;

  bool operator==(const ToolCall&) const = default;
};

struct SessionLogRecord {
  Millis timestamp_ms = 0;  // Unix epoch, UTC
  Role role = Role::SYSTEM;
  std::string text;
  std::vector<ToolCall> tool_calls;

  bool operator==(const SessionLogRecord&) const = default;
};

// Parses an ISO-8601 timestamp ("2025-06-01T08:00:00Z", optional fractional
// seconds and offset; no offset means UTC) to epoch milliseconds.
std::optional<Millis> parse_iso_timestamp(std::string_view text);

// Adapter for logs whose schema uses different field names.
struct LogFieldMap {
  std::string timestamp = "ts";
  std::string role = "role";
  std::string text = "text";
  std::string tools = "tools";
  std::string tool_kind = "kind";
  std::string tool_payload = "payload";
};

struct IngestOptions {
  LogFieldMap fields;
};

struct IngestResult {
  std::vector<SessionLogRecord> records;  // sorted by (timestamp, role, text)
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t lines_read = 0;
};

IngestResult ingest_log(std::istream& in, const IngestOptions& options = {});

// Streaming ingest: records go to the sink in file order, nothing is
// retained. Returns the number of well-formed records.
std::size_t ingest_log_stream(std::istream& in, const IngestOptions& options,
                              const std::function<void(SessionLogRecord&&)>& sink,
                              std::vector<ParseDiagnostic>* diagnostics = nullptr);

struct IngestCounts {
  std::size_t records = 0;
  std::size_t malformed = 0;
  std::size_t lines_read = 0;
};

// Count-only mode; memory stays flat regardless of log size.
IngestCounts ingest_log_count(std::istream& in, const IngestOptions& options = {});

struct SessionWindow {
  Millis start_ms = 0;
  Millis end_ms = 0;
  double duration_min = 0.0;

  bool operator==(const SessionWindow&) const = default;
};

struct StatsOptions {
  std::string automated_prompt_prefix = "Read CLAUDE.md";
  std::vector<std::string> build_prefixes = {"isabelle build"};
  std::vector<std::string> process_theories_prefixes = {"isabelle process_theories",
                                                        "process_theories"};
};

struct SessionStats {
  std::int64_t assistant_msgs = 0;
  std::int64_t user_msgs = 0;
  std::int64_t automated_prompts = 0;
  std::int64_t manual_msgs = 0;
  std::int64_t bash_calls = 0;
  std::int64_t build_cmds = 0;
  std::int64_t process_theories_cmds = 0;
  std::int64_t edits = 0;
  std::int64_t reads = 0;
  std::optional<double> automation_ratio;  // absent when no user messages
  std::vector<SessionWindow> sessions;
  std::optional<double> duration_median_min;
  std::optional<double> duration_mean_min;
  std::optional<double> duration_max_min;
};

// Records must be timestamp-sorted (ingest_log guarantees it). A session
// opens at each automated prompt and closes at the next user record or the
// end of the log.
SessionStats compute_stats(std::span<const SessionLogRecord> records,
                           const StatsOptions& options = {});

enum class Theme {
  TACTIC_EXPLOSION,
  INEFFICIENT_TOOLING,
  CHERRY_PICKING,
  RESOURCE_MANAGEMENT,
  OTHER,
};

std::string_view to_string(Theme theme);
std::optional<Theme> theme_from(std::string_view text);

struct ThemeRule {
  Theme theme = Theme::OTHER;
  std::string phrase;  // case-insensitive substring
};

// Built-in rules quoting the canonical correction phrases.
std::vector<ThemeRule> default_theme_rules();

// Rule file: one `theme: phrase` per line; '#' comments and blanks skipped.
std::vector<ThemeRule> load_theme_rules(std::istream& in,
                                        std::vector<ParseDiagnostic>* diagnostics = nullptr);

struct InterventionMatch {
  std::size_t record_index = 0;  // index into the ingested record span
  std::string matched_phrase;    // empty for OTHER

  bool operator==(const InterventionMatch&) const = default;
};

struct InterventionReport {
  std::map<Theme, std::vector<InterventionMatch>> themed;
  std::int64_t manual_total = 0;
};

// Classifies manual user messages (non-automated) by first matching rule in
// rule order; unmatched messages land in OTHER.
InterventionReport intervention_report(std::span<const SessionLogRecord> records,
                                       std::span<const ThemeRule> rules,
                                       const StatsOptions& options = {});

}  // namespace proofforge

#endif  // PROOFFORGE_LOG_ANALYZER_HPP
