#include "proofforge/reports.hpp"

#include <iomanip>
#include <sstream>

namespace proofforge {

Json report_envelope(std::string_view kind, Json payload) {
  Json envelope;
  envelope["schema_version"] = kSchemaVersion;
  envelope["kind"] = std::string(kind);
  envelope["payload"] = std::move(payload);
  return envelope;
}

Json to_json(const ParseDiagnostic& diagnostic) {
  return Json{{"line", diagnostic.line},
              {"column", diagnostic.column},
              {"severity", diagnostic.severity == Severity::ERROR ? "error" : "warning"},
              {"message", diagnostic.message}};
}

Json to_json(const TacticCensus& census) {
  // Flat keys: `blast` ... `unfolding` are the published names.
  Json out = Json::object();
  for (std::size_t i = 0; i < kTacticCategoryCount; ++i) {
    out[std::string(category_name(static_cast<TacticCategory>(i)))] = census.counts[i];
  }
  out["unfolding"] = census.unfolding_count;
  out["total"] = census.total();
  return out;
}

Json to_json(const StructureCensus& census) {
  return Json{{"have", census.have_count},
              {"show", census.show_count},
              {"obtain", census.obtain_count},
              {"proof_block", census.proof_block_count}};
}

Json to_json(const ProofSizeReport& report) {
  Json rows = Json::array();
  for (const ProofSizeEntry& entry : report.per_result) {
    rows.push_back(Json{{"result", entry.result_name},
                        {"section", entry.section},
                        {"direct_lines", entry.direct_lines},
                        {"section_lines", entry.section_lines},
                        {"helper_count", entry.helper_count}});
  }
  Json out{{"results", std::move(rows)},
           {"total_results", report.total_results},
           {"total_helpers", report.total_helpers}};
  if (report.helper_ratio) out["helper_ratio"] = *report.helper_ratio;
  if (!report.orphan_diagnostics.empty()) out["orphans"] = report.orphan_diagnostics;
  return out;
}

Json to_json(const SorrySite& site) {
  Json out{{"goal", site.goal.to_string()},
           {"goal_text", site.goal_text},
           {"context", site.context_facts},
           {"status", std::string(to_string(site.status))}};
  if (site.abandoned) out["abandoned"] = true;
  if (!site.suggestions.empty()) {
    Json suggestions = Json::array();
    for (const SuggestionRecord& record : site.suggestions) suggestions.push_back(to_json(record));
    out["suggestions"] = std::move(suggestions);
  }
  return out;
}

Json to_json(const SuggestionRecord& record) {
  return Json{{"goal", record.goal.to_string()},
              {"method", record.method_text},
              {"ms", record.elapsed_ms},
              {"prov", std::string(to_string(record.provenance))}};
}

Json to_json(const SkeletonViolation& violation) {
  return Json{{"goal", violation.goal.to_string()},
              {"method", violation.offending_method.raw_text},
              {"rule", violation.rule_text}};
}

Json to_json(const RunReport& report) {
  Json resolved = Json::array();
  for (const GoalId& goal : report.resolved) resolved.push_back(goal.to_string());
  Json unresolved = Json::array();
  for (const GoalId& goal : report.unresolved) unresolved.push_back(goal.to_string());
  Json violations = Json::array();
  for (const SkeletonViolation& violation : report.violations) {
    violations.push_back(to_json(violation));
  }
  return Json{{"resolved", std::move(resolved)},
              {"unresolved", std::move(unresolved)},
              {"iterations", report.iterations},
              {"total_check_ms", report.total_check_ms},
              {"violations", std::move(violations)},
              {"success", report.success}};
}

Json to_json(const TimingProfile& profile) {
  Json entries = Json::array();
  for (const TimingEntry& entry : profile.entries) {
    entries.push_back(Json{{"goal", entry.goal.to_string()},
                           {"method", entry.method_head},
                           {"ms", entry.elapsed_ms}});
  }
  Json slow = Json::array();
  for (const GoalId& goal : profile.slow) slow.push_back(goal.to_string());
  return Json{{"entries", std::move(entries)},
              {"total_ms", profile.total_ms},
              {"slow_threshold_ms", profile.slow_threshold_ms},
              {"slow", std::move(slow)}};
}

Json to_json(const ProfileResult& result, const BudgetCheck* budget) {
  // Flat layout: `entries`, `total_ms`, `slow`, `budget_pass` are the published names.
  Json out = to_json(result.profile);
  Json skipped = Json::array();
  for (const GoalId& goal : result.skipped_sorries) skipped.push_back(goal.to_string());
  out["skipped_sorries"] = std::move(skipped);
  Json regressions = Json::array();
  for (const CheckResult& check : result.regressions) {
    regressions.push_back(Json{{"goal", check.goal.to_string()},
                               {"status", std::string(to_string(check.status))},
                               {"method", check.method_tried.raw_text},
                               {"ms", check.elapsed_ms}});
  }
  out["regressions"] = std::move(regressions);
  if (budget != nullptr) {
    out["budget_pass"] = budget->pass;
    out["budget_margin_ms"] = budget->margin_ms;
  }
  return out;
}

Json to_json(const SwapProposal& proposal) {
  return Json{{"goal", proposal.goal.to_string()},
              {"from", std::string(to_keyword(proposal.from_head))},
              {"to", std::string(to_keyword(proposal.to_head))},
              {"verified", proposal.verified},
              {"old_ms", proposal.old_ms},
              {"new_ms", proposal.new_ms}};
}

Json to_json(const SplitPlan& plan) {
  Json units = Json::array();
  for (const BuildUnit& unit : plan.units) {
    units.push_back(Json{{"name", unit.name},
                         {"build_ms", unit.build_ms},
                         {"edit_weight", unit.edit_weight}});
  }
  return Json{{"units", std::move(units)},
              {"cut_index", plan.cut_index},
              {"expected_incremental_ms", plan.expected_incremental_ms}};
}

Json to_json(const SessionStats& stats) {
  Json out{{"assistant_msgs", stats.assistant_msgs},
           {"user_msgs", stats.user_msgs},
           {"automated_prompts", stats.automated_prompts},
           {"manual_msgs", stats.manual_msgs},
           {"bash_calls", stats.bash_calls},
           {"build_cmds", stats.build_cmds},
           {"process_theories_cmds", stats.process_theories_cmds},
           {"edits", stats.edits},
           {"reads", stats.reads},
           {"session_count", stats.sessions.size()}};
  if (stats.automation_ratio) out["automation_ratio"] = *stats.automation_ratio;
  if (stats.duration_median_min) out["duration_median_min"] = *stats.duration_median_min;
  if (stats.duration_mean_min) out["duration_mean_min"] = *stats.duration_mean_min;
  if (stats.duration_max_min) out["duration_max_min"] = *stats.duration_max_min;
  return out;
}

Json to_json(const InterventionReport& report) {
  Json themes = Json::object();
  for (const auto& [theme, matches] : report.themed) {
    Json rows = Json::array();
    for (const InterventionMatch& match : matches) {
      rows.push_back(Json{{"record", match.record_index}, {"phrase", match.matched_phrase}});
    }
    themes[std::string(to_string(theme))] = std::move(rows);
  }
  return Json{{"manual_total", report.manual_total}, {"themes", std::move(themes)}};
}

namespace {

constexpr int kLabelWidth = 24;

void put_row(std::ostringstream& out, std::string_view label, std::int64_t value) {
  out << "  " << std::left << std::setw(kLabelWidth) << label << std::right << std::setw(10)
      << value << '\n';
}

void put_row(std::ostringstream& out, std::string_view label, const std::string& value) {
  out << "  " << std::left << std::setw(kLabelWidth) << label << value << '\n';
}

std::string fixed3(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << value;
  return out.str();
}

std::string fixed1(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << value;
  return out.str();
}

}  // namespace

std::string to_text(const TacticCensus& census) {
  std::ostringstream out;
  out << "tactic census\n";
  for (std::size_t i = 0; i < kTacticCategoryCount; ++i) {
    put_row(out, category_name(static_cast<TacticCategory>(i)), census.counts[i]);
  }
  put_row(out, "unfolding", census.unfolding_count);
  put_row(out, "total", census.total());
  return out.str();
}

std::string to_text(const StructureCensus& census) {
  std::ostringstream out;
  out << "structure census\n";
  put_row(out, "have", census.have_count);
  put_row(out, "show", census.show_count);
  put_row(out, "obtain", census.obtain_count);
  put_row(out, "proof blocks", census.proof_block_count);
  return out.str();
}

std::string to_text(const ProofSizeReport& report) {
  std::ostringstream out;
  std::size_t name_width = 6;
  for (const ProofSizeEntry& entry : report.per_result) {
    name_width = std::max(name_width, entry.result_name.size());
  }
  out << std::left << std::setw(static_cast<int>(name_width) + 2) << "result" << std::right
      << std::setw(8) << "section" << std::setw(8) << "direct" << std::setw(9) << "section"
      << std::setw(9) << "helpers" << '\n';
  for (const ProofSizeEntry& entry : report.per_result) {
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << entry.result_name
        << std::right << std::setw(8) << entry.section << std::setw(8) << entry.direct_lines
        << std::setw(9) << entry.section_lines << std::setw(9) << entry.helper_count << '\n';
  }
  out << "results " << report.total_results << ", helpers " << report.total_helpers;
  if (report.helper_ratio) out << ", helpers/result " << fixed3(*report.helper_ratio);
  out << '\n';
  for (const std::string& orphan : report.orphan_diagnostics) out << "orphan: " << orphan << '\n';
  return out.str();
}

std::string to_text(std::span<const SorrySite> sites) {
  std::ostringstream out;
  std::size_t goal_width = 4;
  std::vector<std::string> ids;
  ids.reserve(sites.size());
  for (const SorrySite& site : sites) {
    ids.push_back(site.goal.to_string());
    goal_width = std::max(goal_width, ids.back().size());
  }
  out << std::left << std::setw(static_cast<int>(goal_width) + 2) << "goal" << std::setw(22)
      << "status" << "text" << '\n';
  for (std::size_t i = 0; i < sites.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(goal_width) + 2) << ids[i] << std::setw(22)
        << to_string(sites[i].status) << sites[i].goal_text << '\n';
  }
  out << sites.size() << " placeholder(s)\n";
  return out.str();
}

std::string to_text(const RunReport& report) {
  std::ostringstream out;
  out << (report.success ? "workflow complete: zero placeholders remain\n"
                         : "workflow incomplete\n");
  put_row(out, "resolved", static_cast<std::int64_t>(report.resolved.size()));
  put_row(out, "unresolved", static_cast<std::int64_t>(report.unresolved.size()));
  put_row(out, "iterations", report.iterations);
  put_row(out, "total check ms", report.total_check_ms);
  for (const GoalId& goal : report.unresolved) out << "  unresolved: " << goal.to_string() << '\n';
  for (const SkeletonViolation& violation : report.violations) {
    out << "  violation: " << violation.goal.to_string() << " uses '"
        << violation.offending_method.raw_text << "'\n";
  }
  return out.str();
}

std::string to_text(const ProfileResult& result, const BudgetCheck* budget) {
  std::ostringstream out;
  std::size_t goal_width = 4;
  std::vector<std::string> ids;
  ids.reserve(result.profile.entries.size());
  for (const TimingEntry& entry : result.profile.entries) {
    ids.push_back(entry.goal.to_string());
    goal_width = std::max(goal_width, ids.back().size());
  }
  out << std::left << std::setw(static_cast<int>(goal_width) + 2) << "goal" << std::setw(12)
      << "method" << std::right << std::setw(10) << "ms" << '\n';
  for (std::size_t i = 0; i < result.profile.entries.size(); ++i) {
    const TimingEntry& entry = result.profile.entries[i];
    out << std::left << std::setw(static_cast<int>(goal_width) + 2) << ids[i] << std::setw(12)
        << entry.method_head << std::right << std::setw(10) << entry.elapsed_ms;
    if (entry.elapsed_ms > result.profile.slow_threshold_ms) out << "  slow";
    out << '\n';
  }
  put_row(out, "total ms", result.profile.total_ms);
  put_row(out, "slow steps", static_cast<std::int64_t>(result.profile.slow.size()));
  put_row(out, "skipped placeholders", static_cast<std::int64_t>(result.skipped_sorries.size()));
  for (const CheckResult& check : result.regressions) {
    out << "  regression: " << check.goal.to_string() << " (" << to_string(check.status) << ")\n";
  }
  if (budget != nullptr) {
    out << "budget " << (budget->pass ? "PASS" : "FAIL") << " (margin " << budget->margin_ms
        << " ms)\n";
  }
  return out.str();
}

std::string to_text(std::span<const SwapProposal> proposals) {
  std::ostringstream out;
  std::size_t goal_width = 4;
  std::vector<std::string> ids;
  ids.reserve(proposals.size());
  for (const SwapProposal& proposal : proposals) {
    ids.push_back(proposal.goal.to_string());
    goal_width = std::max(goal_width, ids.back().size());
  }
  out << std::left << std::setw(static_cast<int>(goal_width) + 2) << "goal" << std::setw(18)
      << "swap" << std::right << std::setw(10) << "old ms" << std::setw(10) << "new ms"
      << "  verified" << '\n';
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const SwapProposal& proposal = proposals[i];
    std::string swap = std::string(to_keyword(proposal.from_head)) + " -> " +
                       std::string(to_keyword(proposal.to_head));
    out << std::left << std::setw(static_cast<int>(goal_width) + 2) << ids[i] << std::setw(18)
        << swap << std::right << std::setw(10) << proposal.old_ms << std::setw(10)
        << proposal.new_ms << "  " << (proposal.verified ? "yes" : "no") << '\n';
  }
  out << proposals.size() << " proposal(s)\n";
  return out.str();
}

std::string to_text(const SplitPlan& plan) {
  std::ostringstream out;
  std::size_t name_width = 4;
  for (const BuildUnit& unit : plan.units) name_width = std::max(name_width, unit.name.size());
  out << std::left << std::setw(static_cast<int>(name_width) + 2) << "unit" << std::right
      << std::setw(10) << "build ms" << std::setw(10) << "weight" << "  side" << '\n';
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    const BuildUnit& unit = plan.units[i];
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << unit.name << std::right
        << std::setw(10) << unit.build_ms << std::setw(10) << fixed3(unit.edit_weight) << "  "
        << (i < plan.cut_index ? "frozen" : "live") << '\n';
  }
  out << "cut before index " << plan.cut_index << ", expected incremental "
      << fixed1(plan.expected_incremental_ms) << " ms\n";
  return out.str();
}

std::string to_text(const SessionStats& stats) {
  std::ostringstream out;
  out << "session statistics\n";
  put_row(out, "assistant msgs", stats.assistant_msgs);
  put_row(out, "user msgs", stats.user_msgs);
  put_row(out, "automated prompts", stats.automated_prompts);
  put_row(out, "manual msgs", stats.manual_msgs);
  if (stats.automation_ratio) {
    put_row(out, "automation ratio", fixed3(*stats.automation_ratio));
  }
  put_row(out, "bash calls", stats.bash_calls);
  put_row(out, "build cmds", stats.build_cmds);
  put_row(out, "process-theories cmds", stats.process_theories_cmds);
  put_row(out, "edits", stats.edits);
  put_row(out, "reads", stats.reads);
  put_row(out, "sessions", static_cast<std::int64_t>(stats.sessions.size()));
  if (stats.duration_median_min) {
    put_row(out, "median session min", fixed1(*stats.duration_median_min));
  }
  if (stats.duration_mean_min) put_row(out, "mean session min", fixed1(*stats.duration_mean_min));
  if (stats.duration_max_min) put_row(out, "max session min", fixed1(*stats.duration_max_min));
  return out.str();
}

std::string to_text(const InterventionReport& report) {
  std::ostringstream out;
  out << "manual interventions: " << report.manual_total << '\n';
  for (const auto& [theme, matches] : report.themed) {
    out << "  " << std::left << std::setw(kLabelWidth) << to_string(theme) << std::right
        << std::setw(6) << matches.size() << '\n';
  }
  return out.str();
}

}  // namespace proofforge
