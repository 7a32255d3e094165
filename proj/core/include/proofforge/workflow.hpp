#ifndef PROOFFORGE_WORKFLOW_HPP
#define PROOFFORGE_WORKFLOW_HPP

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "proofforge/backend.hpp"
#include "proofforge/theory.hpp"

namespace proofforge {

enum class SiteStatus {
  PENDING,
  ANNOTATED,
  SUGGESTED,
  RESOLVED,
  NEEDS_DECOMPOSITION,
};

std::string_view to_string(SiteStatus status);

struct SorrySite {
  GoalId goal;
  std::string goal_text;
  std::vector<std::string> context_facts;  // using-facts plus earlier sibling labels
  SiteStatus status = SiteStatus::PENDING;
  std::vector<SuggestionRecord> suggestions;  // fastest first
  bool abandoned = false;  // decomposition declined; never retried

  bool operator==(const SorrySite&) const = default;
};

struct SkeletonViolation {
  GoalId goal;
  TacticCall offending_method;
  std::string rule_text;

  bool operator==(const SkeletonViolation&) const = default;
};

struct HistoryEvent {
  int iteration = 0;
  GoalId site;
  std::string action;   // annotate | harvest | substitute | decompose
  std::string outcome;

  bool operator==(const HistoryEvent&) const = default;
};

struct WorkflowState {
  std::vector<TheoryDocument> documents;
  std::vector<SorrySite> sites;
  int iteration = 0;
  std::vector<HistoryEvent> history;  // append-only
  Millis total_check_ms = 0;
  std::vector<SkeletonViolation> violations;
  std::vector<CheckResult> verified;  // every PROVED re-check, for auditing
};

// New-code discipline: within `new_region` (whole document when absent) every
// closing method must be `sorry`. Each offender yields one violation naming
// the prohibited method.
std::vector<SkeletonViolation> validate_skeleton(const TheoryDocument& doc,
                                                 std::optional<LineSpan> new_region = std::nullopt);

// All placeholder sites in document order, status PENDING.
std::vector<SorrySite> locate_sorries(std::span<const TheoryDocument> docs);

// Attaches a suggestion-harvest directive to every listed site; idempotent.
// Throws GoalNotFound when a site does not resolve to a sorry step.
TheoryDocument annotate_sorries(const TheoryDocument& doc, std::span<const SorrySite> sites,
                                int timeout_s);

// Pluggable goal decomposition. Returns replacement step lines, or nullopt /
// empty to decline. Lines are either full step lines (must close with sorry)
// or bare subgoal texts (wrapped as labelled `have ... sorry` steps).
class Decomposer {
 public:
  virtual ~Decomposer() = default;
  virtual std::optional<std::vector<std::string>> decompose(const std::string& goal_text) = 0;
};

// Splits top-level conjunctions; declines anything with a top-level
// implication, disjunction or equivalence.
class ConjunctionDecomposer : public Decomposer {
 public:
  std::optional<std::vector<std::string>> decompose(const std::string& goal_text) override;
};

// Feeds the goal text on stdin to a shell command; one output line per
// subgoal, empty output declines.
class CommandDecomposer : public Decomposer {
 public:
  explicit CommandDecomposer(std::string shell_command, Millis timeout_ms = 30000);
  std::optional<std::vector<std::string>> decompose(const std::string& goal_text) override;

 private:
  std::string shell_command_;
  Millis timeout_ms_;
};

struct WorkflowConfig {
  int hammer_timeout_s = 10;
  unsigned workers = 4;
  int max_iterations = 20;
  // Suggestions already on disk (earlier harvests); consulted before the
  // backend is asked.
  std::vector<SuggestionRecord> preloaded_suggestions;

  Millis per_goal_timeout_ms() const { return static_cast<Millis>(hammer_timeout_s) * 1000; }
};

// Phase hooks for instrumentation; called after every phase with the state.
using WorkflowObserver = std::function<void(const WorkflowState&, std::string_view phase)>;

// One bulk hammer pass over annotated sites. Sites with at least one
// suggestion become SUGGESTED, the rest NEEDS_DECOMPOSITION. A transport
// error aborts the phase with no status changes.
void harvest(WorkflowState& state, ProverBackend& backend, const WorkflowConfig& config);

// Re-checks candidates fastest-first and installs the first proved method,
// removing the harvest directive. Sites whose candidates all fail fall back
// to NEEDS_DECOMPOSITION. Mutated documents re-serialize and re-parse.
void substitute(WorkflowState& state, ProverBackend& backend, const WorkflowConfig& config);

// Replaces the site's sorry with a proof block of sorry-only substeps.
// Returns false when the decomposer declines (the site is abandoned).
bool decompose_site(WorkflowState& state, std::size_t site_index, Decomposer& decomposer);

struct RunReport {
  std::vector<GoalId> resolved;
  std::vector<GoalId> unresolved;
  int iterations = 0;
  Millis total_check_ms = 0;
  std::vector<SkeletonViolation> violations;
  bool success = false;
};

// Full annotate -> harvest -> substitute -> decompose loop, to quiescence or
// max_iterations. On success the returned documents contain no sorries.
std::pair<std::vector<TheoryDocument>, RunReport> run_to_zero(
    std::vector<TheoryDocument> documents, ProverBackend& backend, Decomposer* decomposer,
    const WorkflowConfig& config, WorkflowState* final_state = nullptr,
    const WorkflowObserver& observer = {});

}  // namespace proofforge

#endif  // PROOFFORGE_WORKFLOW_HPP
