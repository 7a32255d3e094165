#ifndef PROOFFORGE_PROFILER_HPP
#define PROOFFORGE_PROFILER_HPP

#include <span>
#include <string>
#include <vector>

#include "proofforge/backend.hpp"
#include "proofforge/theory.hpp"

namespace proofforge {

struct TimingEntry {
  GoalId goal;
  std::string method_head;
  Millis elapsed_ms = 0;

  bool operator==(const TimingEntry&) const = default;
};

struct TimingProfile {
  std::vector<TimingEntry> entries;  // proved steps only, document order
  Millis total_ms = 0;
  Millis slow_threshold_ms = 2000;
  std::vector<GoalId> slow;  // entries with elapsed strictly above threshold

  bool operator==(const TimingProfile&) const = default;
};

struct ProfileOptions {
  Millis check_timeout_ms = 30000;
  Millis slow_threshold_ms = 2000;
  unsigned workers = 4;
};

struct ProfileResult {
  TimingProfile profile;
  std::vector<GoalId> skipped_sorries;   // placeholders are not timed
  std::vector<CheckResult> regressions;  // steps that failed or timed out
};

// Re-checks every closed step and reports per-step timings. Failed or
// timed-out steps are regressions and excluded from totals.
ProfileResult profile_corpus(std::span<const TheoryDocument> docs, ProverBackend& backend,
                             const ProfileOptions& options = {});

// True when the goal contains no equality token ('=' outside quotes is the
// signal; Unicode inequality and iff tokens also count as equality).
bool is_equality_free(std::string_view goal_text);

struct SwapProposal {
  GoalId goal;
  MethodHead from_head = MethodHead::METIS;
  MethodHead to_head = MethodHead::MESON;
  bool verified = false;
  Millis old_ms = 0;
  Millis new_ms = 0;

  bool operator==(const SwapProposal&) const = default;
};

struct SwapOptions {
  std::vector<MethodHead> swap_from = {MethodHead::METIS};
  MethodHead swap_to = MethodHead::MESON;
  Millis check_timeout_ms = 30000;
};

// For each slow entry whose head is swappable and whose goal is
// equality-free, re-checks the goal with the target head and proposes the
// swap; proposals that did not prove come back unverified.
std::vector<SwapProposal> propose_swaps(const TimingProfile& profile,
                                        std::span<const TheoryDocument> docs,
                                        ProverBackend& backend, const SwapOptions& options = {});

// Applies proposals that are verified and strictly faster. Returns the
// number of steps rewritten; documents re-serialize canonically.
int apply_swaps(std::span<TheoryDocument> docs, std::span<const SwapProposal> proposals);

struct BudgetCheck {
  bool pass = false;
  Millis margin_ms = 0;  // budget - total; negative when over budget

  bool operator==(const BudgetCheck&) const = default;
};

BudgetCheck budget_check(const TimingProfile& profile, Millis budget_ms);

}  // namespace proofforge

#endif  // PROOFFORGE_PROFILER_HPP
