#include "proofforge/profiler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "proofforge/parser.hpp"

namespace proofforge {

namespace {

struct ProfileJob {
  const TheoryDocument* doc;
  GoalId goal;
  const TacticCall* method;
};

std::vector<ProfileJob> closed_steps(std::span<const TheoryDocument> docs,
                                     std::vector<GoalId>& skipped_sorries) {
  std::vector<ProfileJob> jobs;
  for (const TheoryDocument& doc : docs) {
    for_each_step(doc, [&](const Block& block, const ProofStep& step, const std::vector<int>& path) {
      if (!step.method) return;
      GoalId goal{doc.name, block.name, path};
      if (step.method->is_sorry()) {
        skipped_sorries.push_back(std::move(goal));
        return;
      }
      jobs.push_back({&doc, std::move(goal), &*step.method});
    });
  }
  return jobs;
}

}  // namespace

ProfileResult profile_corpus(std::span<const TheoryDocument> docs, ProverBackend& backend,
                             const ProfileOptions& options) {
  ProfileResult result;
  result.profile.slow_threshold_ms = options.slow_threshold_ms;

  std::vector<ProfileJob> jobs = closed_steps(docs, result.skipped_sorries);
  std::vector<CheckResult> checks(jobs.size());
  if (!jobs.empty()) {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          checks[i] = backend.check(*jobs[i].doc, jobs[i].goal, *jobs[i].method,
                                    options.check_timeout_ms);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    unsigned n = std::max(1u, std::min<unsigned>(options.workers,
                                                 static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CheckResult& check = checks[i];
    if (check.status != CheckStatus::PROVED) {
      result.regressions.push_back(check);
      continue;
    }
    TimingEntry entry;
    entry.goal = jobs[i].goal;
    entry.method_head = jobs[i].method->head_name();
    entry.elapsed_ms = check.elapsed_ms;
    result.profile.total_ms += entry.elapsed_ms;
    if (entry.elapsed_ms > options.slow_threshold_ms) {
      result.profile.slow.push_back(entry.goal);
    }
    result.profile.entries.push_back(std::move(entry));
  }
  return result;
}

bool is_equality_free(std::string_view goal_text) {
  static constexpr std::string_view kNeq = "\xe2\x89\xa0";  // ≠
  static constexpr std::string_view kIff = "\xe2\x9f\xb7";  // ⟷
  bool in_quotes = false;
  for (std::size_t i = 0; i < goal_text.size(); ++i) {
    char c = goal_text[i];
    if (c == '"') {
      in_quotes = !in_quotes;
      continue;
    }
    if (in_quotes) continue;
    if (c == '=') return false;
    if (goal_text.compare(i, kNeq.size(), kNeq) == 0) return false;
    if (goal_text.compare(i, kIff.size(), kIff) == 0) return false;
  }
  return true;
}

std::vector<SwapProposal> propose_swaps(const TimingProfile& profile,
                                        std::span<const TheoryDocument> docs,
                                        ProverBackend& backend, const SwapOptions& options) {
  std::set<GoalId> slow(profile.slow.begin(), profile.slow.end());
  std::vector<SwapProposal> proposals;
  for (const TimingEntry& entry : profile.entries) {
    if (slow.count(entry.goal) == 0) continue;
    const TheoryDocument* doc = find_document(docs, entry.goal.file);
    if (doc == nullptr) continue;
    const ProofStep* step = find_step(*doc, entry.goal.block, entry.goal.step_path);
    if (step == nullptr || !step->method) continue;
    auto from = std::find_if(options.swap_from.begin(), options.swap_from.end(),
                             [&](MethodHead head) { return step->method->head == head; });
    if (from == options.swap_from.end()) continue;
    if (!is_equality_free(goal_text_for(*doc, entry.goal))) continue;

    TacticCall candidate = TacticCall::make(options.swap_to, step->method->arguments,
                                            step->method->unfolding_facts);
    CheckResult check = backend.check(*doc, entry.goal, candidate, options.check_timeout_ms);
    SwapProposal proposal;
    proposal.goal = entry.goal;
    proposal.from_head = *from;
    proposal.to_head = options.swap_to;
    proposal.verified = check.status == CheckStatus::PROVED;
    proposal.old_ms = entry.elapsed_ms;
    proposal.new_ms = check.elapsed_ms;
    proposals.push_back(std::move(proposal));
  }
  return proposals;
}

int apply_swaps(std::span<TheoryDocument> docs, std::span<const SwapProposal> proposals) {
  int applied = 0;
  std::set<std::string> touched;
  for (const SwapProposal& proposal : proposals) {
    if (!proposal.verified || proposal.new_ms >= proposal.old_ms) continue;
    TheoryDocument* doc = nullptr;
    for (TheoryDocument& candidate : docs) {
      if (candidate.name == proposal.goal.file) doc = &candidate;
    }
    if (doc == nullptr) continue;
    ProofStep* step = find_step(*doc, proposal.goal.block, proposal.goal.step_path);
    if (step == nullptr || !step->method || step->method->head != proposal.from_head) continue;
    step->method = TacticCall::make(proposal.to_head, step->method->arguments,
                                    step->method->unfolding_facts);
    touched.insert(doc->name);
    ++applied;
  }
  for (TheoryDocument& doc : docs) {
    if (touched.count(doc.name) > 0) refresh_layout(doc);
  }
  return applied;
}

BudgetCheck budget_check(const TimingProfile& profile, Millis budget_ms) {
  BudgetCheck check;
  check.margin_ms = budget_ms - profile.total_ms;
  check.pass = profile.total_ms <= budget_ms;
  return check;
}

}  // namespace proofforge
