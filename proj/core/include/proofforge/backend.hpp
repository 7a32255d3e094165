#ifndef PROOFFORGE_BACKEND_HPP
#define PROOFFORGE_BACKEND_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "proofforge/parser.hpp"
#include "proofforge/theory.hpp"

namespace proofforge {

// Stable identity of one proof obligation: document name, block name and the
// child-index path of the step. Text form "file#block#0.1".
struct GoalId {
  std::string file;
  std::string block;
  std::vector<int> step_path;

  std::string to_string() const;
  static std::optional<GoalId> parse(std::string_view text);

  auto operator<=>(const GoalId&) const = default;
};

enum class CheckStatus {
  PROVED,
  FAILED,
  TIMEOUT,
};

std::string_view to_string(CheckStatus status);

struct CheckResult {
  GoalId goal;
  CheckStatus status = CheckStatus::FAILED;
  TacticCall method_tried;
  Millis elapsed_ms = 0;

  bool operator==(const CheckResult&) const = default;
};

enum class Provenance {
  HAMMER,
  SWAP_RULE,
  MANUAL,
};

std::string_view to_string(Provenance provenance);
std::optional<Provenance> provenance_from(std::string_view text);

struct SuggestionRecord {
  GoalId goal;
  std::string method_text;  // e.g. "by (metis closed_Un)"
  Millis elapsed_ms = 0;
  Provenance provenance = Provenance::HAMMER;

  bool operator==(const SuggestionRecord&) const = default;
};

struct GoalNotFound : std::runtime_error {
  explicit GoalNotFound(const GoalId& goal);
};

// Raised when an external adapter cannot be reached at all (as opposed to a
// reachable prover that fails the goal).
struct TransportError : std::runtime_error {
  int exit_status;
  TransportError(std::string message, int exit_status_in)
      : std::runtime_error(std::move(message)), exit_status(exit_status_in) {}
};

// Resolves the goal text a check runs against: the step's stated goal, or the
// enclosing block's shows-clause for terminal steps. Throws GoalNotFound.
std::string goal_text_for(const TheoryDocument& doc, const GoalId& goal);
const TheoryDocument* find_document(std::span<const TheoryDocument> docs, std::string_view name);

// Implementations must be safe to call from multiple threads at once.
class ProverBackend {
 public:
  virtual ~ProverBackend() = default;
  virtual CheckResult check(const TheoryDocument& doc, const GoalId& goal,
                            const TacticCall& method, Millis timeout_ms) = 0;
  virtual std::vector<SuggestionRecord> suggest(const TheoryDocument& doc, const GoalId& goal,
                                                Millis timeout_ms) = 0;
};

// Scripted backend driven by a (goal text, method head) -> outcome table.
// Goals without an entry fail in zero time; `sorry` always checks as proved.
// Costs above the timeout surface as TIMEOUT with elapsed == timeout.
class MockProverBackend : public ProverBackend {
 public:
  struct Entry {
    CheckStatus verdict = CheckStatus::PROVED;
    Millis cost_ms = 0;
    bool stale = false;  // suggested once, no longer replays
    std::string method_text;
  };

  MockProverBackend() = default;
  // Movable for factory returns; counters carry over (atomics copy by value).
  MockProverBackend(MockProverBackend&& other) noexcept
      : table_(std::move(other.table_)),
        check_calls_(other.check_calls_.load()),
        suggest_calls_(other.suggest_calls_.load()) {}
  MockProverBackend& operator=(MockProverBackend&& other) noexcept {
    table_ = std::move(other.table_);
    check_calls_ = other.check_calls_.load();
    suggest_calls_ = other.suggest_calls_.load();
    return *this;
  }

  void add(std::string goal_text, const TacticCall& method, Entry entry);
  void add(std::string goal_text, std::string_view method_text, CheckStatus verdict, Millis cost_ms,
           bool stale = false);

  CheckResult check(const TheoryDocument& doc, const GoalId& goal, const TacticCall& method,
                    Millis timeout_ms) override;
  std::vector<SuggestionRecord> suggest(const TheoryDocument& doc, const GoalId& goal,
                                        Millis timeout_ms) override;

  // Fixture rows, one JSON object per line:
  //   {"goal": "...", "method": "by blast", "verdict": "proved", "ms": 40, "stale": false}
  static MockProverBackend from_jsonl(std::istream& in,
                                      std::vector<ParseDiagnostic>* diagnostics = nullptr);

  std::int64_t check_calls() const { return check_calls_.load(); }
  std::int64_t suggest_calls() const { return suggest_calls_.load(); }

 private:
  // The table is fixed after setup; only the call counters mutate under
  // concurrent use.
  std::map<std::pair<std::string, std::string>, Entry> table_;
  std::atomic<std::int64_t> check_calls_{0};
  std::atomic<std::int64_t> suggest_calls_{0};
};

// Bulk suggestion harvest: fans the goals out over `workers` threads against
// one backend and returns a deterministic merge ordered by (goal, elapsed,
// method text), independent of worker count and completion order.
std::vector<SuggestionRecord> hammer(ProverBackend& backend,
                                     std::span<const TheoryDocument> docs,
                                     std::span<const GoalId> goals, Millis per_goal_timeout_ms,
                                     unsigned workers);

// Suggestion interchange, one JSON object per line:
//   {"goal": "<file>#<block>#<path>", "method": "by simp", "ms": 95, "prov": "hammer"}
std::string suggestions_to_jsonl(std::span<const SuggestionRecord> records);
std::vector<SuggestionRecord> suggestions_from_jsonl(
    std::istream& in, std::vector<ParseDiagnostic>* diagnostics = nullptr);

}  // namespace proofforge

#endif  // PROOFFORGE_BACKEND_HPP
