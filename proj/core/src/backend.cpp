#include "proofforge/backend.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <istream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

namespace proofforge {

std::string GoalId::to_string() const {
  std::string out = file + "#" + block + "#";
  for (std::size_t i = 0; i < step_path.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(step_path[i]);
  }
  return out;
}

std::optional<GoalId> GoalId::parse(std::string_view text) {
  std::size_t first = text.find('#');
  if (first == std::string_view::npos) return std::nullopt;
  std::size_t second = text.find('#', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  GoalId goal;
  goal.file = std::string(text.substr(0, first));
  goal.block = std::string(text.substr(first + 1, second - first - 1));
  std::string_view path = text.substr(second + 1);
  if (path.empty()) return std::nullopt;
  std::size_t begin = 0;
  while (begin <= path.size()) {
    std::size_t dot = path.find('.', begin);
    std::string_view part =
        path.substr(begin, dot == std::string_view::npos ? std::string_view::npos : dot - begin);
    if (part.empty()) return std::nullopt;
    int value = 0;
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      value = value * 10 + (c - '0');
    }
    goal.step_path.push_back(value);
    if (dot == std::string_view::npos) break;
    begin = dot + 1;
  }
  return goal;
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::PROVED: return "proved";
    case CheckStatus::FAILED: return "failed";
    case CheckStatus::TIMEOUT: return "timeout";
  }
  return "failed";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::HAMMER: return "hammer";
    case Provenance::SWAP_RULE: return "swap_rule";
    case Provenance::MANUAL: return "manual";
  }
  return "hammer";
}

std::optional<Provenance> provenance_from(std::string_view text) {
  if (text == "hammer") return Provenance::HAMMER;
  if (text == "swap_rule") return Provenance::SWAP_RULE;
  if (text == "manual") return Provenance::MANUAL;
  return std::nullopt;
}

GoalNotFound::GoalNotFound(const GoalId& goal)
    : std::runtime_error("goal not found: " + goal.to_string()) {}

std::string goal_text_for(const TheoryDocument& doc, const GoalId& goal) {
  if (doc.name != goal.file) throw GoalNotFound(goal);
  const ProofStep* step = find_step(doc, goal.block, goal.step_path);
  if (step == nullptr) throw GoalNotFound(goal);
  switch (step->kind) {
    case StepKind::HAVE:
    case StepKind::SHOW:
    case StepKind::OBTAIN:
      if (!step->goal_text) throw GoalNotFound(goal);
      return *step->goal_text;
    case StepKind::TERMINAL: {
      const Block* block = find_block(doc, goal.block);
      if (block == nullptr) throw GoalNotFound(goal);
      return block->shows_text;
    }
    default:
      throw GoalNotFound(goal);
  }
}

const TheoryDocument* find_document(std::span<const TheoryDocument> docs, std::string_view name) {
  for (const TheoryDocument& doc : docs) {
    if (doc.name == name) return &doc;
  }
  return nullptr;
}

namespace {

std::string head_name_of(std::string_view method_text) {
  if (auto call = TacticCall::parse(method_text)) return call->head_name();
  return std::string(method_text);
}

}  // namespace

void MockProverBackend::add(std::string goal_text, const TacticCall& method, Entry entry) {
  if (entry.method_text.empty()) entry.method_text = method.raw_text;
  table_[{std::move(goal_text), method.head_name()}] = std::move(entry);
}

void MockProverBackend::add(std::string goal_text, std::string_view method_text,
                            CheckStatus verdict, Millis cost_ms, bool stale) {
  Entry entry;
  entry.verdict = verdict;
  entry.cost_ms = cost_ms;
  entry.stale = stale;
  entry.method_text = std::string(method_text);
  table_[{std::move(goal_text), head_name_of(method_text)}] = std::move(entry);
}

CheckResult MockProverBackend::check(const TheoryDocument& doc, const GoalId& goal,
                                     const TacticCall& method, Millis timeout_ms) {
  ++check_calls_;
  CheckResult result;
  result.goal = goal;
  result.method_tried = method;
  std::string text = goal_text_for(doc, goal);
  if (method.is_sorry()) {
    result.status = CheckStatus::PROVED;
    result.elapsed_ms = 0;
    return result;
  }
  auto it = table_.find({text, method.head_name()});
  if (it == table_.end()) {
    result.status = CheckStatus::FAILED;
    result.elapsed_ms = 0;
    return result;
  }
  const Entry& entry = it->second;
  if (entry.cost_ms > timeout_ms) {
    result.status = CheckStatus::TIMEOUT;
    result.elapsed_ms = timeout_ms;
    return result;
  }
  result.status = entry.stale ? CheckStatus::FAILED : entry.verdict;
  result.elapsed_ms = entry.cost_ms;
  return result;
}

std::vector<SuggestionRecord> MockProverBackend::suggest(const TheoryDocument& doc,
                                                         const GoalId& goal, Millis timeout_ms) {
  ++suggest_calls_;
  std::string text = goal_text_for(doc, goal);
  std::vector<SuggestionRecord> out;
  for (const auto& [key, entry] : table_) {
    if (key.first != text) continue;
    bool offered = entry.verdict == CheckStatus::PROVED || entry.stale;
    if (!offered || entry.cost_ms > timeout_ms) continue;
    SuggestionRecord record;
    record.goal = goal;
    record.method_text = entry.method_text;
    record.elapsed_ms = entry.cost_ms;
    record.provenance = Provenance::HAMMER;
    out.push_back(std::move(record));
  }
  return out;
}

MockProverBackend MockProverBackend::from_jsonl(std::istream& in,
                                                std::vector<ParseDiagnostic>* diagnostics) {
  MockProverBackend backend;
  std::string line;
  int line_no = 0;
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
      note("malformed fixture row");
      continue;
    }
    if (!row.contains("goal") || !row["goal"].is_string() || !row.contains("method") ||
        !row["method"].is_string() || !row.contains("ms") || !row["ms"].is_number_integer()) {
      note("fixture row is missing goal/method/ms");
      continue;
    }
    CheckStatus verdict = CheckStatus::PROVED;
    if (row.contains("verdict")) {
      std::string v = row["verdict"].get<std::string>();
      if (v == "proved") {
        verdict = CheckStatus::PROVED;
      } else if (v == "failed") {
        verdict = CheckStatus::FAILED;
      } else {
        note("unknown verdict '" + v + "'");
        continue;
      }
    }
    bool stale = row.value("stale", false);
    backend.add(row["goal"].get<std::string>(), row["method"].get<std::string>(), verdict,
                row["ms"].get<Millis>(), stale);
  }
  return backend;
}

std::vector<SuggestionRecord> hammer(ProverBackend& backend, std::span<const TheoryDocument> docs,
                                     std::span<const GoalId> goals, Millis per_goal_timeout_ms,
                                     unsigned workers) {
  std::vector<std::vector<SuggestionRecord>> buckets(goals.size());
  if (!goals.empty()) {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= goals.size()) return;
        try {
          const TheoryDocument* doc = find_document(docs, goals[i].file);
          if (doc == nullptr) throw GoalNotFound(goals[i]);
          buckets[i] = backend.suggest(*doc, goals[i], per_goal_timeout_ms);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(goals.size())));
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<SuggestionRecord> merged;
  for (auto& bucket : buckets) {
    merged.insert(merged.end(), std::make_move_iterator(bucket.begin()),
                  std::make_move_iterator(bucket.end()));
  }
  std::sort(merged.begin(), merged.end(), [](const SuggestionRecord& a, const SuggestionRecord& b) {
    if (a.goal != b.goal) return a.goal < b.goal;
    if (a.elapsed_ms != b.elapsed_ms) return a.elapsed_ms < b.elapsed_ms;
    if (a.method_text.size() != b.method_text.size()) {
      return a.method_text.size() < b.method_text.size();
    }
    if (a.method_text != b.method_text) return a.method_text < b.method_text;
    return static_cast<int>(a.provenance) < static_cast<int>(b.provenance);
  });
  return merged;
}

std::string suggestions_to_jsonl(std::span<const SuggestionRecord> records) {
  std::string out;
  for (const SuggestionRecord& record : records) {
    nlohmann::ordered_json row;
    row["goal"] = record.goal.to_string();
    row["method"] = record.method_text;
    row["ms"] = record.elapsed_ms;
    row["prov"] = std::string(to_string(record.provenance));
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<SuggestionRecord> suggestions_from_jsonl(std::istream& in,
                                                     std::vector<ParseDiagnostic>* diagnostics) {
  std::vector<SuggestionRecord> records;
  std::string line;
  int line_no = 0;
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
      note("malformed suggestion row");
      continue;
    }
    if (!row.contains("goal") || !row["goal"].is_string() || !row.contains("method") ||
        !row["method"].is_string() || !row.contains("ms") || !row["ms"].is_number_integer()) {
      note("suggestion row is missing goal/method/ms");
      continue;
    }
    auto goal = GoalId::parse(row["goal"].get<std::string>());
    if (!goal) {
      note("suggestion row has a malformed goal id");
      continue;
    }
    SuggestionRecord record;
    record.goal = std::move(*goal);
    record.method_text = row["method"].get<std::string>();
    record.elapsed_ms = row["ms"].get<Millis>();
    record.provenance = Provenance::HAMMER;
    if (row.contains("prov") && row["prov"].is_string()) {
      if (auto prov = provenance_from(row["prov"].get<std::string>())) {
        record.provenance = *prov;
      } else {
        note("unknown provenance '" + row["prov"].get<std::string>() + "'");
        continue;
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace proofforge
