#include "proofforge/workflow.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

#include "proofforge/command_backend.hpp"
#include "proofforge/parser.hpp"

namespace proofforge {

std::string_view to_string(SiteStatus status) {
  switch (status) {
    case SiteStatus::PENDING: return "pending";
    case SiteStatus::ANNOTATED: return "annotated";
    case SiteStatus::SUGGESTED: return "suggested";
    case SiteStatus::RESOLVED: return "resolved";
    case SiteStatus::NEEDS_DECOMPOSITION: return "needs_decomposition";
  }
  return "pending";
}

std::vector<SkeletonViolation> validate_skeleton(const TheoryDocument& doc,
                                                 std::optional<LineSpan> new_region) {
  std::vector<SkeletonViolation> violations;
  for_each_step(doc, [&](const Block& block, const ProofStep& step, const std::vector<int>& path) {
    if (!step.method || step.method->is_sorry()) return;
    if (new_region && !new_region->overlaps(step.span)) return;
    SkeletonViolation violation;
    violation.goal = {doc.name, block.name, path};
    violation.offending_method = *step.method;
    violation.rule_text =
        "new code must close every step with sorry, not '" + step.method->head_name() + "'";
    violations.push_back(std::move(violation));
  });
  return violations;
}

namespace {

// Walks children lists so sibling context (earlier labels) is available.
template <typename Fn>
void walk_with_siblings(const Block& block, const std::vector<ProofStep>& steps,
                        std::vector<int>& path, const Fn& fn) {
  for (int i = 0; i < static_cast<int>(steps.size()); ++i) {
    path.push_back(i);
    fn(block, steps, i, path);
    walk_with_siblings(block, steps[i].children, path, fn);
    path.pop_back();
  }
}

std::string site_goal_text(const TheoryDocument& doc, const Block& block, const ProofStep& step) {
  if (step.kind == StepKind::TERMINAL) return block.shows_text;
  return step.goal_text.value_or("");
}

void append_unique(std::vector<std::string>& facts, const std::string& fact) {
  if (std::find(facts.begin(), facts.end(), fact) == facts.end()) facts.push_back(fact);
}

TheoryDocument* find_document(std::vector<TheoryDocument>& docs, std::string_view name) {
  for (TheoryDocument& doc : docs) {
    if (doc.name == name) return &doc;
  }
  return nullptr;
}

void assert_canonical(const TheoryDocument& doc) {
  ParseResult reparsed = parse_theory(serialize(doc));
  if (!reparsed.ok() || !(*reparsed.document == doc)) {
    throw std::logic_error("document '" + doc.name + "' is no longer canonical after mutation");
  }
}

}  // namespace

std::vector<SorrySite> locate_sorries(std::span<const TheoryDocument> docs) {
  std::vector<SorrySite> sites;
  for (const TheoryDocument& doc : docs) {
    for (const Block& block : doc.blocks) {
      if (!block.proof) continue;
      std::vector<int> path;
      walk_with_siblings(
          block, block.proof->steps, path,
          [&](const Block& owner, const std::vector<ProofStep>& siblings, int index,
              const std::vector<int>& at) {
            const ProofStep& step = siblings[index];
            if (!step.method || !step.method->is_sorry()) return;
            SorrySite site;
            site.goal = {doc.name, owner.name, at};
            site.goal_text = site_goal_text(doc, owner, step);
            site.context_facts = step.using_facts;
            for (int j = 0; j < index; ++j) {
              if (siblings[j].label) append_unique(site.context_facts, *siblings[j].label);
            }
            site.status = SiteStatus::PENDING;
            sites.push_back(std::move(site));
          });
    }
  }
  return sites;
}

TheoryDocument annotate_sorries(const TheoryDocument& doc, std::span<const SorrySite> sites,
                                int timeout_s) {
  TheoryDocument out = doc;
  bool changed = false;
  for (const SorrySite& site : sites) {
    if (site.goal.file != out.name) continue;
    ProofStep* step = find_step(out, site.goal.block, site.goal.step_path);
    if (step == nullptr || !step->method || !step->method->is_sorry()) {
      throw GoalNotFound(site.goal);
    }
    if (step->hammer_timeout_s != timeout_s) {
      step->hammer_timeout_s = timeout_s;
      changed = true;
    }
  }
  if (changed) refresh_layout(out);
  return out;
}

void harvest(WorkflowState& state, ProverBackend& backend, const WorkflowConfig& config) {
  std::vector<std::size_t> annotated;
  for (std::size_t i = 0; i < state.sites.size(); ++i) {
    if (state.sites[i].status == SiteStatus::ANNOTATED) annotated.push_back(i);
  }
  if (annotated.empty()) return;

  // Preloaded suggestions satisfy a site without a backend call.
  std::map<GoalId, std::vector<SuggestionRecord>> preloaded;
  for (const SuggestionRecord& record : config.preloaded_suggestions) {
    preloaded[record.goal].push_back(record);
  }
  for (auto& [goal, records] : preloaded) {
    std::stable_sort(records.begin(), records.end(),
                     [](const SuggestionRecord& a, const SuggestionRecord& b) {
                       return a.elapsed_ms < b.elapsed_ms;
                     });
  }

  std::vector<GoalId> backend_goals;
  for (std::size_t i : annotated) {
    if (preloaded.find(state.sites[i].goal) == preloaded.end()) {
      backend_goals.push_back(state.sites[i].goal);
    }
  }

  // Exactly one bulk pass; a TransportError propagates before any state
  // mutation below.
  std::vector<SuggestionRecord> harvested;
  if (!backend_goals.empty()) {
    harvested = hammer(backend, state.documents, backend_goals, config.per_goal_timeout_ms(),
                       config.workers);
  }
  std::map<GoalId, std::vector<SuggestionRecord>> by_goal;
  for (SuggestionRecord& record : harvested) {
    state.total_check_ms += record.elapsed_ms;
    by_goal[record.goal].push_back(std::move(record));
  }

  for (std::size_t i : annotated) {
    SorrySite& site = state.sites[i];
    bool from_preload = false;
    if (auto it = preloaded.find(site.goal); it != preloaded.end()) {
      site.suggestions = it->second;
      from_preload = true;
    } else if (auto hit = by_goal.find(site.goal); hit != by_goal.end()) {
      site.suggestions = std::move(hit->second);
    } else {
      site.suggestions.clear();
    }
    std::ostringstream outcome;
    if (site.suggestions.empty()) {
      site.status = SiteStatus::NEEDS_DECOMPOSITION;
      outcome << "no candidates";
    } else {
      site.status = SiteStatus::SUGGESTED;
      outcome << site.suggestions.size() << " candidate(s)"
              << (from_preload ? " (preloaded)" : "");
    }
    state.history.push_back({state.iteration, site.goal, "harvest", outcome.str()});
  }
}

void substitute(WorkflowState& state, ProverBackend& backend, const WorkflowConfig& config) {
  std::set<std::string> touched;
  for (SorrySite& site : state.sites) {
    if (site.status != SiteStatus::SUGGESTED) continue;
    TheoryDocument* doc = find_document(state.documents, site.goal.file);
    if (doc == nullptr) throw GoalNotFound(site.goal);

    bool installed = false;
    for (const SuggestionRecord& candidate : site.suggestions) {
      auto call = TacticCall::parse(candidate.method_text);
      if (!call) {
        state.history.push_back(
            {state.iteration, site.goal, "substitute",
             "candidate is not a method: " + candidate.method_text});
        continue;
      }
      CheckResult result = backend.check(*doc, site.goal, *call, config.per_goal_timeout_ms());
      state.total_check_ms += result.elapsed_ms;
      if (result.status != CheckStatus::PROVED) continue;
      state.verified.push_back(result);
      ProofStep* step = find_step(*doc, site.goal.block, site.goal.step_path);
      if (step == nullptr) throw GoalNotFound(site.goal);
      step->method = *call;
      step->hammer_timeout_s.reset();
      touched.insert(doc->name);
      site.status = SiteStatus::RESOLVED;
      state.history.push_back(
          {state.iteration, site.goal, "substitute", "installed: " + call->raw_text});
      installed = true;
      break;
    }
    if (!installed) {
      site.status = SiteStatus::NEEDS_DECOMPOSITION;
      state.history.push_back(
          {state.iteration, site.goal, "substitute", "no candidate re-proved"});
    }
  }
  for (TheoryDocument& doc : state.documents) {
    if (touched.count(doc.name) == 0) continue;
    refresh_layout(doc);
    assert_canonical(doc);
  }
}

std::optional<std::vector<std::string>> ConjunctionDecomposer::decompose(
    const std::string& goal_text) {
  auto trim = [](std::string& t) {
    while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
  };
  // The whole goal sheds redundant wrapping parentheses; the split operands
  // keep their spelling verbatim.
  auto strip = [&trim](std::string s) {
    trim(s);
    for (;;) {
      if (s.size() < 2 || s.front() != '(' || s.back() != ')') return s;
      int depth = 0;
      bool wraps = true;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') {
          --depth;
          if (depth == 0 && i + 1 < s.size()) {
            wraps = false;
            break;
          }
        }
      }
      if (!wraps) return s;
      s = s.substr(1, s.size() - 2);
      trim(s);
    }
  };

  const std::string text = strip(goal_text);
  static const std::string kAnd = "\xe2\x88\xa7";      // ∧
  static const std::string kOr = "\xe2\x88\xa8";       // ∨
  static const std::string kImp = "\xe2\x9f\xb6";      // ⟶
  static const std::string kIff = "\xe2\x9f\xb7";      // ⟷
  int depth = 0;
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (depth != 0) continue;
    if (text.compare(i, kOr.size(), kOr) == 0 || text.compare(i, kImp.size(), kImp) == 0 ||
        text.compare(i, kIff.size(), kIff) == 0) {
      return std::nullopt;  // not a plain conjunction
    }
    if (text.compare(i, kAnd.size(), kAnd) == 0) cuts.push_back(i);
  }
  if (cuts.empty()) return std::nullopt;

  std::vector<std::string> parts;
  std::size_t begin = 0;
  auto add_part = [&](std::string part) {
    trim(part);
    parts.push_back(std::move(part));
  };
  for (std::size_t cut : cuts) {
    add_part(text.substr(begin, cut - begin));
    begin = cut + kAnd.size();
  }
  add_part(text.substr(begin));
  for (const std::string& part : parts) {
    if (part.empty()) return std::nullopt;
  }
  return parts;
}

CommandDecomposer::CommandDecomposer(std::string shell_command, Millis timeout_ms)
    : shell_command_(std::move(shell_command)), timeout_ms_(timeout_ms) {}

std::optional<std::vector<std::string>> CommandDecomposer::decompose(
    const std::string& goal_text) {
  SubprocessResult run = run_subprocess(shell_command_, goal_text + "\n", timeout_ms_);
  if (run.signalled || run.exit_status == 126 || run.exit_status == 127) {
    throw TransportError("decomposer command unreachable (status " +
                             std::to_string(run.exit_status) + ")",
                         run.exit_status);
  }
  if (run.timed_out || run.exit_status != 0) return std::nullopt;
  std::vector<std::string> lines;
  std::istringstream stream(run.output);
  std::string line;
  while (std::getline(stream, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) return std::nullopt;
  return lines;
}

namespace {

std::set<std::string> labels_in_block(const Block& block) {
  std::set<std::string> labels;
  if (!block.proof) return labels;
  std::vector<int> path;
  walk_with_siblings(block, block.proof->steps, path,
                     [&](const Block&, const std::vector<ProofStep>& siblings, int index,
                         const std::vector<int>&) {
                       if (siblings[index].label) labels.insert(*siblings[index].label);
                     });
  return labels;
}

bool starts_with_step_keyword(const std::string& line) {
  std::size_t at = line.find_first_not_of(" \t");
  if (at == std::string::npos) return false;
  for (std::string_view kw : {"have", "show", "obtain"}) {
    if (line.compare(at, kw.size(), kw) == 0) {
      std::size_t end = at + kw.size();
      if (end >= line.size() || line[end] == ' ' || line[end] == '\t') return true;
    }
  }
  return false;
}

// Parses one decomposer-provided step line by wrapping it in a scratch lemma.
std::optional<ProofStep> parse_step_line(const std::string& line) {
  std::string scratch = "lemma scratch_wrapper: \"True\"\nproof -\n  " + line +
                        "\n  show \"True\" sorry\nqed\n";
  ParseResult result = parse_theory(scratch);
  if (!result.ok()) return std::nullopt;
  const std::vector<Block>& blocks = result.document->blocks;
  if (blocks.size() != 1 || !blocks[0].proof || blocks[0].proof->steps.size() != 1) {
    return std::nullopt;
  }
  const ProofStep& root = blocks[0].proof->steps[0];
  if (root.children.size() != 3) return std::nullopt;  // step + scratch show + qed
  return root.children[0];
}

}  // namespace

bool decompose_site(WorkflowState& state, std::size_t site_index, Decomposer& decomposer) {
  // Copies up front: pushing fresh sites below reallocates state.sites.
  const GoalId parent_goal = state.sites[site_index].goal;
  const std::string parent_goal_text = state.sites[site_index].goal_text;
  TheoryDocument* doc = find_document(state.documents, parent_goal.file);
  if (doc == nullptr) throw GoalNotFound(parent_goal);
  ProofStep* step = find_step(*doc, parent_goal.block, parent_goal.step_path);
  if (step == nullptr || !step->method || !step->method->is_sorry()) {
    throw GoalNotFound(parent_goal);
  }

  auto lines = decomposer.decompose(parent_goal_text);
  if (!lines || lines->empty()) {
    state.sites[site_index].abandoned = true;
    state.history.push_back({state.iteration, parent_goal, "decompose", "declined"});
    return false;
  }

  const Block* owner = find_block(*doc, parent_goal.block);
  std::set<std::string> used_labels = labels_in_block(*owner);
  auto fresh_label = [&](int hint) {
    for (int k = hint;; ++k) {
      std::string candidate = "g" + std::to_string(k);
      if (used_labels.insert(candidate).second) return candidate;
    }
  };

  std::vector<ProofStep> substeps;
  std::vector<std::string> sublabels;
  for (const std::string& line : *lines) {
    if (starts_with_step_keyword(line)) {
      auto parsed = parse_step_line(line);
      if (!parsed) {
        state.sites[site_index].abandoned = true;
        state.history.push_back(
            {state.iteration, parent_goal, "decompose", "malformed step line: " + line});
        return false;
      }
      if (!parsed->method || !parsed->method->is_sorry()) {
        SkeletonViolation violation;
        violation.goal = parent_goal;
        violation.offending_method = parsed->method.value_or(TacticCall::sorry());
        violation.rule_text = "decomposer produced a non-sorry step: " + line;
        state.violations.push_back(violation);
        state.sites[site_index].abandoned = true;
        state.history.push_back(
            {state.iteration, parent_goal, "decompose", "rejected non-sorry step"});
        return false;
      }
      if (parsed->label) {
        if (!used_labels.insert(*parsed->label).second) {
          state.sites[site_index].abandoned = true;
          state.history.push_back({state.iteration, parent_goal, "decompose",
                                   "duplicate label '" + *parsed->label + "'"});
          return false;
        }
        sublabels.push_back(*parsed->label);
      }
      substeps.push_back(std::move(*parsed));
    } else {
      ProofStep have;
      have.kind = StepKind::HAVE;
      have.label = fresh_label(static_cast<int>(substeps.size()) + 1);
      have.goal_text = line;
      have.method = TacticCall::sorry();
      sublabels.push_back(*have.label);
      substeps.push_back(std::move(have));
    }
  }
  if (substeps.empty() || substeps.back().kind != StepKind::SHOW) {
    ProofStep closing;
    closing.kind = StepKind::SHOW;
    closing.goal_text = parent_goal_text;
    closing.using_facts = sublabels;
    closing.method = TacticCall::sorry();
    substeps.push_back(std::move(closing));
  }

  ProofStep block;
  block.kind = StepKind::PROOF_BLOCK;
  block.children = std::move(substeps);
  ProofStep qed;
  qed.kind = StepKind::QED;
  block.children.push_back(std::move(qed));
  std::size_t child_count = block.children.size() - 1;  // sorry-bearing steps

  std::vector<int> parent_path(parent_goal.step_path.begin(), parent_goal.step_path.end() - 1);
  int inserted_index;
  if (step->kind == StepKind::TERMINAL) {
    // The terminal is replaced wholesale; sibling indices are untouched.
    inserted_index = parent_goal.step_path.back();
    block.using_facts = std::move(step->using_facts);
    *step = std::move(block);
  } else {
    step->method.reset();
    step->hammer_timeout_s.reset();
    inserted_index = parent_goal.step_path.back() + 1;
    std::vector<ProofStep>* siblings = nullptr;
    if (parent_path.empty()) {
      for (Block& b : doc->blocks) {
        if (b.name == parent_goal.block) siblings = &b.proof->steps;
      }
    } else {
      siblings = &find_step(*doc, parent_goal.block, parent_path)->children;
    }
    siblings->insert(siblings->begin() + inserted_index, std::move(block));

    // Later siblings (and goals beneath them) shift one slot to the right.
    auto shift = [&](GoalId& goal) {
      if (goal.file != parent_goal.file || goal.block != parent_goal.block) return;
      if (goal.step_path.size() <= parent_path.size()) return;
      if (!std::equal(parent_path.begin(), parent_path.end(), goal.step_path.begin())) return;
      int& index = goal.step_path[parent_path.size()];
      if (index >= inserted_index) index += 1;
    };
    for (SorrySite& other : state.sites) {
      shift(other.goal);
      for (SuggestionRecord& suggestion : other.suggestions) shift(suggestion.goal);
    }
  }

  refresh_layout(*doc);
  assert_canonical(*doc);

  // Register the new placeholder sites.
  std::vector<int> block_path = parent_path;
  block_path.push_back(inserted_index);
  std::vector<std::string> seen_labels;
  for (std::size_t j = 0; j < child_count; ++j) {
    const ProofStep* child = [&]() -> const ProofStep* {
      std::vector<int> p = block_path;
      p.push_back(static_cast<int>(j));
      return find_step(*doc, parent_goal.block, p);
    }();
    SorrySite fresh;
    fresh.goal = {parent_goal.file, parent_goal.block, block_path};
    fresh.goal.step_path.push_back(static_cast<int>(j));
    fresh.goal_text = child->goal_text.value_or("");
    fresh.context_facts = child->using_facts;
    for (const std::string& label : seen_labels) append_unique(fresh.context_facts, label);
    if (child->label) seen_labels.push_back(*child->label);
    fresh.status = SiteStatus::PENDING;
    state.sites.push_back(std::move(fresh));
  }

  state.sites[site_index].status = SiteStatus::RESOLVED;
  state.history.push_back({state.iteration, state.sites[site_index].goal, "decompose",
                           "split into " + std::to_string(child_count) + " subgoal(s)"});
  return true;
}

std::pair<std::vector<TheoryDocument>, RunReport> run_to_zero(
    std::vector<TheoryDocument> documents, ProverBackend& backend, Decomposer* decomposer,
    const WorkflowConfig& config, WorkflowState* final_state, const WorkflowObserver& observer) {
  WorkflowState state;
  state.documents = std::move(documents);
  state.sites = locate_sorries(state.documents);
  ConjunctionDecomposer builtin;
  Decomposer& split = decomposer != nullptr ? *decomposer : builtin;
  auto notify = [&](std::string_view phase) {
    if (observer) observer(state, phase);
  };
  notify("init");

  auto active = [&] {
    return std::any_of(state.sites.begin(), state.sites.end(), [](const SorrySite& site) {
      switch (site.status) {
        case SiteStatus::PENDING:
        case SiteStatus::ANNOTATED:
        case SiteStatus::SUGGESTED:
          return true;
        case SiteStatus::NEEDS_DECOMPOSITION:
          return !site.abandoned;
        case SiteStatus::RESOLVED:
          return false;
      }
      return false;
    });
  };

  while (state.iteration < config.max_iterations && active()) {
    ++state.iteration;

    for (TheoryDocument& doc : state.documents) {
      std::vector<SorrySite> pending;
      for (const SorrySite& site : state.sites) {
        if (site.status == SiteStatus::PENDING && site.goal.file == doc.name) {
          pending.push_back(site);
        }
      }
      if (pending.empty()) continue;
      doc = annotate_sorries(doc, pending, config.hammer_timeout_s);
    }
    for (SorrySite& site : state.sites) {
      if (site.status != SiteStatus::PENDING) continue;
      site.status = SiteStatus::ANNOTATED;
      state.history.push_back({state.iteration, site.goal, "annotate",
                               "timeout " + std::to_string(config.hammer_timeout_s) + "s"});
    }
    notify("annotate");

    harvest(state, backend, config);
    notify("harvest");

    substitute(state, backend, config);
    notify("substitute");

    for (std::size_t i = 0; i < state.sites.size(); ++i) {
      if (state.sites[i].status == SiteStatus::NEEDS_DECOMPOSITION && !state.sites[i].abandoned) {
        decompose_site(state, i, split);
      }
    }
    notify("decompose");
  }

  RunReport report;
  report.iterations = state.iteration;
  report.total_check_ms = state.total_check_ms;
  report.violations = state.violations;
  for (const SorrySite& site : state.sites) {
    if (site.status == SiteStatus::RESOLVED) {
      report.resolved.push_back(site.goal);
    } else {
      report.unresolved.push_back(site.goal);
    }
  }
  report.success = report.unresolved.empty();
  assert(!report.success || locate_sorries(state.documents).empty());

  if (final_state != nullptr) *final_state = state;
  return {std::move(state.documents), std::move(report)};
}

}  // namespace proofforge
