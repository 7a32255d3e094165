#include <atomic>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "proofforge/parser.hpp"
#include "proofforge/workflow.hpp"

using namespace proofforge;

namespace {

TheoryDocument parse_ok(const std::string& text) {
  ParseResult result = parse_theory(text);
  REQUIRE_MESSAGE(result.ok(),
                  (result.diagnostics.empty() ? "?" : result.diagnostics[0].message));
  return *result.document;
}

TheoryDocument flow_fixture() {
  return parse_ok(
      "theory Flow\n"
      "begin\n"
      "\n"
      "lemma chain: assumes \"baseA\" shows \"finalB\"\n"
      "proof -\n"
      "  have h1: \"openU x\" sorry\n"
      "  have h2: \"closedV x\" using h1 sorry\n"
      "  show \"finalB\" using h2 sorry\n"
      "qed\n"
      "\n"
      "lemma direct_goal: \"compactS y\"\n"
      "  sorry\n"
      "\n"
      "end\n");
}

// Spec table scripted per goal identity, so decomposed subgoals can be made
// provable while their parent conjunction is not.
class GoalKeyedBackend : public ProverBackend {
 public:
  void script(GoalId goal, std::string method_text, Millis cost_ms) {
    table_[std::move(goal)] = {std::move(method_text), cost_ms};
  }

  CheckResult check(const TheoryDocument&, const GoalId& goal, const TacticCall& method,
                    Millis) override {
    ++checks;
    if (method.is_sorry()) return {goal, CheckStatus::PROVED, method, 0};
    auto it = table_.find(goal);
    if (it != table_.end() && method.raw_text == it->second.first) {
      return {goal, CheckStatus::PROVED, method, it->second.second};
    }
    return {goal, CheckStatus::FAILED, method, 0};
  }

  std::vector<SuggestionRecord> suggest(const TheoryDocument&, const GoalId& goal,
                                        Millis) override {
    ++suggests;
    auto it = table_.find(goal);
    if (it == table_.end()) return {};
    return {{goal, it->second.first, it->second.second, Provenance::HAMMER}};
  }

  std::atomic<int> checks{0};
  std::atomic<int> suggests{0};

 private:
  std::map<GoalId, std::pair<std::string, Millis>> table_;
};

class ScriptedDecomposer : public Decomposer {
 public:
  explicit ScriptedDecomposer(std::vector<std::optional<std::vector<std::string>>> replies)
      : replies_(std::move(replies)) {}

  std::optional<std::vector<std::string>> decompose(const std::string&) override {
    if (next_ >= replies_.size()) return std::nullopt;
    return replies_[next_++];
  }

 private:
  std::vector<std::optional<std::vector<std::string>>> replies_;
  std::size_t next_ = 0;
};

class ThrowingBackend : public ProverBackend {
 public:
  CheckResult check(const TheoryDocument&, const GoalId&, const TacticCall&, Millis) override {
    throw TransportError("prover socket closed", 70);
  }
  std::vector<SuggestionRecord> suggest(const TheoryDocument&, const GoalId&, Millis) override {
    throw TransportError("prover socket closed", 70);
  }
};

}  // namespace

TEST_CASE("site statuses have stable text names") {
  CHECK(to_string(SiteStatus::PENDING) == "pending");
  CHECK(to_string(SiteStatus::ANNOTATED) == "annotated");
  CHECK(to_string(SiteStatus::SUGGESTED) == "suggested");
  CHECK(to_string(SiteStatus::RESOLVED) == "resolved");
  CHECK(to_string(SiteStatus::NEEDS_DECOMPOSITION) == "needs_decomposition");
}

TEST_CASE("validate_skeleton flags every non-sorry closing method") {
  TheoryDocument doc = parse_ok(
      "theory Steps\n"
      "begin\n"
      "\n"
      "lemma packed: \"finalQ\"\n"
      "proof -\n"
      "  have a1: \"openU x\" by fast\n"
      "  have a2: \"closedV x\" by linarith\n"
      "  have a3: \"denseD x\" by simp\n"
      "  have a4: \"compactS x\" by (rule exI)\n"
      "  have a5: \"boundedB x\" by auto\n"
      "  show \"finalQ\" done\n"
      "qed\n"
      "\n"
      "end\n");

  std::vector<SkeletonViolation> violations = validate_skeleton(doc);
  REQUIRE(violations.size() == 6);
  const char* heads[] = {"fast", "linarith", "simp", "rule", "auto", "done"};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(violations[i].goal.block == "packed");
    CHECK(violations[i].goal.step_path == std::vector<int>{0, static_cast<int>(i)});
    CHECK(violations[i].rule_text ==
          std::string("new code must close every step with sorry, not '") + heads[i] + "'");
  }

  SUBCASE("a sorry-only document raises nothing") {
    CHECK(validate_skeleton(flow_fixture()).empty());
  }

  SUBCASE("a new-region window restricts the check to overlapping steps") {
    std::vector<SkeletonViolation> windowed = validate_skeleton(doc, LineSpan{8, 9});
    REQUIRE(windowed.size() == 2);
    CHECK(windowed[0].offending_method.head == MethodHead::SIMP);
    CHECK(windowed[1].offending_method.head == MethodHead::RULE);
  }

  SUBCASE("a disjoint window is silent") {
    CHECK(validate_skeleton(doc, LineSpan{1, 3}).empty());
  }
}

TEST_CASE("locate_sorries lists sites in document order with their context") {
  std::vector<TheoryDocument> docs = {flow_fixture()};
  std::vector<SorrySite> sites = locate_sorries(docs);
  REQUIRE(sites.size() == 4);

  CHECK(sites[0].goal == GoalId{"Flow", "chain", {0, 0}});
  CHECK(sites[0].goal_text == "openU x");
  CHECK(sites[0].context_facts.empty());

  CHECK(sites[1].goal == GoalId{"Flow", "chain", {0, 1}});
  CHECK(sites[1].goal_text == "closedV x");
  // The using-clause fact and the earlier sibling label coincide; the context
  // lists it once.
  CHECK(sites[1].context_facts == std::vector<std::string>{"h1"});

  CHECK(sites[2].goal == GoalId{"Flow", "chain", {0, 2}});
  CHECK(sites[2].goal_text == "finalB");
  CHECK(sites[2].context_facts == std::vector<std::string>{"h2", "h1"});

  CHECK(sites[3].goal == GoalId{"Flow", "direct_goal", {0}});
  CHECK(sites[3].goal_text == "compactS y");  // terminal steps aim at the shows clause
  CHECK(sites[3].context_facts.empty());

  for (const SorrySite& site : sites) CHECK(site.status == SiteStatus::PENDING);
}

TEST_CASE("annotate_sorries is pure, idempotent and validated") {
  TheoryDocument doc = flow_fixture();
  std::vector<TheoryDocument> docs = {doc};
  std::vector<SorrySite> sites = locate_sorries(docs);

  TheoryDocument annotated = annotate_sorries(doc, sites, 10);
  CHECK(doc == flow_fixture());  // input untouched
  std::string text = serialize(annotated);
  CHECK(text.find("  sledgehammer [timeout = 10]\n  have h1: \"openU x\" sorry\n") !=
        std::string::npos);
  CHECK(text.find("  sledgehammer [timeout = 10]\n  sorry\n") != std::string::npos);

  TheoryDocument again = annotate_sorries(annotated, sites, 10);
  CHECK(again == annotated);

  TheoryDocument reparsed = parse_ok(text);
  CHECK(reparsed == annotated);

  SUBCASE("a site that no longer points at a sorry is an error") {
    ProofStep* step = find_step(annotated, "chain", {0, 0});
    step->method = TacticCall::parse("by blast");
    CHECK_THROWS_AS(annotate_sorries(annotated, sites, 10), GoalNotFound);
  }
  SUBCASE("a site with a dangling path is an error") {
    SorrySite bogus;
    bogus.goal = {"Flow", "chain", {0, 9}};
    CHECK_THROWS_AS(annotate_sorries(annotated, std::vector<SorrySite>{bogus}, 10), GoalNotFound);
  }
}

TEST_CASE("conjunction decomposition splits only top-level conjunctions") {
  ConjunctionDecomposer splitter;

  auto parts = splitter.decompose("openU x ∧ closedV y");
  REQUIRE(parts.has_value());
  CHECK(*parts == std::vector<std::string>{"openU x", "closedV y"});

  parts = splitter.decompose("((openU x ∧ closedV y))");
  REQUIRE(parts.has_value());
  CHECK(*parts == std::vector<std::string>{"openU x", "closedV y"});

  parts = splitter.decompose("aimA ∧ (aimB ∨ aimC) ∧ aimD");
  REQUIRE(parts.has_value());
  CHECK(*parts == std::vector<std::string>{"aimA", "(aimB ∨ aimC)", "aimD"});

  CHECK_FALSE(splitter.decompose("openU x").has_value());
  CHECK_FALSE(splitter.decompose("aimA ∨ aimB").has_value());
  CHECK_FALSE(splitter.decompose("aimA ⟶ aimB").has_value());
  CHECK_FALSE(splitter.decompose("aimA ⟷ aimB").has_value());
  CHECK_FALSE(splitter.decompose("(aimA ∧ aimB) ⟶ aimC").has_value());
  CHECK_FALSE(splitter.decompose("aimA ∧").has_value());  // empty right operand
  CHECK_FALSE(splitter.decompose("").has_value());
}

TEST_CASE("harvest sorts candidates fastest-first and routes empty goals to decomposition") {
  WorkflowState state;
  state.documents = {flow_fixture()};
  state.sites = locate_sorries(state.documents);
  for (SorrySite& site : state.sites) site.status = SiteStatus::ANNOTATED;

  MockProverBackend backend;
  backend.add("openU x", "by blast", CheckStatus::PROVED, 40);
  backend.add("finalB", "by (metis closed_un)", CheckStatus::PROVED, 9000);
  backend.add("finalB", "by simp", CheckStatus::PROVED, 25);
  backend.add("compactS y", "by auto", CheckStatus::PROVED, 30, /*stale=*/true);

  WorkflowConfig config;
  harvest(state, backend, config);

  CHECK(state.sites[0].status == SiteStatus::SUGGESTED);
  REQUIRE(state.sites[0].suggestions.size() == 1);
  CHECK(state.sites[0].suggestions[0].method_text == "by blast");

  CHECK(state.sites[1].status == SiteStatus::NEEDS_DECOMPOSITION);
  CHECK(state.sites[1].suggestions.empty());

  CHECK(state.sites[2].status == SiteStatus::SUGGESTED);
  REQUIRE(state.sites[2].suggestions.size() == 2);
  CHECK(state.sites[2].suggestions[0].method_text == "by simp");  // 25 ms before 9000 ms
  CHECK(state.sites[2].suggestions[1].method_text == "by (metis closed_un)");

  CHECK(state.sites[3].status == SiteStatus::SUGGESTED);  // stale rows are still suggested
  CHECK(state.total_check_ms == 40 + 25 + 9000 + 30);

  REQUIRE(state.history.size() == 4);
  CHECK(state.history[0].action == "harvest");
  CHECK(state.history[0].outcome == "1 candidate(s)");
  CHECK(state.history[1].outcome == "no candidates");
  CHECK(state.history[2].outcome == "2 candidate(s)");

  SUBCASE("substitute installs the first candidate that re-proves") {
    substitute(state, backend, config);

    CHECK(state.sites[0].status == SiteStatus::RESOLVED);
    CHECK(state.sites[2].status == SiteStatus::RESOLVED);
    // The stale suggestion no longer replays, so the direct goal falls back.
    CHECK(state.sites[3].status == SiteStatus::NEEDS_DECOMPOSITION);

    std::string text = serialize(state.documents[0]);
    CHECK(text.find("have h1: \"openU x\" by blast") != std::string::npos);
    CHECK(text.find("show \"finalB\" using h2 by simp") != std::string::npos);
    CHECK(text.find("sledgehammer") == std::string::npos);

    // Fastest-first means the 9000 ms metis candidate is never re-checked.
    CHECK(state.total_check_ms == (40 + 25 + 9000 + 30) + (40 + 25 + 30));

    REQUIRE(state.verified.size() == 2);
    CHECK(state.verified[0].goal == GoalId{"Flow", "chain", {0, 0}});
    CHECK(state.verified[0].method_tried.raw_text == "by blast");
    CHECK(state.verified[1].goal == GoalId{"Flow", "chain", {0, 2}});

    bool saw_fallback = false;
    for (const HistoryEvent& event : state.history) {
      if (event.action == "substitute" && event.outcome == "no candidate re-proved") {
        saw_fallback = true;
        CHECK(event.site == GoalId{"Flow", "direct_goal", {0}});
      }
    }
    CHECK(saw_fallback);
  }
}

TEST_CASE("preloaded suggestions satisfy a site without asking the backend") {
  WorkflowState state;
  state.documents = {flow_fixture()};
  state.sites = locate_sorries(state.documents);
  for (SorrySite& site : state.sites) site.status = SiteStatus::ANNOTATED;

  MockProverBackend backend;
  WorkflowConfig config;
  config.preloaded_suggestions = {
      {GoalId{"Flow", "chain", {0, 1}}, "by (meson closed_un)", 120, Provenance::HAMMER},
      {GoalId{"Flow", "chain", {0, 1}}, "by fastforce", 45, Provenance::MANUAL},
  };

  harvest(state, backend, config);

  CHECK(backend.suggest_calls() == 3);  // the preloaded goal is never queried
  REQUIRE(state.sites[1].suggestions.size() == 2);
  CHECK(state.sites[1].suggestions[0].method_text == "by fastforce");  // re-sorted by speed
  CHECK(state.sites[1].status == SiteStatus::SUGGESTED);

  bool saw_preloaded = false;
  for (const HistoryEvent& event : state.history) {
    if (event.outcome == "2 candidate(s) (preloaded)") saw_preloaded = true;
  }
  CHECK(saw_preloaded);
}

TEST_CASE("a transport error aborts the harvest with no status changes") {
  WorkflowState state;
  state.documents = {flow_fixture()};
  state.sites = locate_sorries(state.documents);
  for (SorrySite& site : state.sites) site.status = SiteStatus::ANNOTATED;

  ThrowingBackend backend;
  WorkflowConfig config;
  config.workers = 2;
  CHECK_THROWS_AS(harvest(state, backend, config), TransportError);

  for (const SorrySite& site : state.sites) {
    CHECK(site.status == SiteStatus::ANNOTATED);
    CHECK(site.suggestions.empty());
  }
  CHECK(state.history.empty());
  CHECK(state.total_check_ms == 0);
}

TEST_CASE("decompose_site splices a sorry-only block after an inner step") {
  WorkflowState state;
  state.documents = {parse_ok(
      "theory Flow2\n"
      "begin\n"
      "\n"
      "lemma split_me: \"finalB\"\n"
      "proof -\n"
      "  have h1: \"aimA ∧ aimB\" sorry\n"
      "  show \"finalB\" using h1 sorry\n"
      "qed\n"
      "\n"
      "end\n")};
  state.sites = locate_sorries(state.documents);
  REQUIRE(state.sites.size() == 2);
  state.sites[0].status = SiteStatus::NEEDS_DECOMPOSITION;

  ConjunctionDecomposer splitter;
  CHECK(decompose_site(state, 0, splitter));

  CHECK(state.sites[0].status == SiteStatus::RESOLVED);
  // The sibling show slid one slot to the right.
  CHECK(state.sites[1].goal == GoalId{"Flow2", "split_me", {0, 2}});

  REQUIRE(state.sites.size() == 5);
  CHECK(state.sites[2].goal == GoalId{"Flow2", "split_me", {0, 1, 0}});
  CHECK(state.sites[2].goal_text == "aimA");
  CHECK(state.sites[2].context_facts.empty());
  CHECK(state.sites[3].goal == GoalId{"Flow2", "split_me", {0, 1, 1}});
  CHECK(state.sites[3].goal_text == "aimB");
  CHECK(state.sites[3].context_facts == std::vector<std::string>{"g1"});
  CHECK(state.sites[4].goal == GoalId{"Flow2", "split_me", {0, 1, 2}});
  CHECK(state.sites[4].goal_text == "aimA ∧ aimB");
  CHECK(state.sites[4].context_facts == std::vector<std::string>{"g1", "g2"});
  for (std::size_t i = 2; i < 5; ++i) CHECK(state.sites[i].status == SiteStatus::PENDING);

  CHECK(serialize(state.documents[0]) ==
        "theory Flow2\n"
        "begin\n"
        "\n"
        "lemma split_me: \"finalB\"\n"
        "proof -\n"
        "  have h1: \"aimA ∧ aimB\"\n"
        "  proof -\n"
        "    have g1: \"aimA\" sorry\n"
        "    have g2: \"aimB\" sorry\n"
        "    show \"aimA ∧ aimB\" using g1 g2 sorry\n"
        "  qed\n"
        "  show \"finalB\" using h1 sorry\n"
        "qed\n"
        "\n"
        "end\n");

  REQUIRE(!state.history.empty());
  CHECK(state.history.back().action == "decompose");
  CHECK(state.history.back().outcome == "split into 3 subgoal(s)");
}

TEST_CASE("decompose_site replaces a terminal proof in place, keeping its using clause") {
  WorkflowState state;
  state.documents = {parse_ok(
      "theory Flow3\n"
      "begin\n"
      "\n"
      "lemma direct: \"aimA ∧ aimB\"\n"
      "  using outerF sorry\n"
      "\n"
      "end\n")};
  state.sites = locate_sorries(state.documents);
  REQUIRE(state.sites.size() == 1);
  state.sites[0].status = SiteStatus::NEEDS_DECOMPOSITION;

  ConjunctionDecomposer splitter;
  CHECK(decompose_site(state, 0, splitter));

  CHECK(serialize(state.documents[0]) ==
        "theory Flow3\n"
        "begin\n"
        "\n"
        "lemma direct: \"aimA ∧ aimB\"\n"
        "  using outerF\n"
        "proof -\n"
        "  have g1: \"aimA\" sorry\n"
        "  have g2: \"aimB\" sorry\n"
        "  show \"aimA ∧ aimB\" using g1 g2 sorry\n"
        "qed\n"
        "\n"
        "end\n");

  REQUIRE(state.sites.size() == 4);
  CHECK(state.sites[1].goal == GoalId{"Flow3", "direct", {0, 0}});
  CHECK(state.sites[2].goal == GoalId{"Flow3", "direct", {0, 1}});
  CHECK(state.sites[3].goal == GoalId{"Flow3", "direct", {0, 2}});
}

TEST_CASE("decompose_site accepts scripted step lines and enforces the sorry discipline") {
  auto fresh_state = [] {
    WorkflowState state;
    state.documents = {parse_ok(
        "theory Flow4\n"
        "begin\n"
        "\n"
        "lemma scripted: \"finalB\"\n"
        "proof -\n"
        "  have h1: \"openU x\" sorry\n"
        "  show \"finalB\" using h1 sorry\n"
        "qed\n"
        "\n"
        "end\n")};
    state.sites = locate_sorries(state.documents);
    state.sites[0].status = SiteStatus::NEEDS_DECOMPOSITION;
    return state;
  };

  SUBCASE("full step lines are used verbatim; a closing show is appended when missing") {
    WorkflowState state = fresh_state();
    ScriptedDecomposer scripted({std::vector<std::string>{
        "obtain w where wq: \"denseD w\" sorry",
        "have k2: \"boundedB w\" using wq sorry",
    }});
    CHECK(decompose_site(state, 0, scripted));
    std::string text = serialize(state.documents[0]);
    CHECK(text.find("    obtain w where wq: \"denseD w\" sorry\n") != std::string::npos);
    CHECK(text.find("    have k2: \"boundedB w\" using wq sorry\n") != std::string::npos);
    CHECK(text.find("    show \"openU x\" using wq k2 sorry\n") != std::string::npos);
  }

  SUBCASE("a non-sorry step line is a skeleton violation") {
    WorkflowState state = fresh_state();
    ScriptedDecomposer scripted({std::vector<std::string>{"have k1: \"denseD w\" by auto"}});
    CHECK_FALSE(decompose_site(state, 0, scripted));
    CHECK(state.sites[0].abandoned);
    REQUIRE(state.violations.size() == 1);
    CHECK(state.violations[0].rule_text ==
          "decomposer produced a non-sorry step: have k1: \"denseD w\" by auto");
    // The document is untouched.
    CHECK(serialize(state.documents[0]).find("by auto") == std::string::npos);
  }

  SUBCASE("a label already used in the block is rejected") {
    WorkflowState state = fresh_state();
    ScriptedDecomposer scripted({std::vector<std::string>{"have h1: \"denseD w\" sorry"}});
    CHECK_FALSE(decompose_site(state, 0, scripted));
    CHECK(state.sites[0].abandoned);
    CHECK(state.history.back().outcome == "duplicate label 'h1'");
  }

  SUBCASE("declining abandons the site permanently") {
    WorkflowState state = fresh_state();
    ScriptedDecomposer scripted({std::nullopt});
    CHECK_FALSE(decompose_site(state, 0, scripted));
    CHECK(state.sites[0].abandoned);
    CHECK(state.sites[0].status == SiteStatus::NEEDS_DECOMPOSITION);
    CHECK(state.history.back().outcome == "declined");
  }
}

TEST_CASE("run_to_zero closes an all-provable corpus in one pass") {
  std::vector<TheoryDocument> docs = {flow_fixture()};
  MockProverBackend backend;
  backend.add("openU x", "by blast", CheckStatus::PROVED, 40);
  backend.add("closedV x", "by (meson closed_un)", CheckStatus::PROVED, 60);
  backend.add("finalB", "by simp", CheckStatus::PROVED, 25);
  backend.add("compactS y", "by auto", CheckStatus::PROVED, 30);

  WorkflowConfig config;
  WorkflowState final_state;
  std::vector<std::string> phases;
  auto observer = [&](const WorkflowState&, std::string_view phase) {
    phases.emplace_back(phase);
  };

  auto [out_docs, report] = run_to_zero(std::move(docs), backend, nullptr, config, &final_state,
                                        observer);

  CHECK(report.success);
  CHECK(report.iterations == 1);
  CHECK(report.resolved.size() == 4);
  CHECK(report.unresolved.empty());
  CHECK(report.violations.empty());
  CHECK(locate_sorries(out_docs).empty());
  CHECK(phases == std::vector<std::string>{"init", "annotate", "harvest", "substitute",
                                           "decompose"});

  // Every installed method was re-verified in this run.
  CHECK(final_state.verified.size() == 4);
  for_each_step(out_docs[0], [&](const Block& block, const ProofStep& step,
                                 const std::vector<int>& path) {
    if (!step.method || step.kind == StepKind::QED) return;
    bool audited = step.method->is_sorry();
    for (const CheckResult& check : final_state.verified) {
      if (check.goal == GoalId{out_docs[0].name, block.name, path} &&
          check.method_tried == *step.method) {
        audited = true;
      }
    }
    CHECK(audited);
  });

  SUBCASE("a second run is a no-op with zero backend calls") {
    MockProverBackend idle;
    auto [again_docs, again] = run_to_zero(out_docs, idle, nullptr, config);
    CHECK(again.success);
    CHECK(again.iterations == 0);
    CHECK(again_docs == out_docs);
    CHECK(idle.check_calls() == 0);
    CHECK(idle.suggest_calls() == 0);
  }
}

TEST_CASE("run_to_zero reports an unprovable goal instead of hiding it") {
  std::vector<TheoryDocument> docs = {flow_fixture()};
  MockProverBackend backend;
  backend.add("openU x", "by blast", CheckStatus::PROVED, 40);
  backend.add("finalB", "by simp", CheckStatus::PROVED, 25);
  backend.add("compactS y", "by auto", CheckStatus::PROVED, 30);
  // "closedV x" has no entry and no conjunction to split.

  WorkflowConfig config;
  auto [out_docs, report] = run_to_zero(std::move(docs), backend, nullptr, config);

  CHECK_FALSE(report.success);
  REQUIRE(report.unresolved.size() == 1);
  CHECK(report.unresolved[0] == GoalId{"Flow", "chain", {0, 1}});
  CHECK(report.resolved.size() == 3);
  CHECK(report.iterations == 1);  // the abandoned site stops the loop
  CHECK(serialize(out_docs[0]).find("have h2: \"closedV x\" using h1 sorry") !=
        std::string::npos);
}

TEST_CASE("run_to_zero decomposes a conjunction and closes the subgoals") {
  std::vector<TheoryDocument> docs = {parse_ok(
      "theory Mix\n"
      "begin\n"
      "\n"
      "lemma mix: \"finalB\"\n"
      "proof -\n"
      "  have hc: \"aimA ∧ aimB\" sorry\n"
      "  show \"finalB\" using hc sorry\n"
      "qed\n"
      "\n"
      "end\n")};

  GoalKeyedBackend backend;
  backend.script({"Mix", "mix", {0, 1}}, "by simp", 25);  // the show, before shifting
  backend.script({"Mix", "mix", {0, 1, 0}}, "by blast", 10);
  backend.script({"Mix", "mix", {0, 1, 1}}, "by auto", 12);
  backend.script({"Mix", "mix", {0, 1, 2}}, "by (meson g1 g2)", 20);

  WorkflowConfig config;
  WorkflowState final_state;
  auto [out_docs, report] = run_to_zero(std::move(docs), backend, nullptr, config, &final_state);

  CHECK(report.success);
  CHECK(report.iterations == 2);
  CHECK(report.resolved.size() == 5);  // hc, the shifted show, and hc's three children
  CHECK(report.unresolved.empty());
  CHECK(locate_sorries(out_docs).empty());

  CHECK(serialize(out_docs[0]) ==
        "theory Mix\n"
        "begin\n"
        "\n"
        "lemma mix: \"finalB\"\n"
        "proof -\n"
        "  have hc: \"aimA ∧ aimB\"\n"
        "  proof -\n"
        "    have g1: \"aimA\" by blast\n"
        "    have g2: \"aimB\" by auto\n"
        "    show \"aimA ∧ aimB\" using g1 g2 by (meson g1 g2)\n"
        "  qed\n"
        "  show \"finalB\" using hc by simp\n"
        "qed\n"
        "\n"
        "end\n");

  // The resolved show is reported under its post-insertion identity.
  bool found_shifted_show = false;
  for (const GoalId& goal : report.resolved) {
    if (goal == GoalId{"Mix", "mix", {0, 2}}) found_shifted_show = true;
  }
  CHECK(found_shifted_show);
}

TEST_CASE("run_to_zero stops at max_iterations when decomposition cannot converge") {
  std::vector<TheoryDocument> docs = {parse_ok(
      "theory Spin\n"
      "begin\n"
      "\n"
      "lemma spin: \"aimA ∧ aimB\"\n"
      "  sorry\n"
      "\n"
      "end\n")};

  MockProverBackend backend;  // proves nothing; the conjunction splits forever
  WorkflowConfig config;
  config.max_iterations = 3;
  auto [out_docs, report] = run_to_zero(std::move(docs), backend, nullptr, config);

  CHECK_FALSE(report.success);
  CHECK(report.iterations == 3);
  CHECK(!report.unresolved.empty());
  // The grown document is still canonical.
  ParseResult reparsed = parse_theory(serialize(out_docs[0]));
  REQUIRE(reparsed.ok());
  CHECK(*reparsed.document == out_docs[0]);
}
