// Microbenchmarks for the hot paths: theory parsing and serialization, the
// censuses, split planning, and streaming log counting.

#include <benchmark/benchmark.h>

#include <sstream>
#include <string>
#include <vector>

#include "proofforge/census.hpp"
#include "proofforge/log_analyzer.hpp"
#include "proofforge/parser.hpp"
#include "proofforge/session_plan.hpp"
#include "proofforge/theory.hpp"

namespace {

using namespace proofforge;

// A structured document with `blocks` lemmas, three steps each; canonical
// text comes from the serializer so parse benchmarks see realistic input.
TheoryDocument synthetic_document(int blocks) {
  TheoryDocument doc;
  doc.name = "Bench";
  doc.imports = {"Main"};
  for (int i = 0; i < blocks; ++i) {
    Block block;
    block.kind = BlockKind::LEMMA;
    block.name = "bench_" + std::to_string(i);
    block.shows_text = "benchP x" + std::to_string(i);
    block.statement_text = "assumes \"benchQ x" + std::to_string(i) + "\" shows \"" +
                           block.shows_text + "\"";
    ProofStep have;
    have.kind = StepKind::HAVE;
    have.label = "h1";
    have.goal_text = "benchR x" + std::to_string(i);
    have.method = TacticCall::make(MethodHead::METIS, {"closed_un"});
    ProofStep show;
    show.kind = StepKind::SHOW;
    show.goal_text = block.shows_text;
    show.using_facts = {"h1"};
    show.method = TacticCall::make(MethodHead::SIMP);
    ProofStep qed;
    qed.kind = StepKind::QED;
    ProofStep root;
    root.kind = StepKind::PROOF_BLOCK;
    root.children = {std::move(have), std::move(show), std::move(qed)};
    block.proof = ProofTree{{std::move(root)}};
    doc.blocks.push_back(std::move(block));
  }
  refresh_layout(doc);
  return doc;
}

std::string synthetic_log(int records) {
  std::ostringstream out;
  for (int i = 0; i < records; ++i) {
    bool user = i % 10 == 0;
    out << "{\"ts\": \"2026-01-05T08:" << (i / 60) % 60 << ':' << i % 60 << "Z\", \"role\": \""
        << (user ? "user" : "assistant") << "\", \"text\": \""
        << (user ? "Read CLAUDE.md and continue" : "working") << "\", \"tools\": []}\n";
  }
  return out.str();
}

void BM_ParseTheory(benchmark::State& state) {
  std::string text = serialize(synthetic_document(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    ParseResult result = parse_theory(text);
    benchmark::DoNotOptimize(result);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseTheory)->Arg(8)->Arg(64);

void BM_SerializeTheory(benchmark::State& state) {
  TheoryDocument doc = synthetic_document(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    std::string text = serialize(doc);
    benchmark::DoNotOptimize(text);
  }
}
BENCHMARK(BM_SerializeTheory)->Arg(8)->Arg(64);

void BM_TacticCensus(benchmark::State& state) {
  TheoryDocument doc = synthetic_document(64);
  for (auto _ : state) {
    TacticCensus census = tactic_census(doc);
    benchmark::DoNotOptimize(census);
  }
}
BENCHMARK(BM_TacticCensus);

void BM_PlanSplit(benchmark::State& state) {
  std::vector<BuildUnit> units;
  for (int i = 0; i < state.range(0); ++i) {
    units.push_back({"unit" + std::to_string(i), 1000 + 37 * i, (i * 7) % 5 * 1.0});
  }
  for (auto _ : state) {
    SplitPlan plan = plan_split(units);
    benchmark::DoNotOptimize(plan);
  }
}
BENCHMARK(BM_PlanSplit)->Arg(12)->Arg(128);

void BM_IngestLogCount(benchmark::State& state) {
  std::string log = synthetic_log(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    std::istringstream in(log);
    IngestCounts counts = ingest_log_count(in);
    benchmark::DoNotOptimize(counts);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * log.size()));
}
BENCHMARK(BM_IngestLogCount)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
