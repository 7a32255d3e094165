#include "proofforge/census.hpp"

#include <algorithm>

namespace proofforge {

std::string_view category_name(TacticCategory category) {
  switch (category) {
    case TacticCategory::BLAST: return "blast";
    case TacticCategory::SIMP: return "simp";
    case TacticCategory::AUTO: return "auto";
    case TacticCategory::METIS: return "metis";
    case TacticCategory::MESON: return "meson";
    case TacticCategory::SORRY: return "sorry";
    case TacticCategory::OTHER: return "other";
  }
  return "other";
}

TacticCategory category_for(const TacticCall& call) {
  switch (call.head) {
    case MethodHead::BLAST: return TacticCategory::BLAST;
    case MethodHead::SIMP: return TacticCategory::SIMP;
    case MethodHead::AUTO: return TacticCategory::AUTO;
    case MethodHead::METIS: return TacticCategory::METIS;
    case MethodHead::MESON: return TacticCategory::MESON;
    case MethodHead::SORRY: return TacticCategory::SORRY;
    default: return TacticCategory::OTHER;
  }
}

std::int64_t TacticCensus::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts) sum += c;
  return sum;
}

TacticCensus& TacticCensus::operator+=(const TacticCensus& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  unfolding_count += other.unfolding_count;
  return *this;
}

StructureCensus& StructureCensus::operator+=(const StructureCensus& other) {
  have_count += other.have_count;
  show_count += other.show_count;
  obtain_count += other.obtain_count;
  proof_block_count += other.proof_block_count;
  return *this;
}

TacticCensus tactic_census(const TheoryDocument& doc) {
  TacticCensus census;
  for_each_step(doc, [&](const Block&, const ProofStep& step, const std::vector<int>&) {
    if (!step.method) return;
    census.count(category_for(*step.method)) += 1;
    if (!step.method->unfolding_facts.empty()) census.unfolding_count += 1;
  });
  return census;
}

TacticCensus tactic_census(std::span<const TheoryDocument> docs) {
  TacticCensus census;
  for (const TheoryDocument& doc : docs) census += tactic_census(doc);
  return census;
}

StructureCensus structure_census(const TheoryDocument& doc) {
  StructureCensus census;
  for_each_step(doc, [&](const Block&, const ProofStep& step, const std::vector<int>&) {
    switch (step.kind) {
      case StepKind::HAVE: census.have_count += 1; break;
      case StepKind::SHOW: census.show_count += 1; break;
      case StepKind::OBTAIN: census.obtain_count += 1; break;
      case StepKind::PROOF_BLOCK: census.proof_block_count += 1; break;
      default: break;
    }
  });
  return census;
}

StructureCensus structure_census(std::span<const TheoryDocument> docs) {
  StructureCensus census;
  for (const TheoryDocument& doc : docs) census += structure_census(doc);
  return census;
}

namespace {

std::int64_t proof_tree_extent(const Block& block) {
  if (!block.proof || block.proof->steps.empty()) return 0;
  int start = block.proof->steps.front().span.start_line;
  int end = block.proof->steps.back().span.end_line;
  return end - start + 1;
}

struct BlockRef {
  const Block* block;
  bool annotated;
  bool helper;              // unannotated result block
  std::optional<int> section;
};

}  // namespace

ProofSizeReport proof_size_report(std::span<const TheoryDocument> docs,
                                  const std::map<std::string, int>& section_map,
                                  HelperAttachment attachment) {
  ProofSizeReport report;

  std::vector<std::vector<BlockRef>> per_doc;
  per_doc.reserve(docs.size());
  for (const TheoryDocument& doc : docs) {
    std::vector<BlockRef> refs;
    refs.reserve(doc.blocks.size());
    for (const Block& block : doc.blocks) {
      BlockRef ref;
      ref.block = &block;
      ref.annotated = block.annotation.has_value();
      ref.helper = !ref.annotated && is_result_kind(block.kind);
      if (auto it = section_map.find(block.name); it != section_map.end()) {
        ref.section = it->second;
      } else if (ref.annotated) {
        report.orphan_diagnostics.push_back("annotated block '" + block.name +
                                            "' is missing from the section map");
        ref.section = block.annotation->section;
      }
      refs.push_back(ref);
    }
    // Unmapped unannotated blocks attach to the nearest annotated block in
    // the configured direction, within the same document.
    auto attach = [&](auto begin, auto end) {
      std::optional<int> current;
      for (auto it = begin; it != end; ++it) {
        if (it->annotated) {
          current = it->section;
        } else if (!it->section) {
          it->section = current;
        }
      }
    };
    if (attachment == HelperAttachment::NEAREST_FOLLOWING) {
      attach(refs.rbegin(), refs.rend());
    } else {
      attach(refs.begin(), refs.end());
    }
    per_doc.push_back(std::move(refs));
  }

  // Per-section accumulation. An annotated result contributes its proof tree
  // extent; every other block contributes its full span.
  std::map<int, std::int64_t> section_lines;
  std::map<int, std::int64_t> section_helpers;
  for (const auto& refs : per_doc) {
    for (const BlockRef& ref : refs) {
      if (!ref.section) {
        report.orphan_diagnostics.push_back("block '" + ref.block->name +
                                            "' is not attached to any section");
        continue;
      }
      bool counts_direct = ref.annotated && is_result_kind(ref.block->kind);
      section_lines[*ref.section] +=
          counts_direct ? proof_tree_extent(*ref.block) : ref.block->span.extent();
      if (ref.helper) {
        section_helpers[*ref.section] += 1;
        report.total_helpers += 1;
      }
    }
  }

  for (const auto& refs : per_doc) {
    for (const BlockRef& ref : refs) {
      if (!ref.annotated || !is_result_kind(ref.block->kind) || !ref.section) continue;
      ProofSizeEntry entry;
      entry.result_name = ref.block->name;
      entry.section = *ref.section;
      entry.direct_lines = proof_tree_extent(*ref.block);
      entry.section_lines = section_lines[*ref.section];
      entry.helper_count = section_helpers.count(*ref.section) ? section_helpers[*ref.section] : 0;
      report.per_result.push_back(std::move(entry));
    }
  }
  report.total_results = static_cast<std::int64_t>(report.per_result.size());
  if (report.total_results > 0) {
    report.helper_ratio =
        static_cast<double>(report.total_helpers) / static_cast<double>(report.total_results);
  }
  return report;
}

}  // namespace proofforge
