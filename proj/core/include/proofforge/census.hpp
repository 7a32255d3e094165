#ifndef PROOFFORGE_CENSUS_HPP
#define PROOFFORGE_CENSUS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proofforge/parser.hpp"
#include "proofforge/theory.hpp"

namespace proofforge {

// Counting buckets for closing methods. Every TacticCall falls in exactly one
// bucket; heads without a bucket of their own (fast, linarith, rule, done,
// unrecognized spellings, ...) count as OTHER.
enum class TacticCategory {
  BLAST,
  SIMP,
  AUTO,
  METIS,
  MESON,
  SORRY,
  OTHER,
};

inline constexpr std::size_t kTacticCategoryCount = 7;
std::string_view category_name(TacticCategory category);
TacticCategory category_for(const TacticCall& call);

struct TacticCensus {
  std::array<std::int64_t, kTacticCategoryCount> counts{};
  std::int64_t unfolding_count = 0;

  std::int64_t count(TacticCategory category) const {
    return counts[static_cast<std::size_t>(category)];
  }
  std::int64_t& count(TacticCategory category) {
    return counts[static_cast<std::size_t>(category)];
  }
  std::int64_t total() const;

  TacticCensus& operator+=(const TacticCensus& other);
  friend TacticCensus operator+(TacticCensus lhs, const TacticCensus& rhs) {
    lhs += rhs;
    return lhs;
  }
  bool operator==(const TacticCensus&) const = default;
};

struct StructureCensus {
  std::int64_t have_count = 0;
  std::int64_t show_count = 0;
  std::int64_t obtain_count = 0;
  std::int64_t proof_block_count = 0;

  StructureCensus& operator+=(const StructureCensus& other);
  friend StructureCensus operator+(StructureCensus lhs, const StructureCensus& rhs) {
    lhs += rhs;
    return lhs;
  }
  bool operator==(const StructureCensus&) const = default;
};

TacticCensus tactic_census(const TheoryDocument& doc);
TacticCensus tactic_census(std::span<const TheoryDocument> docs);
StructureCensus structure_census(const TheoryDocument& doc);
StructureCensus structure_census(std::span<const TheoryDocument> docs);

// Proof-size accounting. Annotated results are measured two ways: the line
// extent of their own proof tree (direct) and the line total of their whole
// section (direct plus the full extents of attached unannotated blocks).
// Unannotated result blocks are helpers; definitions contribute lines to
// their section but are not counted as helpers.
enum class HelperAttachment {
  NEAREST_FOLLOWING,  // a helper belongs to the next annotated result
  NEAREST_PRECEDING,
};

struct ProofSizeEntry {
  std::string result_name;
  int section = 0;
  std::int64_t direct_lines = 0;
  std::int64_t section_lines = 0;
  std::int64_t helper_count = 0;

  bool operator==(const ProofSizeEntry&) const = default;
};

struct ProofSizeReport {
  std::vector<ProofSizeEntry> per_result;
  std::int64_t total_results = 0;
  std::int64_t total_helpers = 0;
  std::optional<double> helper_ratio;  // helpers per annotated result
  std::vector<std::string> orphan_diagnostics;
};

// section_map assigns block names to section numbers and must cover every
// annotated block; unmapped unannotated blocks attach to the nearest
// annotated neighbour. Blocks reachable by neither rule are reported as
// orphans.
ProofSizeReport proof_size_report(std::span<const TheoryDocument> docs,
                                  const std::map<std::string, int>& section_map,
                                  HelperAttachment attachment = HelperAttachment::NEAREST_FOLLOWING);

}  // namespace proofforge

#endif  // PROOFFORGE_CENSUS_HPP
