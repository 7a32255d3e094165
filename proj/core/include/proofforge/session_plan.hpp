#ifndef PROOFFORGE_SESSION_PLAN_HPP
#define PROOFFORGE_SESSION_PLAN_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "proofforge/parser.hpp"
#include "proofforge/theory.hpp"

namespace proofforge {

// One unit in a linear build chain (a theory file or session member).
// edit_weight is the relative probability that the next edit lands here;
// plan_split normalizes weights (all-zero means uniform).
struct BuildUnit {
  std::string name;
  Millis build_ms = 0;
  double edit_weight = 0.0;

  bool operator==(const BuildUnit&) const = default;
};

// Split of a chain into a frozen prefix [0, cut_index) and a live suffix
// [cut_index, n). Expected incremental cost model: an edit in the suffix
// rebuilds the whole suffix; an edit in the frozen prefix invalidates the
// cache and rebuilds everything, re-freezing included.
struct SplitPlan {
  std::vector<BuildUnit> units;
  std::size_t cut_index = 0;
  double expected_incremental_ms = 0.0;

  bool operator==(const SplitPlan&) const = default;
};

// Expected incremental cost of a given cut under normalized edit weights.
double expected_incremental_ms(std::span<const BuildUnit> units, std::size_t cut_index);

// Minimizes expected incremental cost over all cuts 0..n; ties resolve to the
// larger cut (more caching). Throws std::invalid_argument on an empty chain.
SplitPlan plan_split(std::vector<BuildUnit> units);

// Recomputes the expected cost of an existing plan. Throws
// std::invalid_argument when cut_index is out of range or the chain is empty.
double evaluate_plan(const SplitPlan& plan);

// Unit list, one per line: `name build_ms [edit_weight]`. Blank lines and
// lines starting with '#' are skipped; malformed lines become diagnostics.
std::vector<BuildUnit> parse_unit_list(std::istream& in,
                                       std::vector<ParseDiagnostic>* diagnostics = nullptr);

// Derives units from parsed theories: build_ms from the per-line estimate,
// edit weights proportional to raw line counts.
std::vector<BuildUnit> units_from_documents(std::span<const TheoryDocument> docs,
                                            std::span<const Millis> build_ms);

}  // namespace proofforge

#endif  // PROOFFORGE_SESSION_PLAN_HPP
