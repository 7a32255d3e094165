#ifndef PROOFFORGE_REPORTS_HPP
#define PROOFFORGE_REPORTS_HPP

#include <nlohmann/json.hpp>
#include <span>
#include <string>

#include "proofforge/backend.hpp"
#include "proofforge/census.hpp"
#include "proofforge/log_analyzer.hpp"
#include "proofforge/profiler.hpp"
#include "proofforge/session_plan.hpp"
#include "proofforge/workflow.hpp"

namespace proofforge {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Wraps a payload in the versioned envelope every CLI JSON output carries.
Json report_envelope(std::string_view kind, Json payload);

Json to_json(const ParseDiagnostic& diagnostic);
Json to_json(const TacticCensus& census);
Json to_json(const StructureCensus& census);
Json to_json(const ProofSizeReport& report);
Json to_json(const SorrySite& site);
Json to_json(const SuggestionRecord& record);
Json to_json(const SkeletonViolation& violation);
Json to_json(const RunReport& report);
Json to_json(const TimingProfile& profile);
Json to_json(const ProfileResult& result, const BudgetCheck* budget = nullptr);
Json to_json(const SwapProposal& proposal);
Json to_json(const SplitPlan& plan);
Json to_json(const SessionStats& stats);
Json to_json(const InterventionReport& report);

// Aligned-column text renderings of the same payloads.
std::string to_text(const TacticCensus& census);
std::string to_text(const StructureCensus& census);
std::string to_text(const ProofSizeReport& report);
std::string to_text(std::span<const SorrySite> sites);
std::string to_text(const RunReport& report);
std::string to_text(const ProfileResult& result, const BudgetCheck* budget = nullptr);
std::string to_text(std::span<const SwapProposal> proposals);
std::string to_text(const SplitPlan& plan);
std::string to_text(const SessionStats& stats);
std::string to_text(const InterventionReport& report);

}  // namespace proofforge

#endif  // PROOFFORGE_REPORTS_HPP
