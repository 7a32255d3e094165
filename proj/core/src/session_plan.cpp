#include "proofforge/session_plan.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

namespace proofforge {

namespace {

std::vector<double> normalized_weights(std::span<const BuildUnit> units) {
  double sum = 0.0;
  for (const BuildUnit& unit : units) {
    if (unit.edit_weight < 0.0) throw std::invalid_argument("negative edit weight");
    sum += unit.edit_weight;
  }
  std::vector<double> weights(units.size());
  if (sum <= 0.0) {
    double uniform = 1.0 / static_cast<double>(units.size());
    for (double& w : weights) w = uniform;
  } else {
    for (std::size_t i = 0; i < units.size(); ++i) weights[i] = units[i].edit_weight / sum;
  }
  return weights;
}

}  // namespace

double expected_incremental_ms(std::span<const BuildUnit> units, std::size_t cut_index) {
  if (units.empty()) throw std::invalid_argument("empty build chain");
  if (cut_index > units.size()) throw std::invalid_argument("cut index out of range");
  std::vector<double> weights = normalized_weights(units);

  double total = 0.0;
  for (const BuildUnit& unit : units) total += static_cast<double>(unit.build_ms);
  double tail = 0.0;
  for (std::size_t j = cut_index; j < units.size(); ++j) {
    tail += static_cast<double>(units[j].build_ms);
  }

  double expected = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    expected += weights[i] * (i < cut_index ? total : tail);
  }
  return expected;
}

SplitPlan plan_split(std::vector<BuildUnit> units) {
  if (units.empty()) throw std::invalid_argument("empty build chain");
  SplitPlan plan;
  plan.cut_index = 0;
  plan.expected_incremental_ms = expected_incremental_ms(units, 0);
  for (std::size_t cut = 1; cut <= units.size(); ++cut) {
    double expected = expected_incremental_ms(units, cut);
    if (expected <= plan.expected_incremental_ms) {  // ties favour more caching
      plan.expected_incremental_ms = expected;
      plan.cut_index = cut;
    }
  }
  plan.units = std::move(units);
  return plan;
}

double evaluate_plan(const SplitPlan& plan) {
  return expected_incremental_ms(plan.units, plan.cut_index);
}

std::vector<BuildUnit> parse_unit_list(std::istream& in,
                                       std::vector<ParseDiagnostic>* diagnostics) {
  std::vector<BuildUnit> units;
  std::string line;
  int line_no = 0;
  auto note = [&](std::string message) {
    if (diagnostics != nullptr) {
      diagnostics->push_back({line_no, 1, Severity::WARNING, std::move(message)});
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    BuildUnit unit;
    if (!(fields >> unit.name)) continue;  // blank
    if (!(fields >> unit.build_ms) || unit.build_ms < 0) {
      note("expected `name build_ms [edit_weight]`");
      continue;
    }
    if (fields >> unit.edit_weight) {
      if (unit.edit_weight < 0.0) {
        note("edit weight must be non-negative");
        continue;
      }
    } else {
      unit.edit_weight = 1.0;
    }
    std::string extra;
    if (fields >> extra) {
      note("trailing fields after edit weight");
      continue;
    }
    units.push_back(std::move(unit));
  }
  return units;
}

std::vector<BuildUnit> units_from_documents(std::span<const TheoryDocument> docs,
                                            std::span<const Millis> build_ms) {
  if (docs.size() != build_ms.size()) {
    throw std::invalid_argument("one build time per theory is required");
  }
  std::vector<BuildUnit> units;
  units.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    BuildUnit unit;
    unit.name = docs[i].name;
    unit.build_ms = build_ms[i];
    unit.edit_weight = static_cast<double>(docs[i].raw_line_count);
    units.push_back(std::move(unit));
  }
  return units;
}

}  // namespace proofforge
