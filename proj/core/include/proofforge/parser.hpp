#ifndef PROOFFORGE_PARSER_HPP
#define PROOFFORGE_PARSER_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proofforge/theory.hpp"

namespace proofforge {

enum class Severity {
  ERROR,
  WARNING,
};

struct ParseDiagnostic {
  int line = 0;    // 1-based position in the input text
  int column = 0;  // 1-based
  Severity severity = Severity::ERROR;
  std::string message;

  std::string to_string() const;
  bool operator==(const ParseDiagnostic&) const = default;
};

struct ParseResult {
  // Engaged iff no ERROR diagnostic was produced. Warnings never block.
  std::optional<TheoryDocument> document;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
};

// Parses theory text. Whitespace-insensitive outside quoted strings; the
// resulting document carries canonical-layout spans (see serialize).
ParseResult parse_theory(std::string_view text);

// Renders the canonical layout: 2-space indentation steps, one blank line
// between blocks, annotation comment on the line above its block.
std::string serialize(const TheoryDocument& doc);

// Recomputes every span and raw_line_count from the canonical layout.
// Serialization immediately after refresh_layout agrees with the spans.
void refresh_layout(TheoryDocument& doc);

}  // namespace proofforge

#endif  // PROOFFORGE_PARSER_HPP
