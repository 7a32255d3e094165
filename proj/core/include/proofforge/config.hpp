#ifndef PROOFFORGE_CONFIG_HPP
#define PROOFFORGE_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "proofforge/theory.hpp"

namespace proofforge {

// Tool configuration, `key = value` lines with '#' comments. Precedence:
// built-in defaults < file named by PROOFFORGE_CONFIG < explicit file <
// command-line flags.
struct Config {
  int hammer_timeout_s = 10;
  Millis slow_threshold_ms = 2000;
  Millis session_budget_ms = 120000;
  unsigned workers = 4;
  int max_iterations = 20;
  std::string automated_prompt_prefix = "Read CLAUDE.md";
  std::string backend_command;   // empty: use the scripted mock
  std::string theme_rules_path;  // empty: built-in rules

  // Applies `key = value` assignments from the stream. Unknown keys and
  // unparseable values are reported; valid assignments still apply.
  void apply(std::istream& in, std::vector<std::string>& errors);
  void apply_line(const std::string& key, const std::string& value, std::vector<std::string>& errors);

  // Range checks (positive durations, at least one worker).
  void validate(std::vector<std::string>& errors) const;

  // Effective settings, one `key = value` per line.
  std::string describe() const;

  bool operator==(const Config&) const = default;
};

// Defaults, then the file named by PROOFFORGE_CONFIG (when set), then
// `explicit_path` (when non-empty). Missing explicit file is an error;
// missing env file is an error too (the variable names it deliberately).
Config load_config(const std::string& explicit_path, std::vector<std::string>& errors);

}  // namespace proofforge

#endif  // PROOFFORGE_CONFIG_HPP
