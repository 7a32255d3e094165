#ifndef PROOFFORGE_COMMAND_BACKEND_HPP
#define PROOFFORGE_COMMAND_BACKEND_HPP

#include <string>

#include "proofforge/backend.hpp"

namespace proofforge {

// External checker adapter. The command template runs under `/bin/sh -c`
// with these placeholders substituted:
//   {file}       path of a temp file holding the serialized document
//   {line}       canonical start line of the step under check
//   {timeout}    per-call timeout in whole seconds (rounded up)
//   {timeout_ms} the same timeout in milliseconds
// check: exit 0 is PROVED, other clean exits are FAILED; overruns are killed
// and reported as TIMEOUT. suggest: stdout lines matching suggestion_pattern
// (two capture groups: method text, milliseconds) become records.
// A command that cannot be executed at all (exit 126/127, or killed by a
// signal) raises TransportError carrying the exit status.
struct CommandBackendOptions {
  std::string command;
  std::string suggestion_pattern = R"(Try this: (.+) \(([0-9]+) ms\))";
};

class CommandProverBackend : public ProverBackend {
 public:
  explicit CommandProverBackend(CommandBackendOptions options);

  CheckResult check(const TheoryDocument& doc, const GoalId& goal, const TacticCall& method,
                    Millis timeout_ms) override;
  std::vector<SuggestionRecord> suggest(const TheoryDocument& doc, const GoalId& goal,
                                        Millis timeout_ms) override;

 private:
  CommandBackendOptions options_;
};

// Runs a shell command with a deadline, feeding `input` on stdin.
// Used by the command backend and the external decomposer hook.
struct SubprocessResult {
  int exit_status = 0;      // wait status semantics folded to exit code
  bool timed_out = false;
  bool signalled = false;
  std::string output;       // captured stdout
  Millis elapsed_ms = 0;
};

SubprocessResult run_subprocess(const std::string& shell_command, const std::string& input,
                                Millis timeout_ms);

}  // namespace proofforge

#endif  // PROOFFORGE_COMMAND_BACKEND_HPP
