#ifndef PROOFFORGE_THEORY_HPP
#define PROOFFORGE_THEORY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proofforge {

using Millis = std::int64_t;

// Proof method heads that the toolkit distinguishes. Anything else is OTHER
// and keeps its spelling in TacticCall::other_name.
enum class MethodHead {
  SORRY,
  BLAST,
  SIMP,
  AUTO,
  METIS,
  MESON,
  FAST,
  LINARITH,
  PRESBURGER,
  RULE,
  SMT,
  OTHER,
};

std::string_view to_keyword(MethodHead head);
std::optional<MethodHead> head_from_keyword(std::string_view word);

// One closing method as it appears at the end of a step, e.g.
//   "by (metis foo bar)", "unfolding f_def by simp", "sorry", "done".
struct TacticCall {
  MethodHead head = MethodHead::SORRY;
  std::string other_name;                    // spelling when head == OTHER
  std::vector<std::string> arguments;        // tokens inside (...), verbatim
  std::vector<std::string> unfolding_facts;  // facts before the method
  std::string raw_text;                      // canonical text; reparses to *this

  bool is_sorry() const { return head == MethodHead::SORRY; }
  std::string head_name() const;

  // Recomputes the canonical text from the structured fields.
  std::string render() const;

  static TacticCall sorry();
  static TacticCall make(MethodHead head, std::vector<std::string> arguments = {},
                         std::vector<std::string> unfolding_facts = {});
  static TacticCall other(std::string name, std::vector<std::string> arguments = {},
                          std::vector<std::string> unfolding_facts = {});
  // Parses a method fragment such as "unfolding f by (metis a)". Returns
  // nullopt when the fragment is not a single well-formed method.
  static std::optional<TacticCall> parse(std::string_view text);

  bool operator==(const TacticCall&) const = default;
};

// Provenance comment tying a formal result to its source text, rendered as
//   (** from §37 Theorem 37.3 (Tychonoff) [top1.tex:5253] **)
struct SourceAnnotation {
  int section = 0;
  std::string result_label;  // e.g. "Theorem 37.3 (Tychonoff)"
  std::string source_file;
  int source_line = 0;

  std::string render() const;
  static std::optional<SourceAnnotation> parse(std::string_view text);

  bool operator==(const SourceAnnotation&) const = default;
};

// 1-based inclusive line range in the canonical serialization.
struct LineSpan {
  int start_line = 0;
  int end_line = 0;

  int extent() const { return end_line - start_line + 1; }
  bool contains(int line) const { return start_line <= line && line <= end_line; }
  bool overlaps(const LineSpan& other) const {
    return start_line <= other.end_line && other.start_line <= end_line;
  }

  bool operator==(const LineSpan&) const = default;
};

enum class StepKind {
  HAVE,
  SHOW,
  OBTAIN,
  PROOF_BLOCK,
  QED,
  TERMINAL,  // a bare method closing the enclosing goal
};

std::string_view to_keyword(StepKind kind);

struct ProofStep {
  StepKind kind = StepKind::TERMINAL;
  std::optional<std::string> label;          // have/obtain label, unique per tree
  std::optional<std::string> goal_text;      // quoted goal of have/show/obtain
  std::vector<std::string> witnesses;        // names bound by obtain
  std::vector<std::string> using_facts;
  std::optional<TacticCall> method;          // absent when a proof_block follows
  std::optional<int> hammer_timeout_s;       // pending suggestion-harvest directive
  std::vector<ProofStep> children;           // non-empty only for PROOF_BLOCK
  LineSpan span;

  bool operator==(const ProofStep&) const = default;
};

struct ProofTree {
  std::vector<ProofStep> steps;

  bool operator==(const ProofTree&) const = default;
};

enum class BlockKind {
  DEFINITION,
  LEMMA,
  THEOREM,
  COROLLARY,
};

std::string_view to_keyword(BlockKind kind);
bool is_result_kind(BlockKind kind);  // lemma/theorem/corollary

struct Block {
  BlockKind kind = BlockKind::LEMMA;
  std::string name;
  std::optional<SourceAnnotation> annotation;
  std::string statement_text;           // canonical statement, quotes included
  std::string shows_text;               // goal stated by the shows clause
  std::optional<ProofTree> proof;       // absent iff kind == DEFINITION
  LineSpan span;                        // includes the annotation line

  bool operator==(const Block&) const = default;
};

struct TheoryDocument {
  std::string name;
  std::vector<std::string> imports;
  std::vector<Block> blocks;
  int raw_line_count = 0;

  bool operator==(const TheoryDocument&) const = default;
};

// Depth-first step traversal. The path is the 0-based child-index chain from
// the proof tree root, e.g. {0, 1} is the second child of the first step.
void for_each_step(const TheoryDocument& doc,
                   const std::function<void(const Block&, const ProofStep&,
                                            const std::vector<int>&)>& fn);
void for_each_step(TheoryDocument& doc,
                   const std::function<void(Block&, ProofStep&,
                                            const std::vector<int>&)>& fn);

const ProofStep* find_step(const TheoryDocument& doc, std::string_view block_name,
                           const std::vector<int>& step_path);
ProofStep* find_step(TheoryDocument& doc, std::string_view block_name,
                     const std::vector<int>& step_path);
const Block* find_block(const TheoryDocument& doc, std::string_view block_name);

}  // namespace proofforge

#endif  // PROOFFORGE_THEORY_HPP
