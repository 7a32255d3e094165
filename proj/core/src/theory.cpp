#include "proofforge/theory.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace proofforge {

namespace {

constexpr std::string_view kSectionSign = "\xc2\xa7";  // §

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

std::string_view to_keyword(MethodHead head) {
  switch (head) {
    case MethodHead::SORRY: return "sorry";
    case MethodHead::BLAST: return "blast";
    case MethodHead::SIMP: return "simp";
    case MethodHead::AUTO: return "auto";
    case MethodHead::METIS: return "metis";
    case MethodHead::MESON: return "meson";
    case MethodHead::FAST: return "fast";
    case MethodHead::LINARITH: return "linarith";
    case MethodHead::PRESBURGER: return "presburger";
    case MethodHead::RULE: return "rule";
    case MethodHead::SMT: return "smt";
    case MethodHead::OTHER: return "other";
  }
  return "other";
}

std::optional<MethodHead> head_from_keyword(std::string_view word) {
  static constexpr std::array<MethodHead, 11> kNamed = {
      MethodHead::SORRY,    MethodHead::BLAST,      MethodHead::SIMP, MethodHead::AUTO,
      MethodHead::METIS,    MethodHead::MESON,      MethodHead::FAST, MethodHead::LINARITH,
      MethodHead::PRESBURGER, MethodHead::RULE,     MethodHead::SMT};
  for (MethodHead head : kNamed) {
    if (word == to_keyword(head)) return head;
  }
  return std::nullopt;
}

std::string TacticCall::head_name() const {
  if (head == MethodHead::OTHER) return other_name;
  return std::string(to_keyword(head));
}

std::string TacticCall::render() const {
  if (head == MethodHead::SORRY) return "sorry";
  if (head == MethodHead::OTHER && other_name == "done" && arguments.empty() &&
      unfolding_facts.empty()) {
    return "done";
  }
  std::string out;
  if (!unfolding_facts.empty()) out = "unfolding " + join(unfolding_facts) + " ";
  if (arguments.empty()) {
    out += "by " + head_name();
  } else {
    out += "by (" + head_name() + " " + join(arguments) + ")";
  }
  return out;
}

TacticCall TacticCall::sorry() {
  TacticCall call;
  call.head = MethodHead::SORRY;
  call.raw_text = "sorry";
  return call;
}

TacticCall TacticCall::make(MethodHead head, std::vector<std::string> arguments,
                            std::vector<std::string> unfolding_facts) {
  TacticCall call;
  call.head = head;
  call.arguments = std::move(arguments);
  call.unfolding_facts = std::move(unfolding_facts);
  call.raw_text = call.render();
  return call;
}

TacticCall TacticCall::other(std::string name, std::vector<std::string> arguments,
                             std::vector<std::string> unfolding_facts) {
  TacticCall call;
  call.head = MethodHead::OTHER;
  call.other_name = std::move(name);
  call.arguments = std::move(arguments);
  call.unfolding_facts = std::move(unfolding_facts);
  call.raw_text = call.render();
  return call;
}

std::string SourceAnnotation::render() const {
  std::string out = "(** from ";
  out += kSectionSign;
  out += std::to_string(section);
  if (!result_label.empty()) {
    out += ' ';
    out += result_label;
  }
  out += " [";
  out += source_file;
  out += ':';
  out += std::to_string(source_line);
  out += "] **)";
  return out;
}

std::optional<SourceAnnotation> SourceAnnotation::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.starts_with("(**") || !s.ends_with("**)")) return std::nullopt;
  s = trim(s.substr(3, s.size() - 6));
  if (!s.starts_with("from")) return std::nullopt;
  s = trim(s.substr(4));
  if (!s.starts_with(kSectionSign)) return std::nullopt;
  s.remove_prefix(kSectionSign.size());

  SourceAnnotation out;
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits == 0) return std::nullopt;
  out.section = std::stoi(std::string(s.substr(0, digits)));
  s = s.substr(digits);

  std::size_t bracket = s.rfind('[');
  if (bracket == std::string_view::npos || !s.ends_with("]")) return std::nullopt;
  out.result_label = std::string(trim(s.substr(0, bracket)));
  std::string_view loc = s.substr(bracket + 1, s.size() - bracket - 2);
  std::size_t colon = loc.rfind(':');
  if (colon == std::string_view::npos) return std::nullopt;
  std::string_view line_part = loc.substr(colon + 1);
  if (line_part.empty()) return std::nullopt;
  for (char c : line_part) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  out.source_file = std::string(loc.substr(0, colon));
  out.source_line = std::stoi(std::string(line_part));
  return out;
}

std::string_view to_keyword(StepKind kind) {
  switch (kind) {
    case StepKind::HAVE: return "have";
    case StepKind::SHOW: return "show";
    case StepKind::OBTAIN: return "obtain";
    case StepKind::PROOF_BLOCK: return "proof";
    case StepKind::QED: return "qed";
    case StepKind::TERMINAL: return "terminal";
  }
  return "terminal";
}

std::string_view to_keyword(BlockKind kind) {
  switch (kind) {
    case BlockKind::DEFINITION: return "definition";
    case BlockKind::LEMMA: return "lemma";
    case BlockKind::THEOREM: return "theorem";
    case BlockKind::COROLLARY: return "corollary";
  }
  return "lemma";
}

bool is_result_kind(BlockKind kind) { return kind != BlockKind::DEFINITION; }

namespace {

template <typename BlockT, typename StepsT, typename Fn>
void walk_steps(BlockT& block, StepsT& steps, std::vector<int>& path, const Fn& fn) {
  for (int i = 0; i < static_cast<int>(steps.size()); ++i) {
    path.push_back(i);
    fn(block, steps[i], path);
    walk_steps(block, steps[i].children, path, fn);
    path.pop_back();
  }
}

}  // namespace

void for_each_step(const TheoryDocument& doc,
                   const std::function<void(const Block&, const ProofStep&,
                                            const std::vector<int>&)>& fn) {
  std::vector<int> path;
  for (const Block& block : doc.blocks) {
    if (!block.proof) continue;
    walk_steps(block, block.proof->steps, path, fn);
  }
}

void for_each_step(TheoryDocument& doc,
                   const std::function<void(Block&, ProofStep&, const std::vector<int>&)>& fn) {
  std::vector<int> path;
  for (Block& block : doc.blocks) {
    if (!block.proof) continue;
    walk_steps(block, block.proof->steps, path, fn);
  }
}

const Block* find_block(const TheoryDocument& doc, std::string_view block_name) {
  for (const Block& block : doc.blocks) {
    if (block.name == block_name) return &block;
  }
  return nullptr;
}

namespace {

template <typename StepT>
StepT* resolve_path(std::vector<StepT>* steps, const std::vector<int>& path) {
  StepT* current = nullptr;
  for (std::size_t depth = 0; depth < path.size(); ++depth) {
    int index = path[depth];
    if (index < 0 || index >= static_cast<int>(steps->size())) return nullptr;
    current = &(*steps)[index];
    steps = &current->children;
  }
  return current;
}

}  // namespace

const ProofStep* find_step(const TheoryDocument& doc, std::string_view block_name,
                           const std::vector<int>& step_path) {
  const Block* block = find_block(doc, block_name);
  if (block == nullptr || !block->proof || step_path.empty()) return nullptr;
  auto* steps = const_cast<std::vector<ProofStep>*>(&block->proof->steps);
  return resolve_path(steps, step_path);
}

ProofStep* find_step(TheoryDocument& doc, std::string_view block_name,
                     const std::vector<int>& step_path) {
  for (Block& block : doc.blocks) {
    if (block.name != block_name || !block.proof) continue;
    if (step_path.empty()) return nullptr;
    return resolve_path(&block.proof->steps, step_path);
  }
  return nullptr;
}

}  // namespace proofforge
