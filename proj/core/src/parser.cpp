#include "proofforge/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <utility>

namespace proofforge {

namespace {

struct ParseError {
  int line;
  int column;
  std::string message;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n'; }

const std::set<std::string>& fact_stop_words() {
  static const std::set<std::string> kStop = {
      "by",    "sorry",   "done",  "unfolding", "using",     "shows",      "assumes",
      "and",   "qed",     "have",  "show",      "obtain",    "proof",      "lemma",
      "theorem", "corollary", "definition", "end", "where", "sledgehammer"};
  return kStop;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string quoted(const std::string& text) { return "\"" + text + "\""; }

// Recursive-descent parser over normalized text (no carriage returns).
// Whitespace is insignificant outside quoted strings; the first error aborts
// the parse, warnings accumulate.
class TheoryParser {
 public:
  explicit TheoryParser(std::string_view text) {
    text_.reserve(text.size());
    for (char c : text) {
      if (c != '\r') text_.push_back(c);
    }
  }

  ParseResult run() {
    ParseResult result;
    try {
      result.document = parse_document();
    } catch (const ParseError& err) {
      result.document.reset();
      diags_.push_back({err.line, err.column, Severity::ERROR, err.message});
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

  // Parses a standalone method fragment, e.g. "unfolding f by simp".
  std::optional<TacticCall> run_method_fragment() {
    try {
      skip();
      if (eof()) return std::nullopt;
      TacticCall call = parse_method();
      skip();
      if (!eof()) return std::nullopt;
      return call;
    } catch (const ParseError&) {
      return std::nullopt;
    }
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::vector<ParseDiagnostic> diags_;
  std::optional<SourceAnnotation> pending_annotation_;
  int pending_annotation_line_ = 0;
  std::set<std::string> labels_;

  [[noreturn]] void fail(int line, int column, std::string message) {
    throw ParseError{line, column, std::move(message)};
  }
  [[noreturn]] void fail_here(std::string message) { fail(line_, column_, std::move(message)); }
  void warn(int line, int column, std::string message) {
    diags_.push_back({line, column, Severity::WARNING, std::move(message)});
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void bump() {
    if (eof()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  // Skips whitespace and comments. Well-formed provenance annotations are
  // stashed for the next block; malformed ones warn and are dropped.
  void skip() {
    for (;;) {
      while (!eof() && is_space(peek())) bump();
      if (peek() == '(' && peek(1) == '*') {
        int cline = line_, ccol = column_;
        std::string body = read_comment();
        if (body.size() >= 7 && body.starts_with("(**") && body.ends_with("**)")) {
          if (auto ann = SourceAnnotation::parse(body)) {
            if (pending_annotation_) {
              warn(pending_annotation_line_, 1, "provenance annotation is not attached to a block");
            }
            pending_annotation_ = std::move(ann);
            pending_annotation_line_ = cline;
          } else {
            warn(cline, ccol, "malformed provenance annotation ignored");
          }
        }
        continue;
      }
      break;
    }
  }

  std::string read_comment() {
    int cline = line_, ccol = column_;
    std::string body;
    body += peek();
    bump();
    body += peek();
    bump();  // consumed "(*"
    int depth = 1;
    while (depth > 0) {
      if (eof()) fail(cline, ccol, "unterminated comment");
      if (peek() == '(' && peek(1) == '*') {
        ++depth;
        body += "(*";
        bump();
        bump();
      } else if (peek() == '*' && peek(1) == ')') {
        --depth;
        body += "*)";
        bump();
        bump();
      } else {
        body += peek();
        bump();
      }
    }
    return body;
  }

  // Raw word: maximal run of non-space characters, never crossing a quote.
  std::string read_word() {
    std::string out;
    while (!eof() && !is_space(peek()) && peek() != '"') {
      out += peek();
      bump();
    }
    return out;
  }

  std::string peek_word() {
    auto saved_pos = pos_;
    auto saved_line = line_;
    auto saved_col = column_;
    std::string w = read_word();
    pos_ = saved_pos;
    line_ = saved_line;
    column_ = saved_col;
    return w;
  }

  void expect_word(std::string_view expected) {
    skip();
    int wline = line_, wcol = column_;
    std::string w = read_word();
    if (w != expected) {
      fail(wline, wcol, "expected '" + std::string(expected) + "', found '" + w + "'");
    }
  }

  // Quoted goal text. No escapes; a quote always terminates. Newlines inside
  // are folded to single spaces so goals stay single-line.
  std::string read_quoted() {
    int qline = line_, qcol = column_;
    if (peek() != '"') fail_here("expected quoted string");
    bump();
    std::string out;
    for (;;) {
      if (eof()) fail(qline, qcol, "unterminated quoted string");
      char c = peek();
      if (c == '"') {
        bump();
        return out;
      }
      out += (c == '\n') ? ' ' : c;
      bump();
    }
  }

  std::string expect_quoted(std::string_view what) {
    skip();
    if (peek() != '"') fail_here("expected quoted " + std::string(what));
    return read_quoted();
  }

  std::vector<std::string> read_fact_list(std::string_view what) {
    std::vector<std::string> facts;
    for (;;) {
      skip();
      if (eof() || peek() == '"') break;
      std::string w = peek_word();
      if (w.empty() || fact_stop_words().count(w) > 0) break;
      facts.push_back(read_word());
    }
    if (facts.empty()) fail_here("expected " + std::string(what) + " names");
    return facts;
  }

  // Method arguments inside parentheses, split on whitespace at depth >= 1.
  // Embedded quoted strings are kept verbatim inside their word.
  std::vector<std::string> read_method_args() {
    int oline = line_, ocol = column_;
    bump();  // '('
    int depth = 1;
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) {
        words.push_back(cur);
        cur.clear();
      }
    };
    for (;;) {
      if (eof()) fail(oline, ocol, "unterminated method arguments");
      char c = peek();
      if (c == '"') {
        cur += '"';
        bump();
        for (;;) {
          if (eof()) fail(oline, ocol, "unterminated quoted string in method arguments");
          char q = peek();
          bump();
          if (q == '"') break;
          cur += (q == '\n') ? ' ' : q;
        }
        cur += '"';
        continue;
      }
      if (c == '(') {
        ++depth;
        cur += c;
        bump();
        continue;
      }
      if (c == ')') {
        --depth;
        bump();
        if (depth == 0) {
          flush();
          break;
        }
        cur += c;
        continue;
      }
      if (is_space(c)) {
        flush();
        bump();
        continue;
      }
      cur += c;
      bump();
    }
    if (words.empty()) fail(oline, ocol, "empty method");
    return words;
  }

  TacticCall parse_method() {
    skip();
    int mline = line_, mcol = column_;
    std::string w = peek_word();
    std::vector<std::string> unfolding;
    if (w == "unfolding") {
      read_word();
      unfolding = read_fact_list("unfolding fact");
      skip();
      mline = line_;
      mcol = column_;
      w = peek_word();
      if (w != "by") fail(mline, mcol, "expected 'by' after unfolding facts");
    }
    if (w == "sorry") {
      read_word();
      return TacticCall::sorry();
    }
    if (w == "done") {
      read_word();
      return TacticCall::other("done");
    }
    if (w == "by") {
      read_word();
      skip();
      if (peek() == '(') {
        std::vector<std::string> words = read_method_args();
        std::string head_name = words.front();
        std::vector<std::string> args(words.begin() + 1, words.end());
        if (auto head = head_from_keyword(head_name); head && *head != MethodHead::SORRY) {
          return TacticCall::make(*head, std::move(args), std::move(unfolding));
        }
        return TacticCall::other(std::move(head_name), std::move(args), std::move(unfolding));
      }
      std::string head_name = read_word();
      if (head_name.empty()) fail_here("expected proof method after 'by'");
      if (auto head = head_from_keyword(head_name)) {
        return TacticCall::make(*head, {}, std::move(unfolding));
      }
      return TacticCall::other(std::move(head_name), {}, std::move(unfolding));
    }
    fail(mline, mcol, "expected proof method, found '" + w + "'");
  }

  std::optional<int> parse_directive() {
    skip();
    if (peek_word() != "sledgehammer") return std::nullopt;
    int dline = line_, dcol = column_;
    read_word();
    skip();
    if (peek() != '[') fail(dline, dcol, "expected '[timeout = N]' after sledgehammer");
    bump();
    std::string body;
    for (;;) {
      if (eof()) fail(dline, dcol, "unterminated sledgehammer options");
      char c = peek();
      bump();
      if (c == ']') break;
      body += (c == '\n') ? ' ' : c;
    }
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) fail(dline, dcol, "expected 'timeout = N' in sledgehammer options");
    auto trim = [](std::string s) {
      while (!s.empty() && is_space(s.front())) s.erase(s.begin());
      while (!s.empty() && is_space(s.back())) s.pop_back();
      return s;
    };
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key != "timeout") fail(dline, dcol, "unknown sledgehammer option '" + key + "'");
    if (value.empty()) fail(dline, dcol, "expected timeout value");
    for (char c : value) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        fail(dline, dcol, "timeout value must be an integer");
      }
    }
    return std::stoi(value);
  }

  std::optional<std::string> parse_label() {
    skip();
    if (peek() == '"') return std::nullopt;
    int lline = line_, lcol = column_;
    std::string w = read_word();
    if (w.empty()) fail(lline, lcol, "expected label or quoted goal");
    if (w.size() > 1 && w.back() == ':') {
      w.pop_back();
    } else {
      skip();
      std::string colon = read_word();
      if (colon != ":") fail(lline, lcol, "expected ':' after label '" + w + "'");
    }
    if (!labels_.insert(w).second) fail(lline, lcol, "duplicate label '" + w + "'");
    return w;
  }

  ProofStep parse_goal_step(StepKind kind, std::optional<int> directive) {
    ProofStep step;
    step.kind = kind;
    step.hammer_timeout_s = directive;
    if (kind == StepKind::OBTAIN) {
      for (;;) {
        skip();
        if (eof() || peek() == '"') fail_here("expected 'where' in obtain step");
        std::string w = peek_word();
        if (w == "where") {
          read_word();
          break;
        }
        if (w.empty() || fact_stop_words().count(w) > 0) fail_here("expected 'where' in obtain step");
        step.witnesses.push_back(read_word());
      }
      if (step.witnesses.empty()) fail_here("obtain step binds no names");
      step.label = parse_label();
    } else if (kind == StepKind::HAVE) {
      step.label = parse_label();
    }
    step.goal_text = expect_quoted("goal");
    skip();
    if (peek_word() == "using") {
      read_word();
      step.using_facts = read_fact_list("fact");
    }
    skip();
    std::string w = peek_word();
    if (w == "unfolding" || w == "by" || w == "sorry" || w == "done") {
      step.method = parse_method();
    }
    return step;
  }

  ProofStep parse_proof_block() {
    int pline = line_, pcol = column_;
    expect_word("proof");
    skip();
    int dash_line = line_, dash_col = column_;
    if (read_word() != "-") fail(dash_line, dash_col, "expected '-' after 'proof'");

    ProofStep block;
    block.kind = StepKind::PROOF_BLOCK;
    bool prev_open = false;
    for (;;) {
      std::optional<int> directive = parse_directive();
      skip();
      if (eof()) fail(pline, pcol, "proof block is never closed by 'qed'");
      int wline = line_, wcol = column_;
      std::string w = peek_word();
      if (w == "qed") {
        if (directive) fail(wline, wcol, "sledgehammer directive must precede a goal step");
        if (prev_open) fail(wline, wcol, "previous step is unproved; expected a proof block");
        read_word();
        ProofStep qed;
        qed.kind = StepKind::QED;
        block.children.push_back(std::move(qed));
        break;
      }
      if (w == "have" || w == "show" || w == "obtain") {
        if (prev_open) fail(wline, wcol, "previous step is unproved; expected a proof block");
        read_word();
        StepKind kind = (w == "have")   ? StepKind::HAVE
                        : (w == "show") ? StepKind::SHOW
                                        : StepKind::OBTAIN;
        ProofStep step = parse_goal_step(kind, directive);
        prev_open = !step.method.has_value();
        block.children.push_back(std::move(step));
        continue;
      }
      if (w == "proof") {
        if (directive) fail(wline, wcol, "sledgehammer directive must precede a goal step");
        if (!prev_open) fail(wline, wcol, "proof block without an open goal");
        block.children.push_back(parse_proof_block());
        prev_open = false;
        continue;
      }
      if (directive) fail(wline, wcol, "sledgehammer directive must precede a goal step");
      fail(wline, wcol, "expected proof step or 'qed', found '" + w + "'");
    }
    return block;
  }

  ProofTree parse_root_proof() {
    labels_.clear();
    ProofTree tree;
    std::optional<int> directive = parse_directive();
    skip();
    std::vector<std::string> using_facts;
    if (peek_word() == "using") {
      read_word();
      using_facts = read_fact_list("fact");
    }
    skip();
    std::string w = peek_word();
    if (w == "proof") {
      if (directive) fail_here("sledgehammer directive must precede a goal step");
      ProofStep block = parse_proof_block();
      block.using_facts = std::move(using_facts);
      tree.steps.push_back(std::move(block));
    } else {
      ProofStep terminal;
      terminal.kind = StepKind::TERMINAL;
      terminal.hammer_timeout_s = directive;
      terminal.using_facts = std::move(using_facts);
      terminal.method = parse_method();
      tree.steps.push_back(std::move(terminal));
    }
    return tree;
  }

  Block parse_block() {
    Block block;
    if (pending_annotation_) {
      block.annotation = std::move(pending_annotation_);
      pending_annotation_.reset();
    }
    int kline = line_, kcol = column_;
    std::string kw = read_word();
    if (kw == "definition") {
      block.kind = BlockKind::DEFINITION;
      skip();
      block.name = read_word();
      if (block.name.empty()) fail_here("expected definition name");
      expect_word("where");
      block.statement_text = quoted(expect_quoted("definition body"));
      return block;
    }
    if (kw == "lemma" || kw == "theorem" || kw == "corollary") {
      block.kind = (kw == "lemma")     ? BlockKind::LEMMA
                   : (kw == "theorem") ? BlockKind::THEOREM
                                       : BlockKind::COROLLARY;
      skip();
      int nline = line_, ncol = column_;
      std::string name = read_word();
      if (name.empty()) fail(nline, ncol, "expected result name");
      if (name.size() > 1 && name.back() == ':') {
        name.pop_back();
      } else if (name == ":") {
        fail(nline, ncol, "expected result name");
      } else {
        skip();
        std::string colon = read_word();
        if (colon != ":") fail(nline, ncol, "expected ':' after result name");
      }
      block.name = std::move(name);

      skip();
      if (peek() == '"') {
        block.shows_text = read_quoted();
        block.statement_text = quoted(block.shows_text);
      } else if (peek_word() == "assumes") {
        read_word();
        std::vector<std::string> assumptions;
        for (;;) {
          assumptions.push_back(expect_quoted("assumption"));
          skip();
          if (peek_word() == "and") {
            read_word();
            continue;
          }
          break;
        }
        expect_word("shows");
        block.shows_text = expect_quoted("goal");
        std::string stmt = "assumes";
        for (std::size_t i = 0; i < assumptions.size(); ++i) {
          if (i > 0) stmt += " and";
          stmt += " " + quoted(assumptions[i]);
        }
        stmt += " shows " + quoted(block.shows_text);
        block.statement_text = std::move(stmt);
      } else {
        fail_here("expected statement after result name");
      }
      block.proof = parse_root_proof();
      return block;
    }
    fail(kline, kcol, "unknown top-level keyword '" + kw + "'");
  }

  TheoryDocument parse_document() {
    TheoryDocument doc;
    skip();
    if (eof()) {
      note_dangling_annotation();
      return doc;
    }
    if (peek_word() == "theory") {
      read_word();
      skip();
      doc.name = read_word();
      if (doc.name.empty()) fail_here("expected theory name");
      skip();
      if (peek_word() == "imports") {
        read_word();
        for (;;) {
          skip();
          std::string w = peek_word();
          if (w == "begin") break;
          if (w.empty() || eof()) fail_here("expected 'begin' after imports");
          doc.imports.push_back(read_word());
        }
      }
      expect_word("begin");
      for (;;) {
        skip();
        if (eof()) fail_here("expected 'end'");
        if (peek_word() == "end") {
          read_word();
          break;
        }
        doc.blocks.push_back(parse_block());
      }
      skip();
      if (!eof()) fail_here("unexpected text after 'end'");
    } else {
      while (skip(), !eof()) {
        doc.blocks.push_back(parse_block());
      }
    }
    note_dangling_annotation();
    refresh_layout(doc);
    return doc;
  }

  void note_dangling_annotation() {
    if (pending_annotation_) {
      warn(pending_annotation_line_, 1, "provenance annotation is not attached to a block");
      pending_annotation_.reset();
    }
  }
};

// Canonical renderer. Also assigns spans: every span refers to this layout.
class Renderer {
 public:
  std::string render(TheoryDocument& doc) {
    lines_.clear();
    if (!doc.name.empty()) {
      emit(0, "theory " + doc.name);
      if (!doc.imports.empty()) emit(1, "imports " + join(doc.imports));
      emit(0, "begin");
      for (Block& block : doc.blocks) {
        blank();
        render_block(block);
      }
      blank();
      emit(0, "end");
    } else {
      bool first = true;
      for (Block& block : doc.blocks) {
        if (!first) blank();
        first = false;
        render_block(block);
      }
    }
    doc.raw_line_count = static_cast<int>(lines_.size());
    std::string out;
    for (const std::string& l : lines_) {
      out += l;
      out += '\n';
    }
    if (lines_.empty()) out.clear();
    return out;
  }

 private:
  std::vector<std::string> lines_;

  int line_no() const { return static_cast<int>(lines_.size()); }
  void emit(int indent, std::string text) {
    lines_.push_back(std::string(2 * indent, ' ') + std::move(text));
  }
  void blank() { lines_.emplace_back(); }

  void render_block(Block& block) {
    int start = line_no() + 1;
    if (block.annotation) emit(0, block.annotation->render());
    if (block.kind == BlockKind::DEFINITION) {
      emit(0, "definition " + block.name + " where");
      emit(1, block.statement_text);
    } else {
      emit(0, std::string(to_keyword(block.kind)) + " " + block.name + ": " +
                  block.statement_text);
      if (block.proof) {
        for (ProofStep& step : block.proof->steps) {
          if (step.kind == StepKind::PROOF_BLOCK) {
            render_step(step, 0);
          } else {
            render_step(step, 1);
          }
        }
      }
    }
    block.span = {start, line_no()};
  }

  void render_step(ProofStep& step, int indent) {
    int start = line_no() + 1;
    switch (step.kind) {
      case StepKind::HAVE:
      case StepKind::SHOW:
      case StepKind::OBTAIN: {
        if (step.hammer_timeout_s) emit(indent, directive_text(*step.hammer_timeout_s));
        std::string text(to_keyword(step.kind));
        if (step.kind == StepKind::OBTAIN) text += " " + join(step.witnesses) + " where";
        if (step.label) text += " " + *step.label + ":";
        text += " " + quoted(step.goal_text.value_or(""));
        if (!step.using_facts.empty()) text += " using " + join(step.using_facts);
        if (step.method) text += " " + step.method->raw_text;
        emit(indent, text);
        break;
      }
      case StepKind::TERMINAL: {
        if (step.hammer_timeout_s) emit(indent, directive_text(*step.hammer_timeout_s));
        std::string text;
        if (!step.using_facts.empty()) text += "using " + join(step.using_facts) + " ";
        text += step.method ? step.method->raw_text : "sorry";
        emit(indent, text);
        break;
      }
      case StepKind::PROOF_BLOCK: {
        if (!step.using_facts.empty()) emit(indent + 1, "using " + join(step.using_facts));
        emit(indent, "proof -");
        for (ProofStep& child : step.children) {
          if (child.kind == StepKind::QED) {
            int qstart = line_no() + 1;
            emit(indent, "qed");
            child.span = {qstart, line_no()};
          } else {
            render_step(child, indent + 1);
          }
        }
        break;
      }
      case StepKind::QED: {
        // Rendered by the enclosing PROOF_BLOCK.
        break;
      }
    }
    step.span = {start, line_no()};
  }

  static std::string directive_text(int timeout_s) {
    return "sledgehammer [timeout = " + std::to_string(timeout_s) + "]";
  }
};

}  // namespace

std::string ParseDiagnostic::to_string() const {
  std::ostringstream out;
  out << line << ':' << column << ": "
      << (severity == Severity::ERROR ? "error" : "warning") << ": " << message;
  return out.str();
}

ParseResult parse_theory(std::string_view text) { return TheoryParser(text).run(); }

std::string serialize(const TheoryDocument& doc) {
  TheoryDocument copy = doc;
  return Renderer().render(copy);
}

void refresh_layout(TheoryDocument& doc) { Renderer().render(doc); }

std::optional<TacticCall> TacticCall::parse(std::string_view text) {
  return TheoryParser(text).run_method_fragment();
}

}  // namespace proofforge
