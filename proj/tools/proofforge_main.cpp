// Command-line driver. Exit codes: 0 success, 1 domain failure (violations,
// regressions, unresolved placeholders, budget fail), 2 usage or input parse
// errors. Reports go to stdout, diagnostics to stderr.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "proofforge/backend.hpp"
#include "proofforge/census.hpp"
#include "proofforge/command_backend.hpp"
#include "proofforge/config.hpp"
#include "proofforge/log_analyzer.hpp"
#include "proofforge/parser.hpp"
#include "proofforge/profiler.hpp"
#include "proofforge/reports.hpp"
#include "proofforge/session_plan.hpp"
#include "proofforge/theory.hpp"
#include "proofforge/workflow.hpp"

namespace proofforge {
namespace {

namespace fs = std::filesystem;

constexpr int kExitSuccess = 0;
constexpr int kExitDomainFailure = 1;
constexpr int kExitUsage = 2;

struct Corpus {
  std::vector<fs::path> paths;
  std::vector<TheoryDocument> documents;
};

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << text;
  return out.good();
}

void print_diagnostics(const std::string& source, std::span<const ParseDiagnostic> diagnostics) {
  for (const ParseDiagnostic& diagnostic : diagnostics) {
    std::cerr << source << ':' << diagnostic.to_string() << '\n';
  }
}

// Directories expand to their .thy files in sorted order; plain file
// arguments pass through whatever their extension.
std::optional<std::vector<fs::path>> collect_inputs(const std::vector<std::string>& args) {
  std::vector<fs::path> files;
  for (const std::string& arg : args) {
    fs::path path(arg);
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(path, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".thy") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(path, ec)) {
      files.push_back(std::move(path));
    } else {
      std::cerr << "error: no such file or directory: " << arg << '\n';
      return std::nullopt;
    }
  }
  return files;
}

std::optional<Corpus> load_corpus(const std::vector<std::string>& args) {
  auto files = collect_inputs(args);
  if (!files) return std::nullopt;
  Corpus corpus;
  bool failed = false;
  for (fs::path& path : *files) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << "error: cannot read " << path.string() << '\n';
      failed = true;
      continue;
    }
    ParseResult result = parse_theory(*text);
    print_diagnostics(path.string(), result.diagnostics);
    if (!result.ok()) {
      failed = true;
      continue;
    }
    corpus.documents.push_back(std::move(*result.document));
    corpus.paths.push_back(std::move(path));
  }
  if (failed) return std::nullopt;
  return corpus;
}

void emit(std::string_view kind, Json payload) {
  std::cout << report_envelope(kind, std::move(payload)).dump(2) << '\n';
}

Json config_json(const Config& config) {
  return Json{{"hammer_timeout_s", config.hammer_timeout_s},
              {"slow_threshold_ms", config.slow_threshold_ms},
              {"session_budget_ms", config.session_budget_ms},
              {"workers", config.workers},
              {"max_iterations", config.max_iterations},
              {"automated_prompt_prefix", config.automated_prompt_prefix},
              {"backend_command", config.backend_command},
              {"theme_rules_path", config.theme_rules_path}};
}

// Backend precedence: scripted fixture flag, then command flag, then the
// configured backend_command, then an empty scripted mock (every check
// fails), announced on stderr so silent all-fail runs are explicable.
std::unique_ptr<ProverBackend> make_backend(const std::string& fixture_path,
                                            const std::string& command_flag,
                                            const Config& config) {
  if (!fixture_path.empty()) {
    std::ifstream in(fixture_path);
    if (!in) {
      std::cerr << "error: cannot read fixture file '" << fixture_path << "'\n";
      return nullptr;
    }
    std::vector<ParseDiagnostic> diagnostics;
    MockProverBackend mock = MockProverBackend::from_jsonl(in, &diagnostics);
    print_diagnostics(fixture_path, diagnostics);
    return std::make_unique<MockProverBackend>(std::move(mock));
  }
  const std::string& command = !command_flag.empty() ? command_flag : config.backend_command;
  if (!command.empty()) {
    return std::make_unique<CommandProverBackend>(CommandBackendOptions{command});
  }
  std::cerr << "note: no backend configured; using an empty scripted mock "
               "(every check fails)\n";
  return std::make_unique<MockProverBackend>();
}

int write_documents(std::span<const TheoryDocument> documents,
                    std::span<const fs::path> sources, bool in_place,
                    const std::string& out_dir) {
  if (!in_place && out_dir.empty()) return kExitSuccess;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    fs::path target;
    if (in_place) {
      target = sources[i];
    } else {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      target = fs::path(out_dir) / (documents[i].name + ".thy");
    }
    if (!write_file(target, serialize(documents[i]))) {
      std::cerr << "error: cannot write " << target.string() << '\n';
      return kExitUsage;
    }
  }
  return kExitSuccess;
}

// ---------------------------------------------------------------- parse ---

int cmd_parse(bool json, const std::vector<std::string>& args) {
  auto corpus = load_corpus(args);
  if (!corpus) return kExitUsage;
  if (json) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < corpus->documents.size(); ++i) {
      rows.push_back(Json{{"file", corpus->paths[i].string()},
                          {"theory", corpus->documents[i].name},
                          {"canonical", serialize(corpus->documents[i])}});
    }
    emit("parse", Json{{"documents", std::move(rows)}});
  } else {
    for (const TheoryDocument& doc : corpus->documents) std::cout << serialize(doc);
  }
  return kExitSuccess;
}

// --------------------------------------------------------------- census ---

int cmd_census(bool json, const std::vector<std::string>& args) {
  auto corpus = load_corpus(args);
  if (!corpus) return kExitUsage;
  TacticCensus tactics = tactic_census(corpus->documents);
  StructureCensus structure = structure_census(corpus->documents);
  if (json) {
    emit("census", Json{{"files", corpus->documents.size()},
                        {"tactic", to_json(tactics)},
                        {"structure", to_json(structure)}});
  } else {
    std::cout << to_text(tactics) << to_text(structure);
  }
  return kExitSuccess;
}

// ---------------------------------------------------------------- sizes ---

std::optional<std::map<std::string, int>> read_section_map(const std::string& path) {
  std::map<std::string, int> map;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read section map '" << path << "'\n";
    return std::nullopt;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::string name;
    if (!(row >> name) || name.front() == '#') continue;
    int section = 0;
    if (!(row >> section)) {
      std::cerr << path << ':' << line_no << ": expected `name section`, skipping\n";
      continue;
    }
    map[name] = section;
  }
  return map;
}

int cmd_sizes(bool json, const std::vector<std::string>& args, const std::string& sections_path,
              const std::string& attach) {
  auto corpus = load_corpus(args);
  if (!corpus) return kExitUsage;
  // Annotations carry their own section numbers; an optional file of
  // `name section` rows overrides or extends them.
  std::map<std::string, int> section_map;
  for (const TheoryDocument& doc : corpus->documents) {
    for (const Block& block : doc.blocks) {
      if (block.annotation) section_map[block.name] = block.annotation->section;
    }
  }
  if (!sections_path.empty()) {
    auto extra = read_section_map(sections_path);
    if (!extra) return kExitUsage;
    for (auto& [name, section] : *extra) section_map[name] = section;
  }
  HelperAttachment attachment = attach == "preceding" ? HelperAttachment::NEAREST_PRECEDING
                                                      : HelperAttachment::NEAREST_FOLLOWING;
  ProofSizeReport report = proof_size_report(corpus->documents, section_map, attachment);
  if (json) {
    emit("sizes", to_json(report));
  } else {
    std::cout << to_text(report);
  }
  return kExitSuccess;
}

// -------------------------------------------------------------- sorries ---

int cmd_sorries(bool json, const std::vector<std::string>& args) {
  auto corpus = load_corpus(args);
  if (!corpus) return kExitUsage;
  std::vector<SorrySite> sites = locate_sorries(corpus->documents);
  if (json) {
    Json rows = Json::array();
    for (const SorrySite& site : sites) rows.push_back(to_json(site));
    emit("sorries", Json{{"count", sites.size()}, {"sites", std::move(rows)}});
  } else {
    std::cout << sites.size() << '\n';
    if (!sites.empty()) std::cout << to_text(std::span<const SorrySite>(sites));
  }
  return kExitSuccess;
}

// ------------------------------------------------------------- validate ---

int cmd_validate(bool json, const std::vector<std::string>& args, const std::string& region_text) {
  std::optional<LineSpan> region;
  if (!region_text.empty()) {
    int start = 0;
    int end = 0;
    char colon = 0;
    std::istringstream in(region_text);
    std::string rest;
    in >> start >> colon >> end >> rest;
    if (colon != ':' || start < 1 || end < start || !rest.empty()) {
      std::cerr << "error: --new-region expects START:END (1-based, START <= END), got '"
                << region_text << "'\n";
      return kExitUsage;
    }
    region = LineSpan{start, end};
  }
  auto corpus = load_corpus(args);
  if (!corpus) return kExitUsage;
  std::vector<SkeletonViolation> violations;
  for (const TheoryDocument& doc : corpus->documents) {
    std::vector<SkeletonViolation> found = validate_skeleton(doc, region);
    violations.insert(violations.end(), std::make_move_iterator(found.begin()),
                      std::make_move_iterator(found.end()));
  }
  if (json) {
    Json rows = Json::array();
    for (const SkeletonViolation& violation : violations) rows.push_back(to_json(violation));
    emit("validate", Json{{"count", violations.size()}, {"violations", std::move(rows)}});
  } else {
    for (const SkeletonViolation& violation : violations) {
      std::cout << violation.goal.to_string() << " closes with '"
                << violation.offending_method.raw_text << "': " << violation.rule_text << '\n';
    }
    std::cout << violations.size() << " violation(s)\n";
  }
  return violations.empty() ? kExitSuccess : kExitDomainFailure;
}

// ------------------------------------------------------------------ run ---

struct RunArgs {
  std::vector<std::string> inputs;
  std::string fixture;
  std::string backend_cmd;
  std::string decomposer_cmd;
  std::string suggestions_path;
  std::string out_dir;
  bool in_place = false;
  int timeout_s = 0;
  unsigned workers = 0;
  int max_iterations = 0;
  CLI::Option* timeout_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
};

int cmd_run(bool json, const Config& config, const RunArgs& args) {
  auto corpus = load_corpus(args.inputs);
  if (!corpus) return kExitUsage;
  std::unique_ptr<ProverBackend> backend = make_backend(args.fixture, args.backend_cmd, config);
  if (!backend) return kExitUsage;

  WorkflowConfig workflow;
  workflow.hammer_timeout_s =
      args.timeout_opt->count() > 0 ? args.timeout_s : config.hammer_timeout_s;
  workflow.workers = args.workers_opt->count() > 0 ? args.workers : config.workers;
  workflow.max_iterations =
      args.iterations_opt->count() > 0 ? args.max_iterations : config.max_iterations;
  if (!args.suggestions_path.empty()) {
    std::ifstream in(args.suggestions_path);
    if (!in) {
      std::cerr << "error: cannot read suggestions file '" << args.suggestions_path << "'\n";
      return kExitUsage;
    }
    std::vector<ParseDiagnostic> diagnostics;
    workflow.preloaded_suggestions = suggestions_from_jsonl(in, &diagnostics);
    print_diagnostics(args.suggestions_path, diagnostics);
  }

  ConjunctionDecomposer conjunction;
  std::unique_ptr<CommandDecomposer> command_decomposer;
  Decomposer* decomposer = &conjunction;
  if (!args.decomposer_cmd.empty()) {
    command_decomposer = std::make_unique<CommandDecomposer>(args.decomposer_cmd);
    decomposer = command_decomposer.get();
  }

  auto [documents, report] =
      run_to_zero(std::move(corpus->documents), *backend, decomposer, workflow);
  if (json) {
    emit("run", to_json(report));
  } else {
    std::cout << to_text(report);
  }
  int write_status = write_documents(documents, corpus->paths, args.in_place, args.out_dir);
  if (write_status != kExitSuccess) return write_status;
  return report.success ? kExitSuccess : kExitDomainFailure;
}

// -------------------------------------------------------------- profile ---

struct ProfileArgs {
  std::vector<std::string> inputs;
  std::string fixture;
  std::string backend_cmd;
  Millis budget_ms = 0;
  Millis threshold_ms = 0;
  Millis check_timeout_ms = 30000;
  unsigned workers = 0;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

ProfileOptions effective_profile_options(const ProfileArgs& args, const Config& config) {
  ProfileOptions options;
  options.check_timeout_ms = args.check_timeout_ms;
  options.slow_threshold_ms =
      args.threshold_opt->count() > 0 ? args.threshold_ms : config.slow_threshold_ms;
  options.workers = args.workers_opt->count() > 0 ? args.workers : config.workers;
  return options;
}

int cmd_profile(bool json, const Config& config, const ProfileArgs& args) {
  auto corpus = load_corpus(args.inputs);
  if (!corpus) return kExitUsage;
  std::unique_ptr<ProverBackend> backend = make_backend(args.fixture, args.backend_cmd, config);
  if (!backend) return kExitUsage;
  ProfileResult result =
      profile_corpus(corpus->documents, *backend, effective_profile_options(args, config));
  Millis budget_ms = args.budget_opt->count() > 0 ? args.budget_ms : config.session_budget_ms;
  BudgetCheck budget = budget_check(result.profile, budget_ms);
  if (json) {
    emit("profile", to_json(result, &budget));
  } else {
    std::cout << to_text(result, &budget);
  }
  bool failed = !budget.pass || !result.regressions.empty();
  return failed ? kExitDomainFailure : kExitSuccess;
}

// ----------------------------------------------------------------- swap ---

struct SwapArgs {
  ProfileArgs profile;
  bool apply = false;
  std::string out_dir;
  bool in_place = false;
};

int cmd_swap(bool json, const Config& config, const SwapArgs& args) {
  if (args.apply && !args.in_place && args.out_dir.empty()) {
    std::cerr << "error: --apply needs --write or --out-dir to store the rewritten theories\n";
    return kExitUsage;
  }
  auto corpus = load_corpus(args.profile.inputs);
  if (!corpus) return kExitUsage;
  std::unique_ptr<ProverBackend> backend =
      make_backend(args.profile.fixture, args.profile.backend_cmd, config);
  if (!backend) return kExitUsage;

  ProfileOptions options = effective_profile_options(args.profile, config);
  ProfileResult result = profile_corpus(corpus->documents, *backend, options);
  SwapOptions swap_options;
  swap_options.check_timeout_ms = options.check_timeout_ms;
  std::vector<SwapProposal> proposals =
      propose_swaps(result.profile, corpus->documents, *backend, swap_options);

  int applied = 0;
  if (args.apply) {
    applied = apply_swaps(corpus->documents, proposals);
    int write_status =
        write_documents(corpus->documents, corpus->paths, args.in_place, args.out_dir);
    if (write_status != kExitSuccess) return write_status;
  }
  if (json) {
    Json rows = Json::array();
    for (const SwapProposal& proposal : proposals) rows.push_back(to_json(proposal));
    Json payload{{"proposals", std::move(rows)}};
    if (args.apply) payload["applied"] = applied;
    emit("swap", std::move(payload));
  } else {
    std::cout << to_text(std::span<const SwapProposal>(proposals));
    if (args.apply) std::cout << "applied " << applied << " swap(s)\n";
  }
  return result.regressions.empty() ? kExitSuccess : kExitDomainFailure;
}

// ----------------------------------------------------------- plan-split ---

int cmd_plan_split(bool json, const std::vector<std::string>& args, const std::string& units_path,
                   const std::vector<Millis>& build_ms) {
  std::vector<BuildUnit> units;
  if (!units_path.empty()) {
    std::ifstream in(units_path);
    if (!in) {
      std::cerr << "error: cannot read unit list '" << units_path << "'\n";
      return kExitUsage;
    }
    std::vector<ParseDiagnostic> diagnostics;
    units = parse_unit_list(in, &diagnostics);
    print_diagnostics(units_path, diagnostics);
  } else {
    auto corpus = load_corpus(args);
    if (!corpus) return kExitUsage;
    units = units_from_documents(corpus->documents, build_ms);
  }
  SplitPlan plan = plan_split(std::move(units));
  if (json) {
    emit("plan-split", to_json(plan));
  } else {
    std::cout << to_text(plan);
  }
  return kExitSuccess;
}

// ---------------------------------------------------------- analyze-log ---

struct AnalyzeArgs {
  std::string input;
  bool count_only = false;
  std::string prefix;
  std::string rules_path;
  std::vector<std::string> field_map;
  CLI::Option* prefix_opt = nullptr;
};

bool apply_field_map(const std::vector<std::string>& pairs, LogFieldMap& fields) {
  for (const std::string& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      std::cerr << "error: --field-map expects key=name entries, got '" << pair << "'\n";
      return false;
    }
    std::string key = pair.substr(0, eq);
    std::string name = pair.substr(eq + 1);
    if (key == "ts") {
      fields.timestamp = name;
    } else if (key == "role") {
      fields.role = name;
    } else if (key == "text") {
      fields.text = name;
    } else if (key == "tools") {
      fields.tools = name;
    } else if (key == "kind") {
      fields.tool_kind = name;
    } else if (key == "payload") {
      fields.tool_payload = name;
    } else {
      std::cerr << "error: unknown --field-map key '" << key
                << "' (expected ts, role, text, tools, kind or payload)\n";
      return false;
    }
  }
  return true;
}

int cmd_analyze_log(bool json, const Config& config, const AnalyzeArgs& args) {
  IngestOptions ingest_options;
  if (!apply_field_map(args.field_map, ingest_options.fields)) return kExitUsage;

  std::ifstream file_in;
  std::istream* in = &std::cin;
  std::string source = "<stdin>";
  if (args.input != "-") {
    file_in.open(args.input, std::ios::binary);
    if (!file_in) {
      std::cerr << "error: cannot read log '" << args.input << "'\n";
      return kExitUsage;
    }
    in = &file_in;
    source = args.input;
  }

  if (args.count_only) {
    IngestCounts counts = ingest_log_count(*in, ingest_options);
    if (json) {
      emit("log-count", Json{{"records", counts.records},
                             {"malformed", counts.malformed},
                             {"lines_read", counts.lines_read}});
    } else {
      std::cout << counts.records << " record(s), " << counts.malformed << " malformed, "
                << counts.lines_read << " line(s)\n";
    }
    return kExitSuccess;
  }

  IngestResult ingested = ingest_log(*in, ingest_options);
  print_diagnostics(source, ingested.diagnostics);

  StatsOptions stats_options;
  stats_options.automated_prompt_prefix =
      args.prefix_opt->count() > 0 ? args.prefix : config.automated_prompt_prefix;
  SessionStats stats = compute_stats(ingested.records, stats_options);

  std::vector<ThemeRule> rules;
  const std::string& rules_path =
      !args.rules_path.empty() ? args.rules_path : config.theme_rules_path;
  if (!rules_path.empty()) {
    std::ifstream rules_in(rules_path);
    if (!rules_in) {
      std::cerr << "error: cannot read theme rules '" << rules_path << "'\n";
      return kExitUsage;
    }
    std::vector<ParseDiagnostic> diagnostics;
    rules = load_theme_rules(rules_in, &diagnostics);
    print_diagnostics(rules_path, diagnostics);
  } else {
    rules = default_theme_rules();
  }
  InterventionReport interventions = intervention_report(ingested.records, rules, stats_options);

  if (json) {
    emit("analyze-log",
         Json{{"stats", to_json(stats)}, {"interventions", to_json(interventions)}});
  } else {
    std::cout << to_text(stats) << to_text(interventions);
  }
  return kExitSuccess;
}

// ----------------------------------------------------------------- main ---

int run_cli(int argc, char** argv) {
  CLI::App app{"sorry-first proof development toolkit"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string format = "text";
  bool show_config = false;
  app.add_option("-c,--config", config_path, "configuration file (key = value lines)");
  app.add_option("-f,--format", format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_flag("--show-config", show_config, "print the effective configuration and exit");

  std::vector<std::string> parse_inputs;
  CLI::App* parse_cmd = app.add_subcommand("parse", "parse theories and print the canonical form");
  parse_cmd->add_option("files", parse_inputs, "theory files or directories")->required();

  std::vector<std::string> census_inputs;
  CLI::App* census_cmd = app.add_subcommand("census", "count closing methods and proof structure");
  census_cmd->add_option("files", census_inputs, "theory files or directories")->required();

  std::vector<std::string> sizes_inputs;
  std::string sizes_sections;
  std::string sizes_attach = "following";
  CLI::App* sizes_cmd = app.add_subcommand("sizes", "per-result proof size report");
  sizes_cmd->add_option("files", sizes_inputs, "theory files or directories")->required();
  sizes_cmd->add_option("--sections", sizes_sections,
                        "file of `name section` rows overriding annotation sections");
  sizes_cmd->add_option("--attach", sizes_attach, "helper attachment direction")
      ->check(CLI::IsMember({"following", "preceding"}))
      ->capture_default_str();

  std::vector<std::string> sorries_inputs;
  CLI::App* sorries_cmd = app.add_subcommand("sorries", "list placeholder proof sites");
  sorries_cmd->add_option("files", sorries_inputs, "theory files or directories")->required();

  std::vector<std::string> validate_inputs;
  std::string validate_region;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check skeleton discipline (new code closes with sorry)");
  validate_cmd->add_option("files", validate_inputs, "theory files or directories")->required();
  validate_cmd->add_option("--new-region", validate_region,
                           "restrict the check to canonical lines START:END");

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "drive placeholders to zero against a backend");
  run_cmd->add_option("files", run_args.inputs, "theory files or directories")->required();
  run_cmd->add_option("--fixture", run_args.fixture, "scripted backend fixture (JSONL)");
  run_cmd->add_option("--backend-cmd", run_args.backend_cmd,
                      "external checker command template");
  run_cmd->add_option("--decomposer-cmd", run_args.decomposer_cmd,
                      "external decomposer command (goal on stdin, subgoal lines on stdout)");
  run_cmd->add_option("--suggestions", run_args.suggestions_path,
                      "preload harvested suggestions (JSONL)");
  run_cmd->add_option("--out-dir", run_args.out_dir, "write resulting theories here");
  run_cmd->add_flag("--write", run_args.in_place, "rewrite the input files in place");
  run_args.timeout_opt =
      run_cmd->add_option("--timeout-s", run_args.timeout_s, "per-goal suggestion timeout")
          ->check(CLI::PositiveNumber);
  run_args.workers_opt = run_cmd->add_option("--workers", run_args.workers, "harvest threads")
                             ->check(CLI::PositiveNumber);
  run_args.iterations_opt =
      run_cmd->add_option("--max-iterations", run_args.max_iterations, "iteration cap")
          ->check(CLI::PositiveNumber);

  ProfileArgs profile_args;
  CLI::App* profile_cmd = app.add_subcommand("profile", "re-check and time every closed step");
  profile_cmd->add_option("files", profile_args.inputs, "theory files or directories")->required();
  profile_cmd->add_option("--fixture", profile_args.fixture, "scripted backend fixture (JSONL)");
  profile_cmd->add_option("--backend-cmd", profile_args.backend_cmd,
                          "external checker command template");
  profile_args.budget_opt =
      profile_cmd->add_option("--budget-ms", profile_args.budget_ms, "session build budget")
          ->check(CLI::PositiveNumber);
  profile_args.threshold_opt =
      profile_cmd->add_option("--threshold-ms", profile_args.threshold_ms, "slow-step threshold")
          ->check(CLI::PositiveNumber);
  profile_cmd
      ->add_option("--check-timeout-ms", profile_args.check_timeout_ms, "per-check timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  profile_args.workers_opt =
      profile_cmd->add_option("--workers", profile_args.workers, "checker threads")
          ->check(CLI::PositiveNumber);

  SwapArgs swap_args;
  CLI::App* swap_cmd =
      app.add_subcommand("swap", "propose verified method swaps for slow equality-free steps");
  swap_cmd->add_option("files", swap_args.profile.inputs, "theory files or directories")
      ->required();
  swap_cmd->add_option("--fixture", swap_args.profile.fixture, "scripted backend fixture (JSONL)");
  swap_cmd->add_option("--backend-cmd", swap_args.profile.backend_cmd,
                       "external checker command template");
  swap_args.profile.threshold_opt =
      swap_cmd->add_option("--threshold-ms", swap_args.profile.threshold_ms, "slow-step threshold")
          ->check(CLI::PositiveNumber);
  swap_cmd
      ->add_option("--check-timeout-ms", swap_args.profile.check_timeout_ms, "per-check timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  swap_args.profile.workers_opt =
      swap_cmd->add_option("--workers", swap_args.profile.workers, "checker threads")
          ->check(CLI::PositiveNumber);
  swap_cmd->add_flag("--apply", swap_args.apply, "apply verified faster swaps");
  swap_cmd->add_option("--out-dir", swap_args.out_dir, "write rewritten theories here");
  swap_cmd->add_flag("--write", swap_args.in_place, "rewrite the input files in place");

  std::vector<std::string> plan_inputs;
  std::string plan_units_path;
  std::vector<Millis> plan_build_ms;
  CLI::App* plan_cmd =
      app.add_subcommand("plan-split", "pick the cache/live cut that minimizes rebuild cost");
  plan_cmd->add_option("files", plan_inputs, "theory files or directories (with --build-ms)");
  CLI::Option* plan_units_opt = plan_cmd->add_option(
      "--units", plan_units_path, "unit list file (`name build_ms [edit_weight]` rows)");
  CLI::Option* plan_build_opt =
      plan_cmd
          ->add_option("--build-ms", plan_build_ms,
                       "comma-separated per-theory build times (pairs with files)")
          ->delimiter(',');
  plan_units_opt->excludes(plan_build_opt);

  AnalyzeArgs analyze_args;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze-log", "session statistics from an agent JSONL log");
  analyze_cmd->add_option("log", analyze_args.input, "log file, or - for stdin")->required();
  analyze_cmd->add_flag("--count-only", analyze_args.count_only,
                        "streaming record count (flat memory)");
  analyze_args.prefix_opt = analyze_cmd->add_option(
      "--prefix", analyze_args.prefix, "automated prompt prefix");
  analyze_cmd->add_option("--rules", analyze_args.rules_path,
                          "theme rule file (`theme: phrase` rows)");
  analyze_cmd
      ->add_option("--field-map", analyze_args.field_map,
                   "rename input fields, e.g. ts=time,role=who")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::ParseError& error) {
    std::cerr << error.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::vector<std::string> config_errors;
  Config config = load_config(config_path, config_errors);
  config.validate(config_errors);
  if (!config_errors.empty()) {
    for (const std::string& error : config_errors) std::cerr << "config: " << error << '\n';
    return kExitUsage;
  }

  bool json = format == "json";
  if (show_config) {
    if (json) {
      emit("config", config_json(config));
    } else {
      std::cout << config.describe();
    }
    return kExitSuccess;
  }

  try {
    if (app.got_subcommand(parse_cmd)) return cmd_parse(json, parse_inputs);
    if (app.got_subcommand(census_cmd)) return cmd_census(json, census_inputs);
    if (app.got_subcommand(sizes_cmd)) {
      return cmd_sizes(json, sizes_inputs, sizes_sections, sizes_attach);
    }
    if (app.got_subcommand(sorries_cmd)) return cmd_sorries(json, sorries_inputs);
    if (app.got_subcommand(validate_cmd)) {
      return cmd_validate(json, validate_inputs, validate_region);
    }
    if (app.got_subcommand(run_cmd)) return cmd_run(json, config, run_args);
    if (app.got_subcommand(profile_cmd)) return cmd_profile(json, config, profile_args);
    if (app.got_subcommand(swap_cmd)) return cmd_swap(json, config, swap_args);
    if (app.got_subcommand(plan_cmd)) {
      return cmd_plan_split(json, plan_inputs, plan_units_path, plan_build_ms);
    }
    if (app.got_subcommand(analyze_cmd)) return cmd_analyze_log(json, config, analyze_args);
  } catch (const TransportError& error) {
    std::cerr << "transport error: " << error.what() << " (exit status " << error.exit_status
              << ")\n";
    return kExitUsage;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitUsage;
  }

  std::cerr << "error: a subcommand is required\n\n" << app.help();
  return kExitUsage;
}

}  // namespace
}  // namespace proofforge

int main(int argc, char** argv) { return proofforge::run_cli(argc, argv); }
