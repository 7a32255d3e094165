// End-to-end checks of the installed command-line surface. The binary under
// test comes from $PROOFFORGE_CLI, fixtures from $PROOFFORGE_TEST_DATA; both
// are set by the test harness.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "proofforge/parser.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("proofforge_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string cli_path() {
  const char* cli = std::getenv("PROOFFORGE_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "PROOFFORGE_CLI must name the binary under test");
  return cli;
}

std::string data_path(const std::string& name) {
  const char* data = std::getenv("PROOFFORGE_TEST_DATA");
  REQUIRE_MESSAGE(data != nullptr, "PROOFFORGE_TEST_DATA must name the fixture directory");
  return (fs::path(data) / name).string();
}

// Runs the CLI through the shell so stdin redirects and environment
// prefixes stay expressible in the argument string.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  fs::path out_file = scratch_dir() / ("out" + std::to_string(counter));
  fs::path err_file = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;
  std::string command = env_prefix + (env_prefix.empty() ? "" : " ") + "\"" + cli_path() + "\" " +
                        args + " >" + out_file.string() + " 2>" + err_file.string();
  int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

json parse_json(const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  REQUIRE_MESSAGE(!parsed.is_discarded(), ("stdout is not valid JSON: " + text));
  return parsed;
}

json enveloped(const CliResult& result, const std::string& kind) {
  json envelope = parse_json(result.out);
  CHECK(envelope["schema_version"] == 1);
  CHECK(envelope["kind"] == kind);
  return envelope["payload"];
}

}  // namespace

TEST_CASE("sorries prints the placeholder count") {
  CliResult clean = run_cli("sorries " + data_path("clean.thy"));
  CHECK(clean.exit_code == 0);
  CHECK(clean.out == "0\n");

  CliResult pending = run_cli("sorries " + data_path("pending.thy"));
  CHECK(pending.exit_code == 0);
  CHECK(pending.out.substr(0, 2) == "3\n");
  CHECK(pending.out.find("Pending#hole_chain#0.0") != std::string::npos);

  CliResult as_json = run_cli("--format json sorries " + data_path("pending.thy"));
  json payload = enveloped(as_json, "sorries");
  CHECK(payload["count"] == 3);
  CHECK(payload["sites"].size() == 3);
  CHECK(payload["sites"][0]["goal"] == "Pending#hole_one#0");
  CHECK(payload["sites"][0]["status"] == "pending");
}

TEST_CASE("validate enforces the new-code region") {
  CliResult fresh = run_cli("validate --new-region 10:50 " + data_path("violations.thy"));
  CHECK(fresh.exit_code == 1);
  CHECK(fresh.out.find("Fresh#sneaky_patch#0") != std::string::npos);
  CHECK(fresh.out.find("by auto") != std::string::npos);
  CHECK(fresh.out.find("1 violation(s)") != std::string::npos);

  CliResult whole = run_cli("validate " + data_path("violations.thy"));
  CHECK(whole.exit_code == 1);
  CHECK(whole.out.find("2 violation(s)") != std::string::npos);

  CliResult header_only = run_cli("validate --new-region 1:4 " + data_path("violations.thy"));
  CHECK(header_only.exit_code == 0);
  CHECK(header_only.out.find("0 violation(s)") != std::string::npos);

  CliResult shell = run_cli("validate " + data_path("sorry_only.thy"));
  CHECK(shell.exit_code == 0);

  CliResult six = run_cli("--format json validate " + data_path("prohibited_six.thy"));
  CHECK(six.exit_code == 1);
  json payload = enveloped(six, "validate");
  CHECK(payload["count"] == 6);
  CHECK(payload["violations"].size() == 6);

  CliResult backwards = run_cli("validate --new-region 50:10 " + data_path("violations.thy"));
  CHECK(backwards.exit_code == 2);
  CHECK(backwards.err.find("--new-region") != std::string::npos);
}

TEST_CASE("census reports the published field names") {
  CliResult text = run_cli("census " + data_path("clean.thy"));
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("tactic census") != std::string::npos);
  CHECK(text.out.find("structure census") != std::string::npos);

  CliResult as_json = run_cli("--format json census " + data_path("clean.thy"));
  json payload = enveloped(as_json, "census");
  CHECK(payload["tactic"]["blast"] == 1);
  CHECK(payload["tactic"]["metis"] == 1);
  CHECK(payload["tactic"]["simp"] == 1);
  CHECK(payload["tactic"]["sorry"] == 0);
  CHECK(payload["tactic"]["unfolding"] == 0);
  CHECK(payload["structure"]["have"] == 1);
  CHECK(payload["structure"]["show"] == 1);
  CHECK(payload["structure"]["obtain"] == 0);
  CHECK(payload["structure"]["proof_block"] == 1);
}

TEST_CASE("parse emits exactly the canonical serialization") {
  std::string source = slurp(data_path("pending.thy"));
  proofforge::ParseResult expected = proofforge::parse_theory(source);
  REQUIRE(expected.ok());

  CliResult text = run_cli("parse " + data_path("pending.thy"));
  CHECK(text.exit_code == 0);
  CHECK(text.out == proofforge::serialize(*expected.document));

  fs::path broken = scratch_dir() / "broken.thy";
  spit(broken, "theory Broken\nbegin\nlemma oops\nend\n");
  CliResult failure = run_cli("parse " + broken.string());
  CHECK(failure.exit_code == 2);
  CHECK(!failure.err.empty());
}

TEST_CASE("sizes measures annotated results and helper attachment") {
  CliResult following = run_cli("--format json sizes " + data_path("clean.thy"));
  CHECK(following.exit_code == 0);
  json payload = enveloped(following, "sizes");
  REQUIRE(payload["results"].size() == 1);
  CHECK(payload["results"][0]["result"] == "tidy_union");
  CHECK(payload["results"][0]["section"] == 2);
  CHECK(payload["results"][0]["helper_count"] == 0);
  CHECK(payload["orphans"].size() == 1);

  CliResult preceding =
      run_cli("--format json sizes --attach preceding " + data_path("clean.thy"));
  payload = enveloped(preceding, "sizes");
  CHECK(payload["results"][0]["helper_count"] == 1);
  CHECK(payload["results"][0]["section_lines"] == 6);
  CHECK(payload["total_helpers"] == 1);
  CHECK(payload["helper_ratio"] == 1.0);
  CHECK(payload["orphans"].empty());

  fs::path sections = scratch_dir() / "sections.txt";
  spit(sections, "# name section\ntidy_union 9\n");
  CliResult mapped = run_cli("--format json sizes --sections " + sections.string() + " " +
                             data_path("clean.thy"));
  CHECK(mapped.exit_code == 0);
  CHECK(enveloped(mapped, "sizes")["results"][0]["section"] == 9);
}

TEST_CASE("run resolves every placeholder when the fixture covers the corpus") {
  fs::path out_dir = scratch_dir() / "closure_out";
  CliResult run = run_cli("--format json run --fixture " + data_path("closure_fixture.jsonl") +
                          " --out-dir " + out_dir.string() + " " + data_path("closure.thy"));
  CHECK(run.exit_code == 0);
  json payload = enveloped(run, "run");
  CHECK(payload["success"] == true);
  CHECK(payload["resolved"].size() == 5);
  CHECK(payload["unresolved"].empty());
  CHECK(payload["iterations"] == 1);

  std::string rewritten = slurp(out_dir / "Closure.thy");
  CHECK(rewritten.find("sorry") == std::string::npos);
  CHECK(rewritten.find("by (metis dense_sub)") != std::string::npos);

  CliResult recount = run_cli("sorries " + (out_dir / "Closure.thy").string());
  CHECK(recount.exit_code == 0);
  CHECK(recount.out == "0\n");
}

TEST_CASE("run accepts preloaded suggestions") {
  CliResult run = run_cli("--format json run --fixture " + data_path("closure_fixture.jsonl") +
                          " --suggestions " + data_path("suggestions.jsonl") + " " +
                          data_path("closure.thy"));
  CHECK(run.exit_code == 0);
  CHECK(enveloped(run, "run")["success"] == true);
}

TEST_CASE("run lists exactly the unprovable goal and exits 1") {
  CliResult run = run_cli("--format json run --fixture " + data_path("honesty_fixture.jsonl") +
                          " " + data_path("honesty.thy"));
  CHECK(run.exit_code == 1);
  json payload = enveloped(run, "run");
  CHECK(payload["success"] == false);
  CHECK(payload["unresolved"] == json::array({"Honesty#gap#0.1"}));
  CHECK(payload["resolved"].size() == 4);

  CliResult text = run_cli("run --fixture " + data_path("honesty_fixture.jsonl") + " " +
                           data_path("honesty.thy"));
  CHECK(text.exit_code == 1);
  CHECK(text.out.find("workflow incomplete") != std::string::npos);
  CHECK(text.out.find("unresolved: Honesty#gap#0.1") != std::string::npos);
}

TEST_CASE("profile checks the session budget") {
  CliResult pass = run_cli("profile --budget-ms 120000 --fixture " +
                           data_path("fast_fixture.jsonl") + " " + data_path("fast_corpus"));
  CHECK(pass.exit_code == 0);
  CHECK(pass.out.find("budget PASS (margin 108500 ms)") != std::string::npos);

  CliResult as_json = run_cli("--format json profile --budget-ms 120000 --fixture " +
                              data_path("fast_fixture.jsonl") + " " + data_path("fast_corpus"));
  json payload = enveloped(as_json, "profile");
  CHECK(payload["total_ms"] == 11500);
  CHECK(payload["entries"].size() == 10);
  CHECK(payload["slow"].empty());
  CHECK(payload["budget_pass"] == true);
  CHECK(payload["budget_margin_ms"] == 108500);

  CliResult fail = run_cli("--format json profile --budget-ms 10000 --fixture " +
                           data_path("fast_fixture.jsonl") + " " + data_path("fast_corpus"));
  CHECK(fail.exit_code == 1);
  payload = enveloped(fail, "profile");
  CHECK(payload["budget_pass"] == false);
  CHECK(payload["budget_margin_ms"] == -1500);

  CliResult slow = run_cli("--format json profile --fixture " +
                           data_path("tenfold_fixture.jsonl") + " " + data_path("tenfold.thy"));
  CHECK(slow.exit_code == 0);
  payload = enveloped(slow, "profile");
  CHECK(payload["total_ms"] == 115000);
  CHECK(payload["slow"].size() == 10);
  CHECK(payload["budget_pass"] == true);
  CHECK(payload["budget_margin_ms"] == 5000);
}

TEST_CASE("flags override configuration values") {
  fs::path config = scratch_dir() / "lenient.cfg";
  spit(config, "slow_threshold_ms = 100000\n");
  std::string base = "profile --fixture " + data_path("tenfold_fixture.jsonl") + " " +
                     data_path("tenfold.thy") + " --config " + config.string();

  CliResult lenient = run_cli("--format json " + base);
  CHECK(enveloped(lenient, "profile")["slow"].empty());

  CliResult strict = run_cli("--format json " + base + " --threshold-ms 2000");
  CHECK(enveloped(strict, "profile")["slow"].size() == 10);
}

TEST_CASE("swap proposes, applies and persists verified method swaps") {
  CliResult propose = run_cli("--format json swap --fixture " +
                              data_path("tenfold_fixture.jsonl") + " " + data_path("tenfold.thy"));
  CHECK(propose.exit_code == 0);
  json payload = enveloped(propose, "swap");
  REQUIRE(payload["proposals"].size() == 10);
  for (const json& proposal : payload["proposals"]) {
    CHECK(proposal["from"] == "metis");
    CHECK(proposal["to"] == "meson");
    CHECK(proposal["verified"] == true);
    CHECK(proposal["old_ms"] == 11500);
    CHECK(proposal["new_ms"] == 1150);
  }
  CHECK(!payload.contains("applied"));

  fs::path out_dir = scratch_dir() / "swapped";
  CliResult apply = run_cli("--format json swap --apply --out-dir " + out_dir.string() +
                            " --fixture " + data_path("tenfold_fixture.jsonl") + " " +
                            data_path("tenfold.thy"));
  CHECK(apply.exit_code == 0);
  CHECK(enveloped(apply, "swap")["applied"] == 10);

  std::string rewritten = slurp(out_dir / "Tenfold.thy");
  CHECK(rewritten.find("metis") == std::string::npos);

  CliResult reprofile = run_cli("--format json profile --fixture " +
                                data_path("tenfold_fixture.jsonl") + " " +
                                (out_dir / "Tenfold.thy").string());
  CHECK(reprofile.exit_code == 0);
  CHECK(enveloped(reprofile, "profile")["total_ms"] == 11500);

  CliResult unstored = run_cli("swap --apply --fixture " + data_path("tenfold_fixture.jsonl") +
                               " " + data_path("tenfold.thy"));
  CHECK(unstored.exit_code == 2);
}

TEST_CASE("plan-split picks the cache cut") {
  CliResult plan = run_cli("--format json plan-split --units " + data_path("units.txt"));
  CHECK(plan.exit_code == 0);
  json payload = enveloped(plan, "plan-split");
  CHECK(payload["cut_index"] == 3);
  CHECK(payload["expected_incremental_ms"] == 12500.0);
  CHECK(payload["units"].size() == 5);

  CliResult text = run_cli("plan-split --units " + data_path("units.txt"));
  CHECK(text.out.find("cut before index 3") != std::string::npos);
  CHECK(text.out.find("12500.0 ms") != std::string::npos);

  CliResult derived = run_cli("plan-split " + data_path("fast_corpus") + " --build-ms 100");
  CHECK(derived.exit_code == 0);

  CliResult mismatch = run_cli("plan-split " + data_path("fast_corpus") + " --build-ms 100,200");
  CHECK(mismatch.exit_code == 2);
}

TEST_CASE("analyze-log reports session statistics and interventions") {
  CliResult stats = run_cli("--format json analyze-log " + data_path("session.jsonl"));
  CHECK(stats.exit_code == 0);
  json payload = enveloped(stats, "analyze-log");
  CHECK(payload["stats"]["user_msgs"] == 4);
  CHECK(payload["stats"]["automated_prompts"] == 2);
  CHECK(payload["stats"]["manual_msgs"] == 2);
  CHECK(payload["stats"]["automation_ratio"] == 0.5);
  CHECK(payload["stats"]["bash_calls"] == 2);
  CHECK(payload["stats"]["build_cmds"] == 1);
  CHECK(payload["stats"]["process_theories_cmds"] == 1);
  CHECK(payload["stats"]["edits"] == 1);
  CHECK(payload["stats"]["reads"] == 1);
  CHECK(payload["stats"]["session_count"] == 2);
  CHECK(payload["stats"]["duration_median_min"] == 13.0);
  CHECK(payload["interventions"]["manual_total"] == 2);
  CHECK(payload["interventions"]["themes"]["tactic_explosion"].size() == 1);
  CHECK(payload["interventions"]["themes"]["cherry_picking"].size() == 1);
}

TEST_CASE("analyze-log count mode and stdin input") {
  CliResult count = run_cli("analyze-log --count-only " + data_path("session.jsonl"));
  CHECK(count.exit_code == 0);
  CHECK(count.out == "8 record(s), 0 malformed, 8 line(s)\n");

  CliResult piped = run_cli("analyze-log --count-only - < " + data_path("session.jsonl"));
  CHECK(piped.exit_code == 0);
  CHECK(piped.out == count.out);
}

TEST_CASE("analyze-log adapts alternative field names") {
  CliResult mapped = run_cli(
      "--format json analyze-log --field-map ts=time,role=who,text=content,tools=actions,"
      "kind=type,payload=arg " +
      data_path("session_alt.jsonl"));
  CHECK(mapped.exit_code == 0);
  json payload = enveloped(mapped, "analyze-log");
  CHECK(payload["stats"]["user_msgs"] == 2);
  CHECK(payload["stats"]["bash_calls"] == 1);
  CHECK(payload["stats"]["build_cmds"] == 1);

  CliResult bad = run_cli("analyze-log --field-map when=time " + data_path("session_alt.jsonl"));
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("field-map") != std::string::npos);
}

TEST_CASE("analyze-log honours a custom rules file") {
  CliResult custom = run_cli("--format json analyze-log --rules " + data_path("theme_rules.txt") +
                             " " + data_path("session.jsonl"));
  CHECK(custom.exit_code == 0);
  json payload = enveloped(custom, "analyze-log");
  CHECK(payload["interventions"]["manual_total"] == 2);
  CHECK(payload["interventions"]["themes"]["other"].size() == 2);
}

TEST_CASE("show-config prints the layered effective configuration") {
  CliResult defaults = run_cli("--show-config");
  CHECK(defaults.exit_code == 0);
  CHECK(defaults.out.find("hammer_timeout_s = 10\n") != std::string::npos);
  CHECK(defaults.out.find("session_budget_ms = 120000\n") != std::string::npos);

  fs::path explicit_file = scratch_dir() / "explicit.cfg";
  spit(explicit_file, "workers = 6\nhammer_timeout_s = 45\n");
  fs::path env_file = scratch_dir() / "env.cfg";
  spit(env_file, "workers = 2\nslow_threshold_ms = 750\n");

  CliResult from_env =
      run_cli("--show-config", "PROOFFORGE_CONFIG=" + env_file.string());
  CHECK(from_env.exit_code == 0);
  CHECK(from_env.out.find("workers = 2\n") != std::string::npos);
  CHECK(from_env.out.find("slow_threshold_ms = 750\n") != std::string::npos);

  CliResult layered = run_cli("--show-config --config " + explicit_file.string(),
                              "PROOFFORGE_CONFIG=" + env_file.string());
  CHECK(layered.exit_code == 0);
  CHECK(layered.out.find("workers = 6\n") != std::string::npos);
  CHECK(layered.out.find("hammer_timeout_s = 45\n") != std::string::npos);
  CHECK(layered.out.find("slow_threshold_ms = 750\n") != std::string::npos);

  CliResult as_json = run_cli("--format json --show-config --config " + explicit_file.string());
  json payload = enveloped(as_json, "config");
  CHECK(payload["workers"] == 6);
  CHECK(payload["hammer_timeout_s"] == 45);

  CliResult missing = run_cli("--show-config --config " + (scratch_dir() / "nope.cfg").string());
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("config") != std::string::npos);

  CliResult missing_env =
      run_cli("--show-config", "PROOFFORGE_CONFIG=" + (scratch_dir() / "gone.cfg").string());
  CHECK(missing_env.exit_code == 2);
}

TEST_CASE("usage errors exit 2 with usage text") {
  CliResult unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  CliResult bare = run_cli("");
  CHECK(bare.exit_code == 2);

  CliResult missing = run_cli("census " + (scratch_dir() / "absent.thy").string());
  CHECK(missing.exit_code == 2);

  CliResult bad_format = run_cli("--format yaml census " + data_path("clean.thy"));
  CHECK(bad_format.exit_code == 2);

  CliResult bad_budget = run_cli("profile --budget-ms -5 " + data_path("tenfold.thy"));
  CHECK(bad_budget.exit_code == 2);

  CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("analyze-log") != std::string::npos);
}
