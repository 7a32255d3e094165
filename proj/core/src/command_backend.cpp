#include "proofforge/command_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <regex>
#include <sstream>

#include "proofforge/parser.hpp"

namespace proofforge {

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

Millis now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    char name[] = "/tmp/proofforge-XXXXXX";
    int fd = ::mkstemp(name);
    if (fd < 0) throw TransportError("cannot create temp file", -1);
    path = name;
    std::size_t written = 0;
    while (written < content.size()) {
      ssize_t n = ::write(fd, content.data() + written, content.size() - written);
      if (n < 0) {
        ::close(fd);
        ::unlink(name);
        throw TransportError("cannot write temp file", -1);
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() {
    if (!path.empty()) ::unlink(path.c_str());
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
};

std::string substitute_all(std::string text, std::string_view key, const std::string& value) {
  std::string token = "{" + std::string(key) + "}";
  std::size_t at = 0;
  while ((at = text.find(token, at)) != std::string::npos) {
    text.replace(at, token.size(), value);
    at += value.size();
  }
  return text;
}

}  // namespace

SubprocessResult run_subprocess(const std::string& shell_command, const std::string& input,
                                Millis timeout_ms) {
  ignore_sigpipe_once();
  int in_pipe[2] = {-1, -1};
  int out_pipe[2] = {-1, -1};
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw TransportError("cannot create pipes", -1);
  }
  Millis start = now_ms();
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw TransportError("fork failed", -1);
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", shell_command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);

  // The goal/document payload is small; write it up front, tolerate a child
  // that exits without reading.
  std::size_t written = 0;
  while (written < input.size()) {
    ssize_t n = ::write(in_pipe[1], input.data() + written, input.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    written += static_cast<std::size_t>(n);
  }
  ::close(in_pipe[1]);

  SubprocessResult result;
  char buffer[4096];
  for (;;) {
    Millis waited = now_ms() - start;
    Millis remaining = timeout_ms - waited;
    if (remaining <= 0) {
      result.timed_out = true;
      break;
    }
    struct pollfd pfd = {out_pipe[0], POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (ready == 0) {
      result.timed_out = true;
      break;
    }
    ssize_t n = ::read(out_pipe[0], buffer, sizeof(buffer));
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;  // EOF
    result.output.append(buffer, static_cast<std::size_t>(n));
  }
  ::close(out_pipe[0]);

  if (result.timed_out) ::kill(-pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  result.elapsed_ms = now_ms() - start;
  if (WIFEXITED(status)) {
    result.exit_status = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signalled = true;
    result.exit_status = 128 + WTERMSIG(status);
  }
  if (result.timed_out) result.signalled = false;  // the kill was ours
  return result;
}

CommandProverBackend::CommandProverBackend(CommandBackendOptions options)
    : options_(std::move(options)) {}

namespace {

std::string render_command(const CommandBackendOptions& options, const std::string& file,
                           int line, Millis timeout_ms) {
  std::string cmd = options.command;
  cmd = substitute_all(std::move(cmd), "file", file);
  cmd = substitute_all(std::move(cmd), "line", std::to_string(line));
  cmd = substitute_all(std::move(cmd), "timeout_ms", std::to_string(timeout_ms));
  cmd = substitute_all(std::move(cmd), "timeout", std::to_string((timeout_ms + 999) / 1000));
  return cmd;
}

int step_line(const TheoryDocument& doc, const GoalId& goal) {
  const ProofStep* step = find_step(doc, goal.block, goal.step_path);
  if (step == nullptr) throw GoalNotFound(goal);
  return step->span.start_line;
}

void raise_on_transport_failure(const SubprocessResult& run) {
  if (run.signalled || run.exit_status == 126 || run.exit_status == 127) {
    throw TransportError("backend command unreachable (status " +
                             std::to_string(run.exit_status) + ")",
                         run.exit_status);
  }
}

}  // namespace

CheckResult CommandProverBackend::check(const TheoryDocument& doc, const GoalId& goal,
                                        const TacticCall& method, Millis timeout_ms) {
  CheckResult result;
  result.goal = goal;
  result.method_tried = method;
  TempFile file(serialize(doc));
  std::string cmd = render_command(options_, file.path, step_line(doc, goal), timeout_ms);
  SubprocessResult run = run_subprocess(cmd, method.raw_text + "\n", timeout_ms);
  result.elapsed_ms = run.elapsed_ms;
  if (run.timed_out) {
    result.status = CheckStatus::TIMEOUT;
    return result;
  }
  raise_on_transport_failure(run);
  result.status = run.exit_status == 0 ? CheckStatus::PROVED : CheckStatus::FAILED;
  return result;
}

std::vector<SuggestionRecord> CommandProverBackend::suggest(const TheoryDocument& doc,
                                                            const GoalId& goal,
                                                            Millis timeout_ms) {
  TempFile file(serialize(doc));
  std::string cmd = render_command(options_, file.path, step_line(doc, goal), timeout_ms);
  SubprocessResult run = run_subprocess(cmd, goal_text_for(doc, goal) + "\n", timeout_ms);
  if (!run.timed_out) raise_on_transport_failure(run);

  std::vector<SuggestionRecord> records;
  std::regex pattern(options_.suggestion_pattern);
  std::istringstream lines(run.output);
  std::string line;
  while (std::getline(lines, line)) {
    std::smatch match;
    if (!std::regex_search(line, match, pattern) || match.size() < 3) continue;
    SuggestionRecord record;
    record.goal = goal;
    record.method_text = match[1].str();
    record.elapsed_ms = std::strtoll(match[2].str().c_str(), nullptr, 10);
    record.provenance = Provenance::HAMMER;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace proofforge
