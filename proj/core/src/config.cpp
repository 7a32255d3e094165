#include "proofforge/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace proofforge {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

bool parse_int64(const std::string& text, std::int64_t& out) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(text, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == text.size();
}

}  // namespace

void Config::apply_line(const std::string& key, const std::string& value,
                        std::vector<std::string>& errors) {
  auto as_int = [&](std::int64_t min_value, std::int64_t& slot) {
    std::int64_t parsed = 0;
    if (!parse_int64(value, parsed) || parsed < min_value) {
      errors.push_back("config key '" + key + "' needs an integer >= " +
                       std::to_string(min_value) + ", got '" + value + "'");
      return;
    }
    slot = parsed;
  };
  if (key == "hammer_timeout_s") {
    std::int64_t v = hammer_timeout_s;
    as_int(1, v);
    hammer_timeout_s = static_cast<int>(v);
  } else if (key == "slow_threshold_ms") {
    as_int(1, slow_threshold_ms);
  } else if (key == "session_budget_ms") {
    as_int(1, session_budget_ms);
  } else if (key == "workers") {
    std::int64_t v = workers;
    as_int(1, v);
    workers = static_cast<unsigned>(v);
  } else if (key == "max_iterations") {
    std::int64_t v = max_iterations;
    as_int(1, v);
    max_iterations = static_cast<int>(v);
  } else if (key == "automated_prompt_prefix") {
    automated_prompt_prefix = value;
  } else if (key == "backend_command") {
    backend_command = value;
  } else if (key == "theme_rules_path") {
    theme_rules_path = value;
  } else {
    errors.push_back("unknown config key '" + key + "'");
  }
}

void Config::apply(std::istream& in, std::vector<std::string>& errors) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      errors.push_back("config line " + std::to_string(line_no) + ": expected `key = value`");
      continue;
    }
    apply_line(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)), errors);
  }
}

void Config::validate(std::vector<std::string>& errors) const {
  if (hammer_timeout_s <= 0) errors.push_back("hammer_timeout_s must be positive");
  if (slow_threshold_ms <= 0) errors.push_back("slow_threshold_ms must be positive");
  if (session_budget_ms <= 0) errors.push_back("session_budget_ms must be positive");
  if (workers == 0) errors.push_back("workers must be at least 1");
  if (max_iterations <= 0) errors.push_back("max_iterations must be positive");
}

std::string Config::describe() const {
  std::ostringstream out;
  out << "hammer_timeout_s = " << hammer_timeout_s << '\n';
  out << "slow_threshold_ms = " << slow_threshold_ms << '\n';
  out << "session_budget_ms = " << session_budget_ms << '\n';
  out << "workers = " << workers << '\n';
  out << "max_iterations = " << max_iterations << '\n';
  out << "automated_prompt_prefix = " << automated_prompt_prefix << '\n';
  out << "backend_command = " << backend_command << '\n';
  out << "theme_rules_path = " << theme_rules_path << '\n';
  return out.str();
}

Config load_config(const std::string& explicit_path, std::vector<std::string>& errors) {
  Config config;
  auto apply_file = [&](const std::string& path, const char* origin) {
    std::ifstream in(path);
    if (!in) {
      errors.push_back(std::string(origin) + " config file '" + path + "' is not readable");
      return;
    }
    config.apply(in, errors);
  };
  if (const char* env = std::getenv("PROOFFORGE_CONFIG"); env != nullptr && *env != '\0') {
    apply_file(env, "PROOFFORGE_CONFIG");
  }
  if (!explicit_path.empty()) {
    apply_file(explicit_path, "named");
  }
  config.validate(errors);
  return config;
}

}  // namespace proofforge
