#include "cmat/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "cmat/error.hpp"

namespace cmat {

namespace {

enum class Kind { Int, Real, Bool, Text, RealList };

struct KeySpec {
  Kind kind;
  double min = -HUGE_VAL;
  bool strict = false;  // value must exceed min rather than reach it
  std::vector<std::string> choices = {};
};

using Table = std::map<std::string, KeySpec>;

const KeySpec kInt1{Kind::Int, 1.0};
const KeySpec kReal{Kind::Real};
const KeySpec kPositive{Kind::Real, 0.0, true};
const KeySpec kNonNegative{Kind::Real, 0.0};
const KeySpec kBool{Kind::Bool};
const KeySpec kText{Kind::Text};
const KeySpec kPositiveList{Kind::RealList, 0.0, true};

void add_grid(Table& t) {
  t["grid.dim"] = {Kind::Int, 1.0, false, {"1", "2"}};
  t["grid.resolution"] = {Kind::Int, 4.0};
}

void add_form(Table& t, const std::string& section) {
  for (const char* k : {"a11", "a22", "re12", "im12"}) t[section + "." + k] = kReal;
  t[section + ".file"] = kText;
}

void add_solver(Table& t) {
  t["solver.max_newton_iters"] = kInt1;
  t["solver.residual_tol"] = kPositive;
  t["solver.linear_solver"] = {Kind::Text, -HUGE_VAL, false, {"gmres", "cg"}};
}

Table table_for(const std::string& command) {
  Table t;
  t["run.seed"] = {Kind::Int, 0.0};
  t["run.threads"] = kInt1;
  if (command == "solve") {
    add_grid(t);
    add_form(t, "form");
    add_solver(t);
    t["density.constant"] = kPositive;
    t["density.cosine_amplitude"] = kReal;
    t["density.file"] = kText;
    t["equation.lambda"] = kNonNegative;
    t["equation.rescale_mass"] = kBool;
    t["output.potential"] = kText;
    t["output.report"] = kText;
  } else if (command == "continuation") {
    add_grid(t);
    add_form(t, "form");
    add_form(t, "alpha");
    add_solver(t);
    t["density.zeros"] = kText;
    t["density.poles"] = kText;
    t["density.a"] = kPositive;
    t["density.match_mass"] = kBool;
    t["equation.lambda"] = kNonNegative;
    t["schedule.eps"] = kPositiveList;
    t["schedule.start"] = kPositive;
    t["schedule.floor"] = kPositive;
    t["output.csv"] = kText;
  } else if (command == "tian-family") {
    add_grid(t);
    add_solver(t);
    t["tian.base_coefficient"] = kPositive;
    t["tian.cosine_amplitude"] = kReal;
    t["tian.t"] = kPositiveList;
    t["output.csv"] = kText;
  } else if (command == "capacity") {
    add_grid(t);
    add_form(t, "form");
    t["input.gamma"] = kText;
    t["input.mask"] = kText;
    t["mask.radius"] = kPositive;
    t["family.kind"] = kText;
    t["family.count"] = {Kind::Int, 0.0};
    t["profile.levels"] = {Kind::RealList};
    t["profile.potential"] = kText;
    t["output.profile"] = kText;
  } else if (command == "orlicz") {
    t["orlicz.gauge"] = kText;
    t["input.field"] = kText;
    t["output.report"] = kText;
  } else if (command == "verify") {
    add_grid(t);
    t["verify.trials"] = kInt1;
    t["verify.eps"] = kPositiveList;
    t["output.csv"] = kText;
  }
  return t;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(int line, const std::string& key) {
  return line > 0 ? "line " + std::to_string(line) + ": '" + key + "'" : "'" + key + "'";
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

std::vector<std::string> tokens(const std::string& s) {
  std::string spaced = s;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void check_bound(double v, const KeySpec& spec, int line, const std::string& key) {
  const bool ok = spec.strict ? v > spec.min : v >= spec.min;
  if (!ok) {
    std::ostringstream msg;
    msg << where(line, key) << " must be " << (spec.strict ? "> " : ">= ") << spec.min;
    if (key == "equation.lambda") msg << " (lambda >= 0 required)";
    throw Error(ErrorCode::BadValue, msg.str());
  }
}

void validate(const KeySpec& spec, const std::string& value, int line, const std::string& key) {
  if (!spec.choices.empty() &&
      std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
    throw Error(ErrorCode::BadValue, where(line, key) + " has unsupported value '" + value + "'");
  double v = 0.0;
  switch (spec.kind) {
    case Kind::Int:
      if (!parse_double(value, v) || v != std::floor(v))
        throw Error(ErrorCode::BadValue, where(line, key) + " needs an integer, got '" + value + "'");
      check_bound(v, spec, line, key);
      break;
    case Kind::Real:
      if (!parse_double(value, v))
        throw Error(ErrorCode::BadValue, where(line, key) + " needs a number, got '" + value + "'");
      check_bound(v, spec, line, key);
      break;
    case Kind::Bool:
      if (value != "true" && value != "false")
        throw Error(ErrorCode::BadValue, where(line, key) + " needs true or false, got '" + value + "'");
      break;
    case Kind::Text:
      if (value.empty()) throw Error(ErrorCode::BadValue, where(line, key) + " is empty");
      break;
    case Kind::RealList: {
      const auto items = tokens(value);
      if (items.empty()) throw Error(ErrorCode::BadValue, where(line, key) + " needs at least one number");
      for (const auto& item : items) {
        if (!parse_double(item, v))
          throw Error(ErrorCode::BadValue, where(line, key) + " has a non-numeric entry '" + item + "'");
        check_bound(v, spec, line, key);
      }
      break;
    }
  }
}

const ConfigEntry& lookup(const std::map<std::string, ConfigEntry>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw Error(ErrorCode::MissingKey, "missing key '" + key + "'");
  return it->second;
}

}  // namespace

bool known_command(const std::string& command) {
  static const std::set<std::string> names{"solve", "continuation", "tian-family", "capacity", "orlicz", "verify"};
  return names.count(command) != 0;
}

void RunConfig::put(const std::string& key, const std::string& value, int line) {
  const Table table = table_for(command);
  auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::UnknownKey, where(line, key) + " is not a key of '" + command + "'");
  validate(it->second, value, line, key);
  entries_[key] = {value, line};
}

void RunConfig::set(const std::string& key, const std::string& value) { put(key, value, 0); }

std::string RunConfig::text(const std::string& key) const { return lookup(entries_, key).value; }

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double RunConfig::number(const std::string& key) const {
  double v = 0.0;
  parse_double(lookup(entries_, key).value, v);
  return v;
}

double RunConfig::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long RunConfig::integer(const std::string& key) const { return static_cast<long>(number(key)); }

long RunConfig::integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

bool RunConfig::flag(const std::string& key, bool fallback) const {
  return has(key) ? lookup(entries_, key).value == "true" : fallback;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : tokens(lookup(entries_, key).value)) {
    double v = 0.0;
    parse_double(item, v);
    out.push_back(v);
  }
  return out;
}

std::uint64_t RunConfig::seed() const { return static_cast<std::uint64_t>(integer("run.seed", 0)); }

int RunConfig::threads() const { return static_cast<int>(integer("run.threads", 1)); }

RunConfig parse_config(const std::string& text, const std::string& command) {
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  std::vector<std::pair<std::string, std::pair<std::string, int>>> pending;
  std::string named;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw Error(ErrorCode::BadValue, "line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadValue, "line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::BadValue, "line " + std::to_string(line) + ": empty key");
    if (section.empty()) {
      if (key != "command") throw Error(ErrorCode::UnknownKey, where(line, key) + " appears outside a section");
      named = value;
      continue;
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw Error(ErrorCode::BadValue, where(line, full) + " is given twice");
    pending.push_back({full, {value, line}});
  }
  RunConfig cfg;
  if (!named.empty() && !command.empty() && named != command)
    throw Error(ErrorCode::BadValue, "config is for '" + named + "' but the command is '" + command + "'");
  cfg.command = command.empty() ? named : command;
  if (cfg.command.empty()) throw Error(ErrorCode::MissingKey, "missing key 'command'");
  if (!known_command(cfg.command)) throw Error(ErrorCode::BadValue, "unknown command '" + cfg.command + "'");
  for (const auto& [key, v] : pending) cfg.put(key, v.first, v.second);
  // the grid cannot come from a flag for these commands
  const std::string& c = cfg.command;
  if ((c == "solve" || c == "continuation" || c == "tian-family") && !cfg.has("grid.resolution"))
    throw Error(ErrorCode::MissingKey, "missing key 'grid.resolution'");
  return cfg;
}

void require_keys(const RunConfig& config) {
  const std::string& c = config.command;
  if (c == "capacity") {
    if (!config.has("input.gamma") && !config.has("grid.resolution"))
      throw Error(ErrorCode::MissingKey, "missing key 'grid.resolution'");
  } else if (c == "orlicz") {
    for (const char* k : {"orlicz.gauge", "input.field"})
      if (!config.has(k)) throw Error(ErrorCode::MissingKey, std::string("missing key '") + k + "'");
  }
}

}  // namespace cmat
