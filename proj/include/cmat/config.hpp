#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmat {

struct ConfigEntry {
  std::string value;
  int line;  // 0 for values set from command-line flags
};

// Sectioned `key = value` configuration. Keys are addressed as
// `section.key`; a top-level `command = ...` before any section names the
// subcommand. Values are validated against the command's key table.
class RunConfig {
 public:
  std::string command;  // solve | continuation | tian-family | capacity | orlicz | verify
  std::string mode;     // verify only: comparison | monotone | suite
  bool force = false;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  // The getters throw MissingKey when the key is absent and no default is given.
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;

  std::uint64_t seed() const;
  int threads() const;

  // Validated like a file entry; used for command-line overrides.
  void set(const std::string& key, const std::string& value);
  const std::map<std::string, ConfigEntry>& entries() const noexcept { return entries_; }

 private:
  friend RunConfig parse_config(const std::string& text, const std::string& command);
  void put(const std::string& key, const std::string& value, int line);
  std::map<std::string, ConfigEntry> entries_;
};

bool known_command(const std::string& command);

// `command` fills in the subcommand when the text does not name one; a text
// naming a different command is rejected. Diagnostics name the line and key.
RunConfig parse_config(const std::string& text, const std::string& command = "");

// Keys that must be present once all overrides are applied.
void require_keys(const RunConfig& config);

}  // namespace cmat
