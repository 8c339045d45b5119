#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dyadlab::cli {

/// Flat key=value configuration.  Precedence is handled by the caller:
/// defaults, then file entries, then command-line overrides.
struct Config {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values[key] = value; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::string& fallback) const;
};

/// Parse a flat key=value file ('#' starts a comment).  Throws
/// MalformedInputError on lines that are neither.
Config load_config_file(const std::string& path);

/// One machine-readable result row: ordered (name, value) pairs.  Floating
/// values are serialized with 17 significant digits.
struct Record {
  std::vector<std::pair<std::string, std::string>> fields;

  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, const char* value) { put(key, std::string(value)); }
  void put(const std::string& key, double value);
  void put(const std::string& key, long long value);
  void put(const std::string& key, bool value);
};

std::string to_csv(const std::vector<Record>& records);
std::string to_json(const std::vector<Record>& records);

struct RunResult {
  int exit_code = 0;            // 0 pass, 1 assertion failure
  std::vector<Record> records;
  std::vector<std::string> summary;  // human lines for stdout
};

/// Known subcommands: verify-lemma, verify-weak-form, verify-modulation,
/// verify-distribution, estimate-norms, materialize.
std::vector<std::string> subcommands();
Config defaults_for(const std::string& subcommand);
RunResult run(const std::string& subcommand, const Config& config);

}  // namespace dyadlab::cli
