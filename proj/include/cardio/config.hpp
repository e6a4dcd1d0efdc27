#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardio {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` configuration with `#` comments. Every key the
/// artifact honors is registered with a default; unknown keys are rejected at
/// parse time so typos cannot silently fall back to defaults.
class Config {
 public:
  Config();  // defaults only

  static Config load(const std::string& path);

  /// "key=value" command-line override.
  void apply_override(const std::string& key_value);

  void set(const std::string& key, const std::string& value);

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// true when the value differs from the registered default
  bool is_overridden(const std::string& key) const;

  static std::string schema_text();  // key, default, description listing

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cardio
