#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlbranch/point.hpp"

namespace nlbranch {

/// Flat dotted-key configuration. Every key must be declared in the schema
/// (see known_keys()); values are kept as text and parsed on access.
class Config {
 public:
  Config();  // schema defaults

  /// `key = value` lines; '#' starts a comment.
  static Config parse_flat(const std::string& text);
  /// Nested objects flatten to dotted keys, arrays to comma lists.
  static Config parse_json(const std::string& text);
  /// Picks the parser from the extension (.json) or the first character.
  static Config load(const std::string& path);

  /// Overrides keys from NLBRANCH_<KEY> variables, KEY being the dotted key
  /// upper-cased with '.' replaced by '_' (sim.T_max -> NLBRANCH_SIM_T_MAX).
  void apply_env();
  static std::string env_name(const std::string& key);

  void set(const std::string& key, const std::string& value);
  /// Parses "key=value".
  void set_assignment(const std::string& assignment);
  void merge(const Config& other);

  bool has(const std::string& key) const;  // set to a non-empty value
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;
  /// "x,y;x,y;..." or, for 1D ranges, "a:b:n".
  std::vector<Point> get_points(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Keys set away from their defaults (by a preset, file, env or flag).
  const std::vector<std::string>& explicit_keys() const { return explicit_; }
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> explicit_;
};

struct KeyInfo {
  std::string key;
  std::string default_value;
  std::string help;
};

const std::vector<KeyInfo>& known_keys();

std::vector<std::string> preset_names();
/// A fully populated configuration with a pinned seed; throws ConfigError
/// for unknown names.
Config preset(const std::string& name);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

}  // namespace nlbranch
