#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fth::control {

// Flat `key = value` configuration. '#' starts a comment. Any key can be
// overridden from the environment as FTH_<KEY> with dots replaced by
// underscores and letters upper-cased (pid.kp -> FTH_PID_KP).
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse(const std::string& text, const std::string& origin = "<string>");
  static ConfigFile load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool contains(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // Keys present in the file that no getter has asked for.
  std::vector<std::string> unused_keys() const;

  static std::string env_name(const std::string& key);

 private:
  std::optional<std::string> lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace fth::control
