#include "fth/control/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fth/errors.hpp"

namespace fth::control {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput(fmt::format("{}:{}: expected 'key = value'", origin, line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidInput(fmt::format("{}:{}: empty key", origin, line_no));
    if (cfg.values_.count(key)) throw InvalidInput(fmt::format("{}:{}: duplicate key '{}'", origin, line_no, key));
    cfg.values_[key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string ConfigFile::env_name(const std::string& key) {
  std::string out = "FTH_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<std::string> ConfigFile::lookup(const std::string& key) const {
  used_.insert(key);
  if (const char* env = std::getenv(env_name(key).c_str())) return std::string(env);
  if (const auto it = values_.find(key); it != values_.end()) return it->second;
  return std::nullopt;
}

bool ConfigFile::contains(const std::string& key) const {
  return values_.count(key) > 0 || std::getenv(env_name(key).c_str()) != nullptr;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto v = lookup(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw InvalidInput(fmt::format("config key '{}': '{}' is not a number", key, *v));
  return out;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  const auto v = lookup(key);
  if (!v) return fallback;
  int out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw InvalidInput(fmt::format("config key '{}': '{}' is not an integer", key, *v));
  return out;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto v = lookup(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw InvalidInput(fmt::format("config key '{}': '{}' is not a boolean", key, *v));
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto v = lookup(key);
  return v ? *v : fallback;
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace fth::control
