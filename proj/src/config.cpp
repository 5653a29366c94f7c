#include "lc/config.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace lc {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

void ConfigMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string origin = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos)
      throw std::invalid_argument("config: missing '=' at " + origin);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: empty key at " + origin);
    set(key, value, origin);
  }
}

void ConfigMap::set(const std::string& key, const std::string& value,
                    const std::string& origin) {
  entries_[key] = Entry{value, origin, false};
}

void ConfigMap::set_kv(const std::string& assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("config: expected key=value, got '" + assignment + "' (" +
                                origin + ")");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty())
    throw std::invalid_argument("config: empty key in '" + assignment + "' (" + origin + ")");
  set(key, value, origin);
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) > 0; }

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.consumed = true;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + " = '" + it->second.value +
                                "' (" + it->second.origin + ")");
  }
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.consumed = true;
  try {
    size_t pos = 0;
    const int v = std::stoi(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + " = '" + it->second.value +
                                "' (" + it->second.origin + ")");
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.consumed = true;
  const std::string& v = it->second.value;
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw std::invalid_argument("config: bad bool for " + key + " = '" + v + "' (" +
                              it->second.origin + ")");
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.consumed = true;
  return it->second.value;
}

std::vector<std::string> ConfigMap::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_)
    if (!entry.consumed) out.push_back(key + " (" + entry.origin + ")");
  return out;
}

std::vector<std::pair<std::string, std::string>> ConfigMap::items() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, entry] : entries_) out.emplace_back(key, entry.value);
  return out;
}

}  // namespace lc
