#pragma once

#include <map>
#include <string>
#include <vector>

namespace lc {

// Flat "section.key = value" settings. Later sources win (file, then --set
// overrides). Keys are tracked as they are consumed so that a typo'd or
// unknown key can be reported with its origin.
class ConfigMap {
 public:
  void load_file(const std::string& path);          // throws on unreadable/bad lines
  void set(const std::string& key, const std::string& value, const std::string& origin);
  void set_kv(const std::string& assignment, const std::string& origin);  // "key=value"

  bool has(const std::string& key) const;

  // typed getters; mark the key consumed. throw std::invalid_argument on a
  // malformed value, naming the origin.
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;  // 0/1/true/false
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // keys never consumed by any getter, with their origins ("file:line")
  std::vector<std::string> unconsumed() const;

  // every key currently set, sorted (for echoing effective settings)
  std::vector<std::pair<std::string, std::string>> items() const;

 private:
  struct Entry {
    std::string value;
    std::string origin;
    mutable bool consumed = false;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace lc
