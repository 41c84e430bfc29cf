#pragma once

#include <map>
#include <string>
#include <vector>

namespace glmcf {

// Flat key-value config: one `key = value` per line, '#' starts a comment.
// All physical parameters of a run live here; nothing is hard-coded.
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long long> get_int_list(const std::string& key) const;   // comma separated
  std::vector<double> get_double_list(const std::string& key) const;  // comma separated

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace glmcf
