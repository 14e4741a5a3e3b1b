#pragma once

#include <map>
#include <string>
#include <vector>

namespace gtnn {

/// Flat key = value configuration with '#' comments. Values are plain
/// strings; typed getters parse on demand and fall back to the supplied
/// default when the key is absent.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& dflt) const;
  int get_int(const std::string& key, int dflt) const;
  double get_double(const std::string& key, double dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  /// Comma-separated integer list.
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& dflt) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gtnn
