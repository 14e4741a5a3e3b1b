#include "gtnn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gtnn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: missing '=' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

std::string Config::get_string(const std::string& key, const std::string& dflt) const {
  const auto it = values_.find(key);
  return it == values_.end() ? dflt : it->second;
}

int Config::get_int(const std::string& key, int dflt) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("junk");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer for key '" + key + "': " + it->second);
  }
}

double Config::get_double(const std::string& key, double dflt) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("junk");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad number for key '" + key + "': " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: bad boolean for key '" + key + "': " + v);
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& dflt) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  std::vector<int> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(trim(item)));
    } catch (const std::exception&) {
      throw std::runtime_error("config: bad integer list for key '" + key + "'");
    }
  }
  if (out.empty())
    throw std::runtime_error("config: empty list for key '" + key + "'");
  return out;
}

}  // namespace gtnn
