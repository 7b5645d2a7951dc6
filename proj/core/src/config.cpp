#include "wokie/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wokie/text.hpp"

namespace wokie::config {

using providers::ConfigError;

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

ConfigFile ConfigFile::parse_string(const std::string& content) {
  ConfigFile cfg;
  std::istringstream in(content);
  std::string line;
  std::string current;  // "" = top-level section
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
    if (trimmed.front() == '[') {
      if (trimmed.back() != ']') {
        throw ConfigError("malformed section header at line " + std::to_string(line_no) +
                          ": " + trimmed);
      }
      current = text::trim(trimmed.substr(1, trimmed.size() - 2));
      if (cfg.sections_.emplace(current, std::map<std::string, std::string>{}).second) {
        cfg.order_.push_back(current);
      }
      continue;
    }
    auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value at line " + std::to_string(line_no) + ": " +
                        trimmed);
    }
    std::string key = text::trim(trimmed.substr(0, eq));
    std::string value = text::trim(trimmed.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("empty key at line " + std::to_string(line_no));
    }
    if (cfg.sections_.emplace(current, std::map<std::string, std::string>{}).second) {
      cfg.order_.push_back(current);
    }
    cfg.sections_[current][key] = value;
  }
  return cfg;
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  auto sec = sections_.find(section);
  if (sec == sections_.end()) return std::nullopt;
  auto it = sec->second.find(key);
  if (it == sec->second.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ConfigFile::get_double(const std::string& section,
                                             const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  try {
    std::size_t consumed = 0;
    double d = std::stod(*v, &consumed);
    if (consumed != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config value [" + section + "] " + key + " is not a number: " + *v);
  }
}

std::optional<long> ConfigFile::get_int(const std::string& section,
                                        const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  try {
    std::size_t consumed = 0;
    long n = std::stol(*v, &consumed);
    if (consumed != v->size()) throw std::invalid_argument(*v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("config value [" + section + "] " + key + " is not an integer: " + *v);
  }
}

std::optional<bool> ConfigFile::get_bool(const std::string& section,
                                         const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  std::string lowered = *v;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lowered == "true" || lowered == "1" || lowered == "yes" || lowered == "on") return true;
  if (lowered == "false" || lowered == "0" || lowered == "no" || lowered == "off") return false;
  throw ConfigError("config value [" + section + "] " + key + " is not a boolean: " + *v);
}

std::optional<std::vector<std::string>> ConfigFile::get_list(const std::string& section,
                                                             const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v->size()) {
    auto comma = v->find(',', start);
    std::string item = text::trim(
        v->substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> ConfigFile::sections() const { return order_; }

const std::map<std::string, std::string>* ConfigFile::section(const std::string& name) const {
  auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

}  // namespace wokie::config
