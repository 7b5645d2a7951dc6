#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wokie/providers.hpp"

namespace wokie::config {

/// Flat key-value config with [section] headers. Lines starting with '#' or
/// ';' are comments; values keep internal spaces.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& content);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<long> get_int(const std::string& section, const std::string& key) const;
  std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
  /// Comma-separated list value.
  std::optional<std::vector<std::string>> get_list(const std::string& section,
                                                   const std::string& key) const;

  /// Section names in file order.
  std::vector<std::string> sections() const;
  const std::map<std::string, std::string>* section(const std::string& name) const;
  bool empty() const { return sections_.empty(); }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::vector<std::string> order_;
};

}  // namespace wokie::config
