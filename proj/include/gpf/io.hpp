#pragma once
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpf/record.hpp"

namespace gpf {

// Flat `block.key = value` configuration. '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<input>");
  static Config parse_string(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string str(const std::string& key) const;  // required
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  // comma separated numbers
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

  // throws ConfigError naming the first key not in `allowed`
  void require_known(const std::set<std::string>& allowed) const;
  nlohmann::json to_json() const;

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

// %.16e: 17 significant digits, '.' separator independent of locale
std::string format_double(double v);
// RFC 4180 quoting when the field holds a separator, quote or line break
std::string csv_field(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable to_table(const ExperimentRecord& rec);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const ExperimentRecord& rec);

// write to a sibling temporary and rename over the target
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gpf
