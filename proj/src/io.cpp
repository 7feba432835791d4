#include "gpf/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpf/errors.hpp"

namespace gpf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("config key " + key + ": not a finite number: '" + v + "'");
  return x;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(no) + ": expected 'block.key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto dot = key.find('.');
    if (dot == std::string::npos || key.find('.', dot + 1) != std::string::npos ||
        !valid_ident(key.substr(0, dot)) || !valid_ident(key.substr(dot + 1)))
      throw ConfigError(source + ":" + std::to_string(no) + ": malformed key '" + key + "'");
    if (c.values_.count(key)) throw ConfigError("config key " + key + " given twice");
    c.values_[key] = value;
  }
  return c;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key " + key);
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::num(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

int Config::integer(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  int x = 0;
  const std::string& v = it->second;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key " + key + ": not an integer: '" + v + "'");
  return x;
}

bool Config::flag(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key " + key + ": expected true or false");
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_)
    if (!allowed.count(k)) throw ConfigError("unknown config key " + k);
}

nlohmann::json Config::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvTable to_table(const ExperimentRecord& rec) {
  CsvTable t;
  t.header = rec.order;
  for (std::size_t r = 0; r < rec.rows(); ++r) {
    std::vector<std::string> row;
    for (const auto& k : rec.order) {
      const auto& col = rec.at(k);
      row.push_back(r < col.size() ? format_double(col[r]) : "");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (table.header.empty()) throw DomainError("csv table needs a header row");
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
    out << "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  write_text_atomic(path, out.str());
}

void write_csv(const std::filesystem::path& path, const ExperimentRecord& rec) {
  write_csv(path, to_table(rec));
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace gpf
