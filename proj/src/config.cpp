#include "pof/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pof/error.hpp"

namespace pof {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  require(ec == std::errc() && ptr == value.data() + value.size(), "config",
          key + ": '" + value + "' is not an integer");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    require(used == value.size(), "config", key + ": '" + value + "' is not a real number");
    return out;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail("config", key, ": '", value, "' is not a real number");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  fail("config", key, ": '", value, "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

KvConfig KvConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "config", "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

KvConfig KvConfig::from_string(const std::string& text) {
  KvConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config",
            "line " + std::to_string(line_no) + ": expected 'key = value'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  require(valid_key(key), "config", "malformed key '" + key + "'");
  entries_[key] = value;
}

void KvConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos, "config",
          "override '" + assignment + "' must look like key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

long long KvConfig::get_int(const std::string& key, long long fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_int(key, it->second);
}

double KvConfig::get_real(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_real(key, it->second);
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_bool(key, it->second);
}

std::string KvConfig::get_text(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::vector<int> KvConfig::get_int_list(const std::string& key,
                                        const std::vector<int>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<int> out;
  for (const std::string& part : split_list(it->second)) {
    out.push_back(static_cast<int>(parse_int(key, part)));
  }
  require(!out.empty(), "config", key + ": empty list");
  return out;
}

std::vector<LrMilestone> KvConfig::get_milestones(const std::string& key) const {
  std::vector<LrMilestone> out;
  const auto it = entries_.find(key);
  if (it == entries_.end() || trim(it->second) == "none") return out;
  for (const std::string& part : split_list(it->second)) {
    const auto colon = part.find(':');
    require(colon != std::string::npos, "config",
            key + ": milestones look like epoch:multiplier");
    LrMilestone m;
    m.epoch = static_cast<int>(parse_int(key, trim(part.substr(0, colon))));
    m.multiplier = parse_real(key, trim(part.substr(colon + 1)));
    out.push_back(m);
  }
  return out;
}

std::vector<std::string> KvConfig::get_name_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return split_list(it->second);
}

void KvConfig::validate(const ConfigSchema& schema) const {
  for (const auto& [key, value] : entries_) {
    const auto it = schema.find(key);
    require(it != schema.end(), "config", "unknown key '" + key + "'");
    const FieldSpec& field = it->second;
    switch (field.kind) {
      case FieldKind::integer: parse_int(key, value); break;
      case FieldKind::real: parse_real(key, value); break;
      case FieldKind::boolean: parse_bool(key, value); break;
      case FieldKind::text: break;
      case FieldKind::choice: {
        bool ok = false;
        for (const std::string& c : field.choices) ok = ok || c == value;
        if (!ok) {
          std::string allowed;
          for (const std::string& c : field.choices) allowed += (allowed.empty() ? "" : "|") + c;
          fail("config", key, ": '", value, "' not one of {", allowed, "}");
        }
        break;
      }
      case FieldKind::int_list:
        for (const std::string& part : split_list(value)) parse_int(key, part);
        break;
      case FieldKind::milestones: get_milestones(key); break;
    }
  }
}

std::string KvConfig::canonical() const {
  std::string out;
  for (const auto& [key, value] : entries_) {  // std::map keeps keys sorted
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  }
  return out;
}

std::uint64_t KvConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace pof
