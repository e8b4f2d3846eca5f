#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pof/sgd.hpp"

namespace pof {

enum class FieldKind { integer, real, boolean, text, choice, int_list, milestones };

struct FieldSpec {
  FieldKind kind = FieldKind::text;
  std::vector<std::string> choices;  // FieldKind::choice only
};

using ConfigSchema = std::map<std::string, FieldSpec>;

/// Flat dotted-key/value configuration. Files hold one `key = value` pair
/// per line, '#' starts a comment. Unknown keys and ill-typed values are
/// rejected against a schema; the canonical form (sorted keys) feeds a
/// stable 64-bit hash, invariant under field reordering.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig from_file(const std::filesystem::path& path);
  static KvConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  /// "dotted.key=value" as passed on a command line.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  long long get_int(const std::string& key, long long fallback) const;
  double get_real(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_text(const std::string& key, const std::string& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<LrMilestone> get_milestones(const std::string& key) const;
  std::vector<std::string> get_name_list(const std::string& key,
                                         const std::vector<std::string>& fallback) const;

  /// Throws on unknown keys or values that do not parse as their field kind.
  void validate(const ConfigSchema& schema) const;

  std::string canonical() const;
  std::uint64_t hash() const;  // fnv1a-64 over the canonical form

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace pof
