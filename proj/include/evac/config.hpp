#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evac {

/// Sectioned key/value text document.
///
///   # comment
///   [section]
///   key = value tokens
///
/// Keys may repeat inside a section (e.g. one `rect` line per obstacle);
/// every occurrence is kept in file order.
class ConfigDocument {
public:
  static ConfigDocument parse(std::string_view text);
  static ConfigDocument load(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  /// All values recorded for `section.key`, in file order.
  const std::vector<std::string>& all(const std::string& section,
                                      const std::string& key) const;

  /// Last value of `section.key`; throws MissingKey when absent.
  const std::string& get(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;

  /// Whitespace separated numbers of `section.key`, exactly `count` of them.
  std::vector<double> get_numbers(const std::string& section, const std::string& key,
                                  std::size_t count) const;

  /// FNV-1a of the raw text; identifies the configuration in outputs.
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

private:
  std::map<std::string, std::map<std::string, std::vector<std::string>>> sections_;
  std::uint64_t hash_ = 0;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& what);

}  // namespace evac
