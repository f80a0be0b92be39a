#include "evac/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "evac/error.hpp"

namespace evac {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double to_double(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  double v = 0.0;
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", what, text));
  }
  return v;
}

}  // namespace

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(tok, what));
  return out;
}

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  doc.hash_ = fnv1a(text);
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(fmt::format("line {}: unterminated section header", line_no));
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      doc.sections_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    if (section.empty()) {
      throw ConfigError(fmt::format("line {}: key outside of any section", line_no));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    doc.sections_[section][key].push_back(std::move(value));
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool ConfigDocument::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

const std::vector<std::string>& ConfigDocument::all(const std::string& section,
                                                    const std::string& key) const {
  static const std::vector<std::string> empty;
  auto s = sections_.find(section);
  if (s == sections_.end()) return empty;
  auto k = s->second.find(key);
  return k == s->second.end() ? empty : k->second;
}

const std::string& ConfigDocument::get(const std::string& section,
                                       const std::string& key) const {
  const auto& values = all(section, key);
  if (values.empty()) throw MissingKey(section + "." + key);
  return values.back();
}

double ConfigDocument::get_double(const std::string& section, const std::string& key) const {
  return to_double(get(section, key), section + "." + key);
}

double ConfigDocument::get_double(const std::string& section, const std::string& key,
                                  double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long long ConfigDocument::get_int(const std::string& section, const std::string& key) const {
  const auto& text = get(section, key);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}.{}: expected an integer, got '{}'", section, key, text));
  }
  return v;
}

long long ConfigDocument::get_int(const std::string& section, const std::string& key,
                                  long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigDocument::get_bool(const std::string& section, const std::string& key,
                              bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get(section, key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}.{}: expected a boolean, got '{}'", section, key, v));
}

std::string ConfigDocument::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

std::vector<double> ConfigDocument::get_numbers(const std::string& section,
                                                const std::string& key,
                                                std::size_t count) const {
  auto values = parse_numbers(get(section, key), section + "." + key);
  if (values.size() != count) {
    throw ConfigError(fmt::format("{}.{}: expected {} numbers, got {}", section, key, count,
                                  values.size()));
  }
  return values;
}

std::string ConfigDocument::hash_hex() const { return fmt::format("{:016x}", hash_); }

}  // namespace evac
