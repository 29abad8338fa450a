#include "qtlr/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qtlr/error.hpp"

namespace qtlr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::string spaced = s;
  for (char& c : spaced)
    if (c == ',') c = ' ';
  std::istringstream is(spaced);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty())
    throw ArgumentError(what + ": cannot parse '" + text + "' as a number");
  return v;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& is, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError(source + ":" + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ArgumentError(source + ":" + std::to_string(lineno) + ": empty key");
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

const std::string& KeyValues::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ArgumentError(source_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValues::get_double(const std::string& key) const {
  return parse_number<double>(get_string(key), source_ + ": " + key);
}

Index KeyValues::get_index(const std::string& key) const {
  return parse_number<Index>(get_string(key), source_ + ": " + key);
}

std::uint64_t KeyValues::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(get_string(key), source_ + ": " + key);
}

std::vector<double> KeyValues::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_list(get_string(key))) out.push_back(parse_number<double>(tok, source_ + ": " + key));
  return out;
}

std::vector<Index> KeyValues::get_indices(const std::string& key) const {
  std::vector<Index> out;
  for (const auto& tok : split_list(get_string(key))) out.push_back(parse_number<Index>(tok, source_ + ": " + key));
  return out;
}

void KeyValues::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, value] : values_)
    if (!known.count(key)) throw ArgumentError(source_ + ": unknown key '" + key + "'");
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  return KeyValues::parse(is, path);
}

std::string join_indices(const std::vector<Index>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace qtlr
