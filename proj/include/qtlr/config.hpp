#ifndef QTLR_CONFIG_HPP
#define QTLR_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qtlr/quaternion_tensor.hpp"

namespace qtlr {

// Flat key=value text. '#' starts a comment, blank lines are skipped, a later
// assignment wins. Lists are comma or whitespace separated.
class KeyValues {
 public:
  static KeyValues parse(std::istream& is, const std::string& source = "config");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  Index get_index(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<Index> get_indices(const std::string& key) const;

  // Throws ArgumentError naming the first key outside `known`.
  void require_known(const std::set<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

KeyValues read_config_file(const std::string& path);

std::string join_indices(const std::vector<Index>& v, char sep = ',');

}  // namespace qtlr

#endif  // QTLR_CONFIG_HPP
