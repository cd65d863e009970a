#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beadlab/bead_config.hpp"

namespace beadlab {

inline constexpr const char* kArtifactVersion = "beadlab 1.0";
inline constexpr int kConfigFormatVersion = 1;

// Versioned text format:
//   beadlab-config 1
//   lattice hex
//   L 12
//   column 0 1 4 7 10
//   ...
std::string write_config(const TorusBeadConfig& c);
TorusBeadConfig read_config(const std::string& text);  // ParseError, or the constructor's errors
void save_config(const TorusBeadConfig& c, const std::string& path);
TorusBeadConfig load_config(const std::string& path);

// Flat key-value parameter file with [section] headers; lines starting with
// '#' or ';' are comments. Keys are addressed as "section.key".
class ParamFile {
 public:
  static ParamFile parse(const std::string& text);  // ParseError
  static ParamFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  // Keys that no getter has consulted.
  std::vector<std::string> unused() const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

// RFC 4180 CSV, preceded by one comment line naming the artifact version.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header,
            const std::string& artifact = "");
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
  size_t width_;
};

std::string csv_escape(const std::string& field);
// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace beadlab
