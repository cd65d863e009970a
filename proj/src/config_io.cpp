#include "beadlab/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

#include "beadlab/errors.hpp"

namespace beadlab {

std::string write_config(const TorusBeadConfig& c) {
  const Geometry& g = c.geometry();
  std::ostringstream os;
  os << "beadlab-config " << kConfigFormatVersion << "\n"
     << "lattice " << to_string(g.kind()) << "\n"
     << "L " << g.side() << "\n";
  const auto cols = c.column_positions();
  for (size_t l = 0; l < cols.size(); ++l) {
    os << "column " << l;
    for (int64_t p : cols[l]) os << " " << p;
    os << "\n";
  }
  return os.str();
}

TorusBeadConfig read_config(const std::string& text) {
  std::istringstream is(text);
  std::string line, word;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("config line " + std::to_string(lineno) + ": " + why);
  };
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next()) fail("empty input");
  {
    std::istringstream ls(line);
    int version = 0;
    if (!(ls >> word >> version) || word != "beadlab-config") fail("missing 'beadlab-config' header");
    if (version != kConfigFormatVersion) fail("unsupported format version " + std::to_string(version));
  }
  std::optional<LatticeKind> kind;
  int L = 0;
  std::vector<std::vector<int64_t>> cols;
  std::vector<bool> seen;
  while (next()) {
    std::istringstream ls(line);
    ls >> word;
    if (word == "lattice") {
      std::string v;
      if (!(ls >> v)) fail("missing lattice name");
      try {
        kind = lattice_from_string(v);
      } catch (const Error& e) {
        fail(e.what());
      }
    } else if (word == "L") {
      if (!(ls >> L) || L < 3) fail("bad side length");
      cols.assign(L, {});
      seen.assign(L, false);
    } else if (word == "column") {
      int l = -1;
      if (L == 0) fail("'column' before 'L'");
      if (!(ls >> l) || l < 0 || l >= L) fail("bad column index");
      if (seen[l]) fail("column " + std::to_string(l) + " listed twice");
      seen[l] = true;
      int64_t p;
      while (ls >> p) cols[l].push_back(p);
      if (!ls.eof()) fail("bad bead position");
      continue;
    } else {
      fail("unknown key '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing text '" + extra + "'");
  }
  if (!kind) fail("missing 'lattice'");
  if (L == 0) fail("missing 'L'");
  for (int l = 0; l < L; ++l)
    if (!seen[l]) fail("column " + std::to_string(l) + " missing");
  return TorusBeadConfig::from_positions(Geometry(*kind, L), cols);
}

void save_config(const TorusBeadConfig& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << write_config(c);
}

TorusBeadConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return read_config(ss.str());
}

namespace {

void flatten(const boost::property_tree::ptree& t, const std::string& prefix,
             std::map<std::string, std::string>& out) {
  for (const auto& [k, v] : t) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.empty())
      out[key] = v.data();
    else
      flatten(v, key, out);
  }
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ParamFile ParamFile::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(std::string("parameter file: ") + e.what());
  }
  ParamFile pf;
  flatten(tree, "", pf.values_);
  for (auto& [k, v] : pf.values_) v = trim(v);
  return pf;
}

ParamFile ParamFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const std::string* ParamFile::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_[key] = true;
  return &it->second;
}

std::string ParamFile::get_string(const std::string& key, const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

namespace {

double parse_double(const std::string& key, const std::string& s) {
  double x = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end) throw ParseError("'" + key + "' is not a number: " + s);
  return x;
}

}  // namespace

double ParamFile::get_double(const std::string& key, double fallback) const {
  const std::string* v = find(key);
  return v ? parse_double(key, *v) : fallback;
}

int64_t ParamFile::get_int(const std::string& key, int64_t fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  int64_t x = 0;
  const char* end = v->data() + v->size();
  auto [p, ec] = std::from_chars(v->data(), end, x);
  if (ec != std::errc() || p != end) throw ParseError("'" + key + "' is not an integer: " + *v);
  return x;
}

std::vector<double> ParamFile::get_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::string item;
  std::istringstream is(*v);
  while (std::getline(is, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

std::vector<std::string> ParamFile::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header,
                     const std::string& artifact)
    : os_(os), width_(header.size()) {
  os_ << "# " << kArtifactVersion;
  if (!artifact.empty()) os_ << " " << artifact;
  os_ << "\r\n";
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw ConfigError("CSV row width does not match the header");
  for (size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << csv_escape(fields[i]);
  os_ << "\r\n";
}

}  // namespace beadlab
