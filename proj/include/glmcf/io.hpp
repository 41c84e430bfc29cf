#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace glmcf {

// Numbers in output files carry 17 significant digits so golden files
// round-trip exactly.
inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Short form for stdout summaries.
inline std::string num_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns, char sep = ',')
      : out_(path), sep_(sep) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << sep_;
      out_ << columns[i];
    }
    out_ << '\n';
    ncols_ = columns.size();
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << sep_;
      out_ << cells[i];
    }
    out_ << '\n';
  }

  bool good() const { return out_.good(); }
  std::size_t columns() const { return ncols_; }

 private:
  std::ofstream out_;
  char sep_;
  std::size_t ncols_ = 0;
};

// Minimal flat JSON writer (string/number/bool values, insertion order kept).
class JsonObject {
 public:
  void set(const std::string& key, double v) { items_.push_back({key, num17(v)}); }
  void set(const std::string& key, long long v) { items_.push_back({key, std::to_string(v)}); }
  void set(const std::string& key, int v) { items_.push_back({key, std::to_string(v)}); }
  void set(const std::string& key, bool v) { items_.push_back({key, v ? "true" : "false"}); }
  void set_string(const std::string& key, const std::string& v) {
    items_.push_back({key, "\"" + escape(v) + "\""});
  }

  std::string dump() const {
    std::ostringstream os;
    os << "{\n";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      os << "  \"" << items_[i].first << "\": " << items_[i].second;
      if (i + 1 < items_.size()) os << ',';
      os << '\n';
    }
    os << "}\n";
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    out << dump();
  }

 private:
  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  }
  std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace glmcf
