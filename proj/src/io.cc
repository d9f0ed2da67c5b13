#include "bimono/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace bimono {
namespace {

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool ParseDouble(const std::string& field, double* out) {
  const std::string t = Trim(field);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), *out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

std::string FormatValue(double v) {
  if (std::isnan(v)) return {};
  return fmt::format("{:.17g}", v);
}

}  // namespace

std::string FormatMatrixCsv(const Matrix& m) {
  std::string out = fmt::format("{},{}\n", m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += FormatValue(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix ParseMatrixCsv(const std::string& text, const std::string& source) {
  const std::vector<std::string> lines = SplitLines(text);
  if (lines.empty()) throw InputError(fmt::format("{}: empty file", source));
  const auto head = SplitFields(lines[0]);
  double dr = 0.0, dc = 0.0;
  if (head.size() != 2 || !ParseDouble(head[0], &dr) || !ParseDouble(head[1], &dc) || dr < 1 || dc < 1 ||
      dr != std::floor(dr) || dc != std::floor(dc)) {
    throw InputError(fmt::format("{}:1: expected header 'rows,cols'", source));
  }
  const Index r = static_cast<Index>(dr), c = static_cast<Index>(dc);
  Matrix m(r, c);
  Index row = 0;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (Trim(lines[n]).empty()) continue;
    if (row == r) throw InputError(fmt::format("{}:{}: more than {} data rows", source, n + 1, r));
    const auto fields = SplitFields(lines[n]);
    if (static_cast<Index>(fields.size()) != c) {
      throw InputError(fmt::format("{}:{}: expected {} fields, found {}", source, n + 1, c, fields.size()));
    }
    for (Index j = 0; j < c; ++j) {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!Trim(fields[j]).empty() && !ParseDouble(fields[j], &v)) {
        throw InputError(fmt::format("{}:{}: column {}: cannot parse '{}'", source, n + 1, j + 1, fields[j]));
      }
      m(row, j) = v;
    }
    ++row;
  }
  if (row != r) throw InputError(fmt::format("{}: expected {} data rows, found {}", source, r, row));
  return m;
}

Matrix ReadMatrixCsv(const std::string& path) { return ParseMatrixCsv(ReadFile(path), path); }

void WriteMatrixCsv(const std::string& path, const Matrix& m) { AtomicWrite(path, FormatMatrixCsv(m)); }

std::vector<Observation> ParseTriplesCsv(const std::string& text, const std::string& source) {
  std::vector<Observation> obs;
  const std::vector<std::string> lines = SplitLines(text);
  bool first = true;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string line = Trim(lines[n]);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitFields(line);
    double v[3];
    bool ok = fields.size() == 3;
    std::size_t bad = 0;
    for (std::size_t f = 0; ok && f < 3; ++f) {
      if (!ParseDouble(fields[f], &v[f]) || !std::isfinite(v[f])) {
        ok = false;
        bad = f;
      }
    }
    if (!ok && first) {
      first = false;
      continue;  // header
    }
    first = false;
    if (fields.size() != 3) {
      throw InputError(fmt::format("{}:{}: expected 3 fields x,y,z, found {}", source, n + 1, fields.size()));
    }
    if (!ok) {
      throw InputError(fmt::format("{}:{}: column {}: cannot parse '{}'", source, n + 1, bad + 1, fields[bad]));
    }
    obs.push_back({v[0], v[1], v[2]});
  }
  if (obs.empty()) throw InputError(fmt::format("{}: no observations", source));
  return obs;
}

std::vector<Observation> ReadTriplesCsv(const std::string& path) {
  return ParseTriplesCsv(ReadFile(path), path);
}

void WriteTableCsv(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("WriteTableCsv: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += FormatValue(row[c]);
    }
    out += '\n';
  }
  AtomicWrite(path, out);
}

std::string FormatPgm(const Matrix& m, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("FormatPgm: need lo < hi");
  std::string out = fmt::format("P5\n{} {}\n255\n", m.cols(), m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      int level = 128;
      if (!std::isnan(v)) {
        const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
        level = static_cast<int>(std::lround(255.0 * t));
      }
      out += static_cast<char>(static_cast<unsigned char>(level));
    }
  }
  return out;
}

void WritePgm(const std::string& path, const Matrix& m, double lo, double hi) {
  AtomicWrite(path, FormatPgm(m, lo, hi));
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void AtomicWrite(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, target);
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bimono
