#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bimono/regression.hpp"

namespace bimono {

// Malformed or unreadable user input; the CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix CSV: a "rows,cols" header, then one line per row with %.17g values.
// Empty fields are missing cells (NaN).
std::string FormatMatrixCsv(const Matrix& m);
Matrix ParseMatrixCsv(const std::string& text, const std::string& source = "<memory>");
Matrix ReadMatrixCsv(const std::string& path);
void WriteMatrixCsv(const std::string& path, const Matrix& m);

// Lines "x,y,z"; a non-numeric first line is taken as a header. Blank lines
// and lines starting with '#' are skipped.
std::vector<Observation> ParseTriplesCsv(const std::string& text, const std::string& source = "<memory>");
std::vector<Observation> ReadTriplesCsv(const std::string& path);

// Generic table with a header row.
void WriteTableCsv(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

// Binary P5 graymap, lo -> 0 (black) and hi -> 255 (white), clamped. NaN
// cells are drawn mid-gray.
std::string FormatPgm(const Matrix& m, double lo, double hi);
void WritePgm(const std::string& path, const Matrix& m, double lo, double hi);

std::string ReadFile(const std::string& path);
// Writes to a temporary sibling and renames it into place.
void AtomicWrite(const std::string& path, const std::string& content);

std::uint64_t Fnv1a64(const std::string& bytes);

}  // namespace bimono
