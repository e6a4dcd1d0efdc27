#pragma once

#include <string>
#include <vector>

namespace cardio {

/// Shortest round-trip decimal representation (std::to_chars), so emitted
/// numbers parse back bit-exactly.
std::string format_double(double v);

/// RFC-4180 field quoting: quotes fields containing ',', '"' or newlines and
/// doubles embedded quotes.
std::string csv_escape(const std::string& field);

/// Column-oriented result table emitted as CSV and as aligned text.
struct ReportTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_aligned_text() const;
  void write_csv(const std::string& path) const;
};

/// Minimal CSV reader for the artifact's own outputs (handles RFC-4180
/// quoting; no embedded newlines inside quoted fields).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// Raw little-endian float64 vector dumps, the companion format for solution
// vectors next to the trace files.
void write_vector_raw(const std::string& path, const std::vector<double>& v);
std::vector<double> read_vector_raw(const std::string& path);

}  // namespace cardio
