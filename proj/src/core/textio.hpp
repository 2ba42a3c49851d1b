#pragma once

#include <cstdio>
#include <filesystem>
#include <string>

namespace pfopt {

/* Shortest exact decimal form used in every text artifact: %.17g round-trips
 * any double bit-exactly through strtod, which is what makes re-aggregation
 * from stored traces reproduce summaries byte-identically. */
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/* Writes content to path atomically: temp file in the same directory, then
 * rename.  Partial writes are never visible under the final name. */
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

/* Reads a whole file; throws IoError if unreadable. */
std::string read_file(const std::filesystem::path& path);

}  // namespace pfopt
