#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mwg/trace.hpp"

namespace mwg::cli {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Writes through a temporary file in the same directory and renames it into
/// place, so `path` is either absent or complete. Throws std::runtime_error.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Header `iteration,<labels>`, then one row per sample, 0-based iteration.
std::string trace_csv(const TraceBuffer& samples);

/// Rows of integers under a header; each inner vector is one row.
std::string integer_table_csv(const std::vector<std::string>& header,
                              const std::vector<std::vector<std::int64_t>>& rows);

/// Parses a CSV with a header row into named integer columns; throws
/// std::runtime_error on malformed input.
std::vector<std::vector<std::int64_t>> read_integer_csv(const std::filesystem::path& path,
                                                        const std::vector<std::string>& header);

}  // namespace mwg::cli
