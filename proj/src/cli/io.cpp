#include "mwg/cli/io.hpp"

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mwg::cli {

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto temp = path;
  temp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(temp);
      throw std::runtime_error("write to " + temp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw std::runtime_error("cannot rename " + temp.string() + " to " + path.string() + ": " +
                             ec.message());
  }
}

std::string trace_csv(const TraceBuffer& samples) {
  std::string out = "iteration";
  for (const auto& label : samples.column_labels()) out += "," + label;
  out += "\n";
  for (std::size_t i = 0; i < samples.num_samples(); ++i) {
    out += std::to_string(i);
    const auto row = samples.read(i);
    for (const auto& [name, tensor] : row.entries()) {
      for (std::size_t k = 0; k < tensor.size(); ++k) {
        out += ',';
        if (tensor.is_real()) {
          out += format_double(tensor.reals()[k]);
        } else {
          out += std::to_string(tensor.integers()[k]);
        }
      }
    }
    out += '\n';
  }
  return out;
}

std::string integer_table_csv(const std::vector<std::string>& header,
                              const std::vector<std::vector<std::int64_t>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + std::to_string(row[c]);
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::int64_t>> read_integer_csv(const std::filesystem::path& path,
                                                        const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::string expected;
  for (std::size_t c = 0; c < header.size(); ++c) expected += (c ? "," : "") + header[c];
  if (!std::getline(in, line) || line != expected) {
    throw std::runtime_error(path.string() + ": expected header '" + expected + "'");
  }
  std::vector<std::vector<std::int64_t>> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<std::int64_t> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::int64_t value = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_number) +
                                 ": '" + cell + "' is not an integer");
      }
      row.push_back(value);
    }
    if (row.size() != header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_number) + ": expected " +
                               std::to_string(header.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mwg::cli
