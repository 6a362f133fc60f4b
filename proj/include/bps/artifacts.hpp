#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace bps {

// result emission: CSV for plot-ready tables, JSON-lines for event streams.
// Every artifact opens with a header recording the config hash, the seed and
// an artifact version, so runs can be traced back to their exact inputs.

inline constexpr int kArtifactVersion = 1;

std::uint64_t fnv1a64(const std::string& s);

// shortest round-trip decimal form
std::string fmt_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            std::uint64_t config_hash, std::uint64_t seed);

  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& cells);
  void close();

 private:
  std::ofstream out_;
  std::size_t n_cols_;
};

class JsonlWriter {
 public:
  JsonlWriter(const std::string& path, std::uint64_t config_hash, std::uint64_t seed);

  void line(const std::string& json_object);
  void close();

 private:
  std::ofstream out_;
};

}  // namespace bps
