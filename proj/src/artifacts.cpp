#include "bps/artifacts.hpp"

#include <cstdio>
#include <stdexcept>

namespace bps {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string header_line(std::uint64_t config_hash, std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "# artifact_version=%d config_hash=%016llx seed=%llu",
                kArtifactVersion, static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     std::uint64_t config_hash, std::uint64_t seed)
    : out_(path), n_cols_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open artifact file: " + path);
  out_ << header_line(config_hash, seed) << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(fmt_double(v));
  row(s);
}

void CsvWriter::close() {
  if (out_.is_open()) out_.close();
}

JsonlWriter::JsonlWriter(const std::string& path, std::uint64_t config_hash, std::uint64_t seed)
    : out_(path) {
  if (!out_) throw std::runtime_error("cannot open artifact file: " + path);
  out_ << "{\"artifact_version\":" << kArtifactVersion << ",\"config_hash\":\"" << std::hex
       << config_hash << std::dec << "\",\"seed\":" << seed << "}\n";
}

void JsonlWriter::line(const std::string& json_object) { out_ << json_object << "\n"; }

void JsonlWriter::close() {
  if (out_.is_open()) out_.close();
}

}  // namespace bps
