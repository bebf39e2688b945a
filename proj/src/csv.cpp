#include "symbiosim/csv.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <system_error>

#include "symbiosim/version.hpp"

namespace symbiosim {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("malformed number: '" + text + "'");
  }
  return value;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), n_columns_(columns.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_) {
    throw std::logic_error("row width mismatch in " + path_);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::flush() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failure on " + path_);
}

OutputGuard::~OutputGuard() {
  if (keep_) return;
  for (const std::string& path : paths_) std::remove(path.c_str());
}

void OutputGuard::track(const std::string& path) { paths_.push_back(path); }

void write_metadata(const std::string& path, const RunConfig& cfg,
                    const std::string& subcommand,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# resolved configuration\n";
  out << "artifact_version = " << kArtifactVersion << '\n';
  out << "subcommand = " << subcommand << '\n';
  for (const auto& [key, value] : config_echo(cfg)) {
    out << key << " = " << value << '\n';
  }
  for (const auto& [key, value] : extra) {
    out << key << " = " << value << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace symbiosim
