#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "symbiosim/config.hpp"

namespace symbiosim {

// Shortest-exact rendering helpers: doubles carry 17 significant digits so
// that parsing the CSV back reproduces every bit.
std::string format_double(double value);
std::string format_int(std::int64_t value);
double parse_double(const std::string& text);

// Minimal CSV emitter with a fixed header. Cells are pre-rendered strings;
// commas inside cells are not supported (and never produced).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void flush();

 private:
  std::ofstream out_;
  std::size_t n_columns_;
  std::string path_;
};

// Tracks files created by one command so a failure can remove partial
// output. Call keep() once everything is written.
class OutputGuard {
 public:
  ~OutputGuard();
  void track(const std::string& path);
  void keep() { keep_ = true; }

 private:
  std::vector<std::string> paths_;
  bool keep_ = false;
};

// Sidecar with the full resolved config, seed, subcommand and artifact
// version; a run is reproducible from this file alone.
void write_metadata(const std::string& path, const RunConfig& cfg,
                    const std::string& subcommand,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace symbiosim
