#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "htsim/lattice.h"

namespace htsim {

// Shortest round-trip decimal form; "nan" and "inf" for non-finite values.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

uint64_t fnv1a(const std::string& data, uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(uint64_t x);

// Content hash over the lattice incidence tables.
uint64_t geometry_hash(const Lattice& g);
nlohmann::json geometry_json(const Lattice& g);

// Writes <dir>/manifest.json with the config, its hash and the listed files.
void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& files,
                    const nlohmann::json& results = nlohmann::json::object());

std::string config_hash(const nlohmann::json& config);

}  // namespace htsim
