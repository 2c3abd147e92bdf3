#include "htsim/io.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace htsim {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::stringstream hs(line);
  for (std::string f; std::getline(hs, f, ',');) t.header.push_back(f);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) {
      if (f == "nan") {
        row.push_back(std::nan(""));
      } else if (f == "inf" || f == "-inf") {
        row.push_back(f[0] == '-' ? -INFINITY : INFINITY);
      } else {
        double x = 0;
        auto r = std::from_chars(f.data(), f.data() + f.size(), x);
        if (r.ec != std::errc()) throw std::runtime_error("bad number '" + f + "' in " + path);
        row.push_back(x);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

uint64_t fnv1a(const std::string& data, uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t x) {
  char buf[17];
  auto r = std::to_chars(buf, buf + 16, x, 16);
  std::string s(buf, r.ptr);
  return std::string(16 - s.size(), '0') + s;
}

nlohmann::json geometry_json(const Lattice& g) {
  nlohmann::json j;
  j["L"] = g.L();
  j["colors"] = g.colors();
  std::vector<std::array<int, 2>> ev, ep;
  std::vector<int> color;
  for (int e = 0; e < g.num_edges(); ++e) {
    ev.push_back(g.edge_vertices(e));
    ep.push_back(g.edge_plaquettes(e));
    color.push_back(g.edge_color(e));
  }
  j["edge_vertices"] = ev;
  j["edge_plaquettes"] = ep;
  j["edge_color"] = color;
  std::vector<std::array<int, 2>> vpos, ppos;
  for (int v = 0; v < g.num_vertices(); ++v) {
    Coord c = g.coord(g.vertex_site(v));
    vpos.push_back({c.x, c.y});
  }
  for (int p = 0; p < g.num_plaquettes(); ++p) {
    Coord c = g.coord(g.plaquette_site(p));
    ppos.push_back({c.x, c.y});
  }
  j["vertex_site"] = vpos;
  j["plaquette_site"] = ppos;
  return j;
}

uint64_t geometry_hash(const Lattice& g) { return fnv1a(geometry_json(g).dump()); }

std::string config_hash(const nlohmann::json& config) { return hex64(fnv1a(config.dump())); }

void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& files,
                    const nlohmann::json& results) {
  nlohmann::json j;
  j["format"] = "htsim-manifest/1";
  j["command"] = command;
  j["config"] = config;
  j["config_hash"] = config_hash(config);
  nlohmann::json fl = nlohmann::json::array();
  for (const auto& f : files) {
    fl.push_back({{"file", std::filesystem::path(f).filename().string()},
                  {"config_hash", j["config_hash"]}});
  }
  j["files"] = fl;
  j["results"] = results;
  std::ofstream out(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << j.dump(2) << '\n';
}

}  // namespace htsim
