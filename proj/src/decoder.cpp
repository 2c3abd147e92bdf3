#include "htsim/decoder.h"

#include <map>
#include <stdexcept>

#include "htsim/matching.h"

namespace htsim {

std::vector<std::array<int, 2>> pair_defects(const Lattice& g, Kind kind,
                                             const std::vector<int>& defects, bool exact) {
  const int n = static_cast<int>(defects.size());
  if (n % 2) throw std::logic_error("odd number of defects");
  WeightFn w = [&](int a, int b) { return int64_t(g.distance(kind, defects[a], defects[b])); };
  auto mate = exact ? min_weight_perfect_matching(n, w) : greedy_matching(n, w);
  std::vector<std::array<int, 2>> out;
  for (int i = 0; i < n; ++i) {
    if (mate[i] > i) out.push_back({defects[i], defects[mate[i]]});
  }
  return out;
}

std::vector<uint8_t> correction_chain(const Lattice& g, Kind kind, const std::vector<int>& defects,
                                      bool exact) {
  std::map<int, std::vector<int>> by_color;
  for (int d : defects) {
    by_color[kind == Kind::vertex ? g.vertex_color(d) : g.plaquette_color(d)].push_back(d);
  }
  std::vector<uint8_t> chain(g.num_edges(), 0);
  for (const auto& [c, ds] : by_color) {
    for (const auto& pr : pair_defects(g, kind, ds, exact)) {
      for (int e : g.path(kind, pr[0], pr[1])) chain[e] ^= 1;
    }
  }
  return chain;
}

bool parity_crossings(const std::vector<uint8_t>& chain, const std::vector<int>& edges) {
  bool p = false;
  for (int e : edges) p ^= chain[e] != 0;
  return p;
}

}  // namespace htsim
