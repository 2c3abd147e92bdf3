#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "htsim/lattice.h"

namespace htsim {

// Pairs defects of one kind and color by lattice distance. exact selects
// minimum-weight perfect matching, otherwise greedy pairing.
std::vector<std::array<int, 2>> pair_defects(const Lattice& g, Kind kind,
                                             const std::vector<int>& defects, bool exact = true);

// Edge indicator (over all edges) of paths joining paired defects. Defects
// may mix colors; each color is paired separately.
std::vector<uint8_t> correction_chain(const Lattice& g, Kind kind, const std::vector<int>& defects,
                                      bool exact = true);

// Parity of |chain ∩ edges|.
bool parity_crossings(const std::vector<uint8_t>& chain, const std::vector<int>& edges);

}  // namespace htsim
