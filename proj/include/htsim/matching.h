#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace htsim {

using WeightFn = std::function<int64_t(int, int)>;

// Exact minimum-weight perfect matching on the complete graph over n points
// (n even, weights >= 0). Returns mate[i]. O(n^3).
std::vector<int> min_weight_perfect_matching(int n, const WeightFn& w);

// Exhaustive search over all pairings; small n only.
std::vector<int> brute_force_matching(int n, const WeightFn& w);

// Repeatedly pairs the closest remaining points; ties by index.
std::vector<int> greedy_matching(int n, const WeightFn& w);

int64_t matching_weight(const std::vector<int>& mate, const WeightFn& w);

}  // namespace htsim
