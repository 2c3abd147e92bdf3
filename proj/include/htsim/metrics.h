#pragma once

#include <cstdint>
#include <vector>

#include "htsim/flags.h"

namespace htsim {

inline double flag_fidelity(const FlagState& f) { return f.empty() ? 1.0 : 0.0; }

// Absorption is exact in the flag model: saturated means every flag set.
inline bool absorbed(double density, int edges) { return density >= 1.0 - 0.5 / edges; }

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<int64_t> counts;

  int bins() const { return static_cast<int>(counts.size()); }
  double bin_lo(int i) const { return lo + (hi - lo) * i / bins(); }
  double bin_hi(int i) const { return lo + (hi - lo) * (i + 1) / bins(); }
  int64_t total() const;
};

// Values equal to hi land in the last bin.
Histogram make_histogram(const std::vector<double>& xs, int bins = 50, double lo = 0.0,
                         double hi = 1.0);

// (nX+nZ)/2 at the last time minus its value a window earlier (nearest
// recorded time at or before t_f - window).
double delta_density(const std::vector<double>& t, const std::vector<double>& nsum,
                     double window);

// Histogram of per-trajectory densities at the first recorded time where the
// ensemble mean reaches `target`, plus the mean over trajectories that are
// not yet absorbed.
struct MeanSnapshot {
  int index = -1;
  double time = 0.0;
  double mean = 0.0;
  double conditioned_mean = 0.0;
  double absorbed_fraction = 0.0;
  Histogram hist;
};
// density[k][i]: trajectory k at time index i.
MeanSnapshot snapshot_at_mean(const std::vector<double>& times,
                              const std::vector<std::vector<double>>& density, double target,
                              int edges, int bins = 50);

// Mean over non-absorbed trajectories at every time index (nan when none).
std::vector<double> conditioned_means(const std::vector<std::vector<double>>& density, int edges);

struct Modes {
  double absorbed_fraction = 0.0;  // mass at density 1
  double low_fraction = 0.0;       // mass below 0.5
  double low_peak = 0.0;           // center of the fullest bin below 0.5
  double mode = 0.0;               // center of the fullest bin overall
};
Modes describe_modes(const Histogram& h, const std::vector<double>& xs, int edges);

}  // namespace htsim
