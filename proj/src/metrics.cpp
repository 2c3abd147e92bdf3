#include "htsim/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace htsim {

int64_t Histogram::total() const {
  int64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

Histogram make_histogram(const std::vector<double>& xs, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw std::invalid_argument("bad histogram range");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  for (double x : xs) {
    if (x < lo || x > hi || std::isnan(x)) continue;
    int i = static_cast<int>((x - lo) / (hi - lo) * bins);
    h.counts[std::min(i, bins - 1)]++;
  }
  return h;
}

double delta_density(const std::vector<double>& t, const std::vector<double>& nsum,
                     double window) {
  if (t.empty() || t.size() != nsum.size()) throw std::invalid_argument("empty series");
  const double t0 = t.back() - window;
  if (t0 < t.front() - 1e-12) throw std::invalid_argument("window exceeds the series");
  size_t i = 0;
  while (i + 1 < t.size() && t[i + 1] <= t0 + 1e-12) ++i;
  return nsum.back() - nsum[i];
}

std::vector<double> conditioned_means(const std::vector<std::vector<double>>& density,
                                      int edges) {
  if (density.empty()) return {};
  const size_t n = density[0].size();
  std::vector<double> out(n, std::nan(""));
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    int k = 0;
    for (const auto& d : density) {
      if (!absorbed(d[i], edges)) {
        s += d[i];
        ++k;
      }
    }
    if (k > 0) out[i] = s / k;
  }
  return out;
}

MeanSnapshot snapshot_at_mean(const std::vector<double>& times,
                              const std::vector<std::vector<double>>& density, double target,
                              int edges, int bins) {
  if (density.size() < 2) throw std::invalid_argument("need at least two trajectories");
  const size_t n = times.size();
  double lo = INFINITY, hi = -INFINITY;
  for (size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (const auto& d : density) m += d[i];
    m /= density.size();
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    if (m >= target) {
      MeanSnapshot s;
      s.index = static_cast<int>(i);
      s.time = times[i];
      s.mean = m;
      std::vector<double> xs;
      int na = 0;
      double cs = 0.0;
      for (const auto& d : density) {
        xs.push_back(d[i]);
        if (absorbed(d[i], edges)) {
          ++na;
        } else {
          cs += d[i];
        }
      }
      const int k = static_cast<int>(density.size());
      s.absorbed_fraction = double(na) / k;
      s.conditioned_mean = na < k ? cs / (k - na) : std::nan("");
      s.hist = make_histogram(xs, bins);
      return s;
    }
  }
  throw std::runtime_error("ensemble mean never reaches " + std::to_string(target) +
                           "; attained range [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
}

Modes describe_modes(const Histogram& h, const std::vector<double>& xs, int edges) {
  Modes m;
  if (xs.empty()) return m;
  int na = 0, nl = 0;
  for (double x : xs) {
    na += absorbed(x, edges);
    nl += x < 0.5;
  }
  m.absorbed_fraction = double(na) / xs.size();
  m.low_fraction = double(nl) / xs.size();
  int best = 0, best_low = -1;
  for (int i = 0; i < h.bins(); ++i) {
    if (h.counts[i] > h.counts[best]) best = i;
    if (h.bin_hi(i) <= 0.5 + 1e-12 && (best_low < 0 || h.counts[i] > h.counts[best_low])) {
      best_low = i;
    }
  }
  m.mode = 0.5 * (h.bin_lo(best) + h.bin_hi(best));
  if (best_low >= 0) m.low_peak = 0.5 * (h.bin_lo(best_low) + h.bin_hi(best_low));
  return m;
}

}  // namespace htsim
