#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "htsim/lattice.h"
#include "htsim/metrics.h"
#include "htsim/rates.h"
#include "htsim/stats.h"
#include "htsim/tableau.h"

namespace htsim {

// requested > 0 wins, then HTSIM_WORKERS, then 1.
int resolve_workers(int requested);

// f(i) for i in [0, n) on `workers` threads; results in index order.
template <class T>
std::vector<T> parallel_map(int n, int workers, const std::function<T(int)>& f) {
  std::vector<T> out(n);
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  const int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

struct RunConfig {
  Model model = Model::toric;
  bool flags_only = false;  // flag dynamics alone; toric model means one color
  int L = 24;
  Rates rates;
  double t_final = 100.0;  // physical time
  int trajectories = 100;
  uint64_t seed = 1;
  double record_stride = 0.0;  // sweeps; 0 gives about 100 records
  double decode_stride = 10.0;  // sweeps; 0 decodes at the last record only
  std::vector<Basis> bases{Basis::zero, Basis::plus};  // d4 runs, one ensemble each
  bool exact = true;
  int colors() const { return model == Model::d4 ? 3 : 1; }
};

struct SeriesPoint {
  double t = 0, nX = 0, nZ = 0, ndB = 0, ndA = 0, ameas = 0, F0 = 0, Fplus = 0, Fflag = 0;
};
using Series = std::vector<SeriesPoint>;

// Event counts at which records are taken, from 0 to the last event.
std::vector<int64_t> record_marks(int edges, double c0, double t_final, double stride_sweeps);

// Number of trajectory slots in a run (d4 runs have one ensemble per basis).
int trajectory_slots(const RunConfig& cfg);

Series run_trajectory(const RunConfig& cfg, const Lattice& g, const D4Algebra* alg, int index);

struct SeriesResult {
  std::vector<Series> trajectories;
  Series mean;  // nan-aware average per record
};
SeriesResult run_series(const RunConfig& cfg, int workers);
Series mean_series(const std::vector<Series>& runs);

void write_series_csv(const std::string& path, const Series& s);
void write_flags_csv(const std::string& path, const Series& s);

struct SweepConfig {
  RunConfig base;
  double gx_lo = 0, gx_hi = 30, gz_lo = 0, gz_hi = 40;
  int steps_x = 24, steps_z = 24;
};
struct SweepPoint {
  double gx = 0, gz = 0, nX = 0, nZ = 0, nf_mean = 0, nf_se = 0, F0 = 0, Fplus = 0;
};
std::vector<double> linspace(double lo, double hi, int n);
// Late-time averages at the listed points.
std::vector<SweepPoint> run_points(const RunConfig& base,
                                   const std::vector<std::pair<double, double>>& points,
                                   int workers);
std::vector<SweepPoint> run_sweep(const SweepConfig& cfg, int workers);

enum class Phase { active, x_active, z_active, absorbing };
Phase classify_phase(double nX, double nZ);
const char* to_string(Phase p);

struct TransitionConfig {
  Model model = Model::toric;  // toric: X flags on one color; d4: Z flags
  std::vector<int> Ls{48, 96, 192};
  std::vector<double> gxs{6.2, 6.3, 6.4, 6.5, 6.6};
  Rates base;
  double threshold = 0.65;
  double horizon_sweeps = 1e4;
  int trajectories = 500;
  uint64_t seed = 1;
  int chunk = 0;  // > 0: stop a cell once over half its trajectories are censored
  bool stop_after_flip = false;  // stop once the largest size stays censored
};
struct TauRow {
  double gx = 0;
  int L = 0;
  int n = 0;
  double tau_mean = 0, tau_se = 0, tau_median = 0, censored_frac = 0;
};
struct TransitionResult {
  std::vector<TauRow> rows;
  std::vector<double> gxs;
  std::vector<double> curvature;  // of log median tau against log L, per gx
  double gx_star = 0;             // nan without a sign change
};
TransitionResult run_transition(const TransitionConfig& cfg, int workers);
// Second difference (or quadratic coefficient) of y against x; +inf when
// the largest sizes never reach the threshold.
double log_curvature(const std::vector<double>& L, const std::vector<double>& tau);
// Last upward sign change of the curvature, linearly interpolated.
double concavity_flip(const std::vector<double>& gxs, const std::vector<double>& curv);

struct BistabilityConfig {
  Model model = Model::toric;  // toric: X flags on one color; d4: Z flags
  int L = 48;
  Rates rates;
  double target = 0.6;
  double record_dt = 1.0;
  double horizon_sweeps = 1e4;
  int trajectories = 500;
  uint64_t seed = 1;
  int bins = 50;
};
struct BistabilityResult {
  std::vector<double> times, mean, conditioned;
  MeanSnapshot snap;
  Modes modes;
  std::vector<double> at_snapshot;
  int edges = 0;
};
BistabilityResult run_bistability(const BistabilityConfig& cfg, int workers);

struct RecoverConfig {
  Model model = Model::d4;
  std::vector<int> Ls{24, 48, 96};
  Rates steady;  // eta is set to 0 for the recovery stage
  double steady_sweeps = 500;
  double horizon_sweeps = 1e4;
  int trajectories = 100;
  uint64_t seed = 1;
  std::vector<double> eps{0.5};
};
struct RecoverResult {
  std::vector<int> Ls;
  std::vector<std::vector<double>> t_empty;  // per L, censored as +inf
  std::vector<std::vector<double>> tau;      // per L, per eps
  std::vector<LogFit> fits;                  // per eps
};
RecoverResult run_recover(const RecoverConfig& cfg, int workers);
// Smallest t with 1 - F_flag(t) <= eps.
double recovery_time(std::vector<double> t_empty, double eps);

struct UnheraldedConfig {
  int L = 18;
  Rates base;
  std::vector<double> phis{0.9, 0.95, 0.98, 0.99};
  double t_final = 12.0;
  double dt = 0.25;
  int trajectories = 100;
  uint64_t seed = 1;
  std::vector<Basis> bases{Basis::zero};
};
struct UnheraldedResult {
  std::vector<double> phis;
  std::vector<Series> curves;  // mean series per phi
  std::vector<double> tau0, tau_plus;
  PowerFit fit0{}, fit_plus{};
};
UnheraldedResult run_unheralded(const UnheraldedConfig& cfg, int workers);
// First time the fidelity column drops below 1/2, linearly interpolated.
double half_life(const Series& s, bool plus);

struct ClustersConfig {
  Model model = Model::d4;
  std::vector<int> Ls{24, 48, 96};
  Rates rates;
  double t_final = 20.0;
  int trajectories = 100;
  uint64_t seed = 1;
  bool x_flags = true;
};
struct ClustersResult {
  std::vector<int> Ls;
  std::vector<std::map<int, int64_t>> sizes;  // per L, color 0
  std::vector<RunningStats> smax;
  LogFit fit{};
};
ClustersResult run_clusters(const ClustersConfig& cfg, int workers);

// Random defect sets on the L x L toric vertex lattice, matched exactly and
// by exhaustive search.
struct DecodeCheckRow {
  int instance = 0;
  int defects = 0;
  int64_t w_mwpm = 0, w_brute = 0;
};
std::vector<DecodeCheckRow> decode_check(int instances, int max_defects, int L, uint64_t seed,
                                         int workers);

}  // namespace htsim
