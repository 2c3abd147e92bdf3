#include "htsim/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>

#include "htsim/d4sim.h"
#include "htsim/flags.h"
#include "htsim/io.h"
#include "htsim/matching.h"
#include "htsim/toric.h"

namespace htsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

int64_t to_events(double sweeps, int edges) {
  return static_cast<int64_t>(std::llround(sweeps * edges));
}

double nan_mean(const std::vector<double>& xs) {
  double s = 0.0;
  int k = 0;
  for (double x : xs) {
    if (!std::isnan(x)) {
      s += x;
      ++k;
    }
  }
  return k ? s / k : kNan;
}

// Median with +inf entries allowed.
double median(std::vector<double> xs) {
  if (xs.empty()) return kNan;
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  if (n % 2) return xs[n / 2];
  const double a = xs[n / 2 - 1], b = xs[n / 2];
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return 0.5 * (a + b);
}

uint64_t decode_seed(uint64_t s) { return splitmix64(s ^ 0xd1b54a32d192ed03ULL); }

}  // namespace

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HTSIM_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

std::vector<int64_t> record_marks(int edges, double c0, double t_final, double stride) {
  const double sweeps = t_final / c0;
  const int64_t total = to_events(sweeps, edges);
  if (stride <= 0.0) stride = sweeps / 100.0;
  std::vector<int64_t> marks{0};
  if (total == 0) return marks;
  for (int k = 1;; ++k) {
    int64_t m = to_events(k * stride, edges);
    if (m >= total) break;
    if (m > marks.back()) marks.push_back(m);
  }
  marks.push_back(total);
  return marks;
}

int trajectory_slots(const RunConfig& cfg) {
  if (cfg.model == Model::d4 && !cfg.flags_only) {
    return cfg.trajectories * static_cast<int>(cfg.bases.size());
  }
  return cfg.trajectories;
}

Series run_trajectory(const RunConfig& cfg, const Lattice& g, const D4Algebra* alg, int index) {
  const uint64_t seed = trajectory_seed(cfg.seed, index);
  Rng rng(seed);
  Rng drng(decode_seed(seed));
  const int N = g.num_edges();
  const double c0 = cfg.rates.c0();
  const auto marks = record_marks(N, c0, cfg.t_final, cfg.record_stride);
  const int64_t dstride = cfg.decode_stride > 0 ? to_events(cfg.decode_stride, N) : 0;
  const double np = g.num_plaquettes();

  std::unique_ptr<ToricSim> toric;
  std::unique_ptr<D4Sim> d4;
  std::unique_ptr<FlagSim> flags;
  Basis basis = Basis::zero;
  if (cfg.flags_only) {
    flags = std::make_unique<FlagSim>(g, cfg.model, cfg.rates);
  } else if (cfg.model == Model::toric) {
    toric = std::make_unique<ToricSim>(g, cfg.rates);
  } else {
    if (!alg) throw std::invalid_argument("d4 run needs the algebra");
    basis = cfg.bases.at(index / cfg.trajectories);
    d4 = std::make_unique<D4Sim>(*alg, cfg.rates, basis);
  }

  Series out;
  int64_t last_decode = 0;
  int64_t last_meas = 0;
  double last_t = 0.0;
  for (size_t k = 0; k < marks.size(); ++k) {
    SeriesPoint pt;
    const FlagState* f = nullptr;
    int64_t meas = 0;
    if (flags) {
      flags->advance(rng, marks[k] - flags->events());
      f = &flags->flags();
      pt.t = flags->time();
      pt.ndB = pt.ndA = pt.ameas = pt.F0 = pt.Fplus = kNan;
    } else if (toric) {
      while (toric->events() < marks[k]) toric->event(rng);
      f = &toric->flags();
      pt.t = toric->time();
      pt.ndB = toric->density_b();
      pt.ndA = toric->density_a();
      meas = toric->measurements();
    } else {
      d4->advance(rng, marks[k] - d4->events());
      f = &d4->flags();
      pt.t = d4->time();
      pt.ndB = d4->density_b();
      pt.ndA = d4->density_a();
      meas = d4->measurements();
    }
    pt.nX = f->density_x();
    pt.nZ = f->density_z();
    pt.Fflag = flag_fidelity(*f);
    if (!flags) {
      pt.ameas = k == 0 || pt.t <= last_t ? 0.0 : (meas - last_meas) / (np * (pt.t - last_t));
      last_meas = meas;
      last_t = pt.t;
      const bool due = k == 0 || k + 1 == marks.size() ||
                       (dstride > 0 && marks[k] - last_decode >= dstride);
      pt.F0 = pt.Fplus = kNan;
      if (k == 0) {
        pt.F0 = toric || basis == Basis::zero ? 1.0 : kNan;
        pt.Fplus = toric || basis == Basis::plus ? 1.0 : kNan;
      } else if (due) {
        last_decode = marks[k];
        if (toric) {
          LogicalError le = toric_logical_error(*toric, cfg.exact);
          pt.F0 = le.x ? 0.0 : 1.0;
          pt.Fplus = le.z ? 0.0 : 1.0;
        } else {
          const double ok = decode_d4(d4->tableau(), drng, cfg.exact).ok ? 1.0 : 0.0;
          (basis == Basis::zero ? pt.F0 : pt.Fplus) = ok;
        }
      }
    }
    out.push_back(pt);
  }
  return out;
}

Series mean_series(const std::vector<Series>& runs) {
  if (runs.empty()) return {};
  const size_t n = runs[0].size();
  Series m(n);
  std::vector<double> col(runs.size());
  auto avg = [&](size_t i, double SeriesPoint::*field) {
    for (size_t k = 0; k < runs.size(); ++k) col[k] = runs[k][i].*field;
    return nan_mean(col);
  };
  for (size_t i = 0; i < n; ++i) {
    m[i].t = avg(i, &SeriesPoint::t);
    m[i].nX = avg(i, &SeriesPoint::nX);
    m[i].nZ = avg(i, &SeriesPoint::nZ);
    m[i].ndB = avg(i, &SeriesPoint::ndB);
    m[i].ndA = avg(i, &SeriesPoint::ndA);
    m[i].ameas = avg(i, &SeriesPoint::ameas);
    m[i].F0 = avg(i, &SeriesPoint::F0);
    m[i].Fplus = avg(i, &SeriesPoint::Fplus);
    m[i].Fflag = avg(i, &SeriesPoint::Fflag);
  }
  return m;
}

SeriesResult run_series(const RunConfig& cfg, int workers) {
  cfg.rates.validate();
  const bool quantum = !cfg.flags_only;
  Lattice g(cfg.L, cfg.colors(), quantum);
  std::unique_ptr<D4Algebra> alg;
  if (quantum && cfg.model == Model::d4) alg = std::make_unique<D4Algebra>(g);
  SeriesResult r;
  r.trajectories = parallel_map<Series>(trajectory_slots(cfg), workers, [&](int i) {
    return run_trajectory(cfg, g, alg.get(), i);
  });
  r.mean = mean_series(r.trajectories);
  return r;
}

void write_series_csv(const std::string& path, const Series& s) {
  CsvWriter w(path, {"t", "nX", "nZ", "ndB", "ndA", "ameas", "F0", "Fplus"});
  for (const auto& p : s) w.row({p.t, p.nX, p.nZ, p.ndB, p.ndA, p.ameas, p.F0, p.Fplus});
}

void write_flags_csv(const std::string& path, const Series& s) {
  CsvWriter w(path, {"t", "nX", "nZ", "Fflag"});
  for (const auto& p : s) w.row({p.t, p.nX, p.nZ, p.Fflag});
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one step");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

std::vector<SweepPoint> run_points(const RunConfig& base,
                                   const std::vector<std::pair<double, double>>& points,
                                   int workers) {
  const bool quantum = !base.flags_only;
  Lattice g(base.L, base.colors(), quantum);
  std::unique_ptr<D4Algebra> alg;
  if (quantum && base.model == Model::d4) alg = std::make_unique<D4Algebra>(g);
  std::vector<RunConfig> cfgs;
  for (size_t k = 0; k < points.size(); ++k) {
    RunConfig c = base;
    c.rates.gamma_x = points[k].first;
    c.rates.gamma_z = points[k].second;
    c.rates.validate();
    c.record_stride = c.t_final / c.rates.c0() + 1.0;
    c.decode_stride = 0.0;
    c.seed = splitmix64(base.seed + k);
    cfgs.push_back(c);
  }
  const int slots = trajectory_slots(base);
  auto finals = parallel_map<SeriesPoint>(
      static_cast<int>(points.size()) * slots, workers,
      [&](int i) { return run_trajectory(cfgs[i / slots], g, alg.get(), i % slots).back(); });
  std::vector<SweepPoint> out;
  for (size_t k = 0; k < points.size(); ++k) {
    SweepPoint sp;
    sp.gx = points[k].first;
    sp.gz = points[k].second;
    RunningStats nf;
    std::vector<double> nx, nz, f0, fp;
    for (int i = 0; i < slots; ++i) {
      const SeriesPoint& p = finals[k * slots + i];
      nx.push_back(p.nX);
      nz.push_back(p.nZ);
      f0.push_back(p.F0);
      fp.push_back(p.Fplus);
      nf.add(0.5 * (p.nX + p.nZ));
    }
    sp.nX = nan_mean(nx);
    sp.nZ = nan_mean(nz);
    sp.nf_mean = nf.mean();
    sp.nf_se = nf.stderr_mean();
    sp.F0 = nan_mean(f0);
    sp.Fplus = nan_mean(fp);
    out.push_back(sp);
  }
  return out;
}

std::vector<SweepPoint> run_sweep(const SweepConfig& cfg, int workers) {
  std::vector<std::pair<double, double>> pts;
  for (double gz : linspace(cfg.gz_lo, cfg.gz_hi, cfg.steps_z)) {
    for (double gx : linspace(cfg.gx_lo, cfg.gx_hi, cfg.steps_x)) pts.emplace_back(gx, gz);
  }
  return run_points(cfg.base, pts, workers);
}

Phase classify_phase(double nX, double nZ) {
  const bool x = nX >= 0.5, z = nZ >= 0.5;
  if (x && z) return Phase::absorbing;
  if (x) return Phase::z_active;
  if (z) return Phase::x_active;
  return Phase::active;
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::active: return "active";
    case Phase::x_active: return "x-active";
    case Phase::z_active: return "z-active";
    case Phase::absorbing: return "absorbing";
  }
  return "?";
}

double log_curvature(const std::vector<double>& L, const std::vector<double>& tau) {
  const size_t n = L.size();
  if (n < 3 || tau.size() != n) throw std::invalid_argument("curvature needs three sizes");
  size_t k = 0;
  while (k < n && std::isfinite(tau[k])) ++k;
  if (k < n) {
    for (size_t i = k; i < n; ++i) {
      if (std::isfinite(tau[i])) return kNan;
    }
    return kInf;
  }
  // Least-squares quadratic in log L; returns twice the leading coefficient.
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(L[i]), y = std::log(tau[i]);
    double p = 1.0;
    for (int d = 0; d < 5; ++d, p *= x) {
      s[d] += p;
      if (d < 3) t[d] += p * y;
    }
  }
  double a[3][4] = {{s[4], s[3], s[2], t[2]}, {s[3], s[2], s[1], t[1]}, {s[2], s[1], s[0], t[0]}};
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double m = a[r][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[r][j] -= m * a[c][j];
    }
  }
  return 2.0 * a[0][3] / a[0][0];
}

double concavity_flip(const std::vector<double>& gxs, const std::vector<double>& curv) {
  double flip = kNan;
  for (size_t i = 1; i < gxs.size() && i < curv.size(); ++i) {
    const double a = curv[i - 1], b = curv[i];
    if (std::isnan(a) || std::isnan(b) || !(a <= 0.0 && b > 0.0)) continue;
    if (std::isinf(b)) {
      flip = 0.5 * (gxs[i - 1] + gxs[i]);
    } else {
      flip = gxs[i - 1] + (0.0 - a) * (gxs[i] - gxs[i - 1]) / (b - a);
    }
  }
  return flip;
}

TransitionResult run_transition(const TransitionConfig& cfg, int workers) {
  const bool x_flags = cfg.model == Model::toric;
  const int colors = x_flags ? 1 : 3;
  std::vector<std::unique_ptr<Lattice>> gs;
  for (int L : cfg.Ls) gs.push_back(std::make_unique<Lattice>(L, colors, false));
  std::vector<double> Ld(cfg.Ls.begin(), cfg.Ls.end());

  TransitionResult res;
  const int n = cfg.trajectories;
  const int chunk = cfg.chunk > 0 ? cfg.chunk : n;
  for (size_t gi = 0; gi < cfg.gxs.size(); ++gi) {
    Rates r = cfg.base;
    r.gamma_x = cfg.gxs[gi];
    if (x_flags) r.gamma_z = 0.0;
    r.validate();
    std::vector<double> med;
    for (size_t li = 0; li < cfg.Ls.size(); ++li) {
      const uint64_t cell = gi * cfg.Ls.size() + li;
      std::vector<TauSample> samples;
      int censored = 0;
      for (int start = 0; start < n; start += chunk) {
        const int m = std::min(chunk, n - start);
        auto part = parallel_map<TauSample>(m, workers, [&](int i) {
          Rng rng(trajectory_seed(cfg.seed, cell * n + start + i));
          return time_to_density(*gs[li], cfg.model, r, cfg.threshold, cfg.horizon_sweeps, rng,
                                 x_flags);
        });
        for (const auto& s : part) {
          censored += s.censored;
          samples.push_back(s);
        }
        if (2 * censored > n) break;
      }
      RunningStats st;
      std::vector<double> ts;
      for (const auto& s : samples) {
        st.add(s.tau);
        ts.push_back(s.censored ? kInf : s.tau);
      }
      TauRow row;
      row.gx = cfg.gxs[gi];
      row.L = cfg.Ls[li];
      row.n = static_cast<int>(samples.size());
      row.tau_mean = st.mean();
      row.tau_se = st.stderr_mean();
      row.tau_median = 2 * censored > n ? kInf : median(ts);
      row.censored_frac = double(censored) / samples.size();
      res.rows.push_back(row);
      med.push_back(row.tau_median);
    }
    res.gxs.push_back(cfg.gxs[gi]);
    res.curvature.push_back(cfg.Ls.size() >= 3 ? log_curvature(Ld, med) : kNan);
    if (cfg.stop_after_flip && res.curvature.back() == kInf) break;
  }
  res.gx_star = concavity_flip(res.gxs, res.curvature);
  return res;
}

BistabilityResult run_bistability(const BistabilityConfig& cfg, int workers) {
  const bool x_flags = cfg.model == Model::toric;
  Lattice g(cfg.L, x_flags ? 1 : 3, false);
  Rates r = cfg.rates;
  if (x_flags) r.gamma_z = 0.0;
  r.validate();
  const int N = g.num_edges();
  const double c0 = r.c0();
  const int K = static_cast<int>(std::floor(cfg.horizon_sweeps * c0 / cfg.record_dt + 1e-9));
  std::vector<double> times(K + 1);
  for (int k = 0; k <= K; ++k) times[k] = k * cfg.record_dt;

  auto dens = parallel_map<std::vector<double>>(cfg.trajectories, workers, [&](int i) {
    Rng rng(trajectory_seed(cfg.seed, i));
    FlagSim sim(g, cfg.model, r);
    StopRule stop;
    (x_flags ? stop.x_at_least : stop.z_at_least) = N;
    std::vector<double> d(K + 1, 1.0);
    d[0] = 0.0;
    for (int k = 1; k <= K; ++k) {
      const int64_t mark = to_events(times[k] / c0, N);
      if (sim.advance(rng, mark - sim.events(), stop)) break;
      d[k] = x_flags ? sim.flags().density_x() : sim.flags().density_z();
    }
    return d;
  });

  BistabilityResult res;
  res.edges = N;
  res.times = times;
  res.mean.assign(K + 1, 0.0);
  for (const auto& d : dens) {
    for (int k = 0; k <= K; ++k) res.mean[k] += d[k] / dens.size();
  }
  res.conditioned = conditioned_means(dens, N);
  res.snap = snapshot_at_mean(times, dens, cfg.target, N, cfg.bins);
  for (const auto& d : dens) res.at_snapshot.push_back(d[res.snap.index]);
  res.modes = describe_modes(res.snap.hist, res.at_snapshot, N);
  return res;
}

double recovery_time(std::vector<double> t_empty, double eps) {
  if (t_empty.empty()) return kNan;
  std::sort(t_empty.begin(), t_empty.end());
  const auto need = static_cast<size_t>(std::ceil((1.0 - eps) * t_empty.size() - 1e-9));
  if (need == 0) return 0.0;
  return t_empty[need - 1];
}

RecoverResult run_recover(const RecoverConfig& cfg, int workers) {
  const int colors = cfg.model == Model::d4 ? 3 : 1;
  Rates relax = cfg.steady;
  relax.eta = 0.0;
  cfg.steady.validate();
  relax.validate();
  RecoverResult res;
  res.Ls = cfg.Ls;
  for (size_t li = 0; li < cfg.Ls.size(); ++li) {
    Lattice g(cfg.Ls[li], colors, false);
    const int N = g.num_edges();
    auto te = parallel_map<double>(cfg.trajectories, workers, [&](int i) {
      Rng rng(trajectory_seed(cfg.seed, li * cfg.trajectories + i));
      FlagSim sim(g, cfg.model, cfg.steady);
      sim.advance(rng, to_events(cfg.steady_sweeps, N));
      sim.set_rates(relax);
      sim.restart_clock();
      if (sim.flags().empty()) return 0.0;
      StopRule stop;
      stop.when_empty = true;
      return sim.advance(rng, to_events(cfg.horizon_sweeps, N), stop) ? sim.time() : kInf;
    });
    std::vector<double> taus;
    for (double e : cfg.eps) taus.push_back(recovery_time(te, e));
    res.t_empty.push_back(std::move(te));
    res.tau.push_back(std::move(taus));
  }
  std::vector<double> Ld(cfg.Ls.begin(), cfg.Ls.end());
  for (size_t k = 0; k < cfg.eps.size(); ++k) {
    std::vector<double> t;
    bool finite = true;
    for (const auto& row : res.tau) {
      t.push_back(row[k]);
      finite = finite && std::isfinite(row[k]);
    }
    if (finite && Ld.size() >= 2) {
      res.fits.push_back(fit_log(Ld, t));
    } else {
      res.fits.push_back({kNan, kNan, kNan, kNan});
    }
  }
  return res;
}

double half_life(const Series& s, bool plus) {
  double pt = kNan, pf = kNan;
  for (const auto& p : s) {
    const double f = plus ? p.Fplus : p.F0;
    if (std::isnan(f)) continue;
    if (f < 0.5) {
      if (std::isnan(pf)) return p.t;
      return pt + (pf - 0.5) * (p.t - pt) / (pf - f);
    }
    pt = p.t;
    pf = f;
  }
  return kNan;
}

UnheraldedResult run_unheralded(const UnheraldedConfig& cfg, int workers) {
  UnheraldedResult res;
  res.phis = cfg.phis;
  bool zero = false, plus = false;
  for (Basis b : cfg.bases) (b == Basis::zero ? zero : plus) = true;
  std::vector<double> x0, t0, xp, tp;
  for (size_t k = 0; k < cfg.phis.size(); ++k) {
    RunConfig rc;
    rc.model = Model::d4;
    rc.L = cfg.L;
    rc.rates = cfg.base;
    rc.rates.phi_e = cfg.phis[k];
    rc.t_final = cfg.t_final;
    rc.trajectories = cfg.trajectories;
    rc.seed = splitmix64(cfg.seed + k);
    rc.record_stride = cfg.dt / rc.rates.c0();
    rc.decode_stride = rc.record_stride;
    rc.bases = cfg.bases;
    SeriesResult sr = run_series(rc, workers);
    res.curves.push_back(sr.mean);
    const double h0 = zero ? half_life(sr.mean, false) : kNan;
    const double hp = plus ? half_life(sr.mean, true) : kNan;
    res.tau0.push_back(h0);
    res.tau_plus.push_back(hp);
    if (std::isfinite(h0)) {
      x0.push_back(1.0 - cfg.phis[k]);
      t0.push_back(h0);
    }
    if (std::isfinite(hp)) {
      xp.push_back(1.0 - cfg.phis[k]);
      tp.push_back(hp);
    }
  }
  const PowerFit none{kNan, kNan, kNan, kNan};
  res.fit0 = x0.size() >= 2 ? fit_power(x0, t0) : none;
  res.fit_plus = xp.size() >= 2 ? fit_power(xp, tp) : none;
  return res;
}

ClustersResult run_clusters(const ClustersConfig& cfg, int workers) {
  cfg.rates.validate();
  const int colors = cfg.model == Model::d4 ? 3 : 1;
  ClustersResult res;
  res.Ls = cfg.Ls;
  std::vector<double> Ld, sm;
  for (size_t li = 0; li < cfg.Ls.size(); ++li) {
    Lattice g(cfg.Ls[li], colors, false);
    const int N = g.num_edges();
    using Out = std::pair<std::map<int, int>, int>;
    auto outs = parallel_map<Out>(cfg.trajectories, workers, [&](int i) {
      Rng rng(trajectory_seed(cfg.seed, li * cfg.trajectories + i));
      FlagSim sim(g, cfg.model, cfg.rates);
      sim.advance(rng, to_events(cfg.t_final / cfg.rates.c0(), N));
      return Out{cluster_sizes(g, sim.flags(), cfg.x_flags, 0),
                 largest_cluster(g, sim.flags(), cfg.x_flags, 0)};
    });
    std::map<int, int64_t> hist;
    RunningStats st;
    for (const auto& o : outs) {
      for (auto [s, c] : o.first) hist[s] += c;
      st.add(o.second);
    }
    res.sizes.push_back(std::move(hist));
    res.smax.push_back(st);
    Ld.push_back(cfg.Ls[li]);
    sm.push_back(st.mean());
  }
  res.fit = Ld.size() >= 2 ? fit_log(Ld, sm) : LogFit{kNan, kNan, kNan, kNan};
  return res;
}

std::vector<DecodeCheckRow> decode_check(int instances, int max_defects, int L, uint64_t seed,
                                         int workers) {
  if (max_defects < 2) throw std::invalid_argument("need at least two defects");
  Lattice g(L, 1);
  return parallel_map<DecodeCheckRow>(instances, workers, [&](int i) {
    Rng rng(trajectory_seed(seed, i));
    const int n = 2 * (1 + uniform_index(rng, max_defects / 2));
    std::vector<int> pts;
    while (static_cast<int>(pts.size()) < n) {
      int v = uniform_index(rng, g.num_vertices());
      if (std::find(pts.begin(), pts.end(), v) == pts.end()) pts.push_back(v);
    }
    WeightFn w = [&](int a, int b) -> int64_t {
      return g.distance(Kind::vertex, pts[a], pts[b]);
    };
    DecodeCheckRow row;
    row.instance = i;
    row.defects = n;
    row.w_mwpm = matching_weight(min_weight_perfect_matching(n, w), w);
    row.w_brute = matching_weight(brute_force_matching(n, w), w);
    return row;
  });
}

}  // namespace htsim
