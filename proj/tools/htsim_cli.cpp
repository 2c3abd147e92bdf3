// htsim command line: trajectories, sweeps and the derived studies. Each
// command writes CSV files plus manifest.json into --out.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "htsim/experiments.h"
#include "htsim/io.h"
#include "htsim/meanfield.h"

using namespace htsim;
using nlohmann::json;

namespace {

struct Options {
  std::string model = "toric";
  int L = 24;
  double eta = 1.0;
  double gamma_x = 4.0;
  double gamma_z = 8.0;
  double phi_e = 1.0;
  double t_final = -1;
  int trajectories = -1;
  uint64_t seed = 1;
  std::string basis = "both";
  int workers = 0;
  std::string out = ".";
  double budget = 1.0;
  std::vector<double> gx_range{0, 30};
  std::vector<double> gz_range{0, 40};
  std::vector<int> grid_steps{24};
  std::vector<int> L_list;
  double threshold = 0.65;
  double record_stride = 0;
  double decode_stride = 10;
  double horizon = 1e4;
  double steady_sweeps = 500;
  std::vector<double> eps{0.5};
  std::vector<double> phi_list{0.9, 0.95, 0.98, 0.99};
  std::vector<double> gx_list;
  double target = 0.6;
  double dt = 0.0;
  int chunk = 0;
  int bins = 50;
  std::string config;
};

// Binds an option both to the command line and to a key of the JSON config.
struct Binder {
  CLI::App* app;
  std::vector<std::pair<CLI::Option*, std::function<void(const json&)>>> keys;

  template <class T>
  void add(const std::string& flag, const std::string& key, T& target, const std::string& help) {
    CLI::Option* o = app->add_option(flag, target, help)->capture_default_str();
    keys.emplace_back(o, [&target, key](const json& j) {
      if (j.contains(key)) target = j.at(key).get<T>();
    });
  }

  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    json j = json::parse(in);
    for (auto& [opt, set] : keys) {
      if (opt->count() == 0) set(j);
    }
  }
};

Rates rates_of(const Options& o) { return Rates{o.eta, o.gamma_x, o.gamma_z, o.phi_e}; }

int scaled(int explicit_n, int def, double budget) {
  if (explicit_n > 0) return explicit_n;
  return std::max(1, static_cast<int>(std::lround(def * budget)));
}

std::vector<Basis> bases_of(const std::string& b) {
  if (b == "both") return {Basis::zero, Basis::plus};
  return {parse_basis(b)};
}

std::string path_in(const Options& o, const std::string& name) {
  return (std::filesystem::path(o.out) / name).string();
}

json base_config(const std::string& cmd, const Options& o) {
  return {{"command", cmd},     {"model", o.model}, {"L", o.L},
          {"eta", o.eta},       {"gamma_x", o.gamma_x},
          {"gamma_z", o.gamma_z}, {"phi_e", o.phi_e},
          {"seed", o.seed},     {"budget", o.budget}};
}

void finish(const std::string& cmd, const Options& o, json config,
            const std::vector<std::string>& files, const json& results) {
  write_manifest(o.out, cmd, config, files, results);
  std::cout << cmd << ": wrote";
  for (const auto& f : files) std::cout << ' ' << std::filesystem::path(f).filename().string();
  std::cout << " manifest.json (config " << config_hash(config) << ")\n";
  if (!results.empty()) std::cout << results.dump(2) << '\n';
}

RunConfig run_config(const Options& o, Model m, bool flags_only, double t_default,
                     int n_default) {
  RunConfig c;
  c.model = m;
  c.flags_only = flags_only;
  c.L = o.L;
  c.rates = rates_of(o);
  c.t_final = o.t_final > 0 ? o.t_final : t_default;
  c.trajectories = scaled(o.trajectories, n_default, o.budget);
  c.seed = o.seed;
  c.record_stride = o.record_stride;
  c.decode_stride = o.decode_stride;
  c.bases = bases_of(o.basis);
  return c;
}

json run_json(const RunConfig& c) {
  json j = {{"t_final", c.t_final},         {"trajectories", c.trajectories},
            {"record_stride", c.record_stride}, {"decode_stride", c.decode_stride},
            {"flags_only", c.flags_only}};
  json b = json::array();
  for (Basis x : c.bases) b.push_back(to_string(x));
  j["bases"] = b;
  return j;
}

void cmd_series(const std::string& cmd, const Options& o, Model m, bool flags_only, int workers) {
  RunConfig c = run_config(o, m, flags_only, m == Model::d4 ? 20.0 : 100.0, 500);
  json config = base_config(cmd, o);
  config.update(run_json(c));
  config["model"] = to_string(m);
  auto r = run_series(c, workers);
  std::vector<std::string> files;
  if (!flags_only) {
    files.push_back(path_in(o, "series.csv"));
    write_series_csv(files.back(), r.mean);
  }
  files.push_back(path_in(o, "flags.csv"));
  write_flags_csv(files.back(), r.mean);
  const SeriesPoint& last = r.mean.back();
  json res = {{"t", last.t}, {"nX", last.nX}, {"nZ", last.nZ}, {"Fflag", last.Fflag}};
  if (!flags_only) {
    res["F0"] = last.F0;
    res["Fplus"] = last.Fplus;
    res["ndB"] = last.ndB;
    res["ndA"] = last.ndA;
  }
  finish(cmd, o, config, files, res);
}

Model flag_model(const Options& o, bool& flags_only) {
  if (o.model == "flags") {
    flags_only = true;
    return Model::toric;
  }
  return parse_model(o.model);
}

void cmd_sweep(const Options& o, int workers) {
  bool flags_only = false;
  Model m = flag_model(o, flags_only);
  // Phase diagrams of the d4 model use the flag engine for nf.
  if (m == Model::d4) flags_only = true;
  SweepConfig s;
  s.base = run_config(o, m, flags_only, m == Model::d4 ? 20.0 : 100.0, 100);
  s.base.decode_stride = 0;
  s.gx_lo = o.gx_range.at(0);
  s.gx_hi = o.gx_range.at(1);
  s.gz_lo = o.gz_range.at(0);
  s.gz_hi = o.gz_range.at(1);
  s.steps_x = o.grid_steps.at(0);
  s.steps_z = o.grid_steps.size() > 1 ? o.grid_steps[1] : o.grid_steps[0];
  json config = base_config("sweep", o);
  config.update(run_json(s.base));
  config["gx_range"] = o.gx_range;
  config["gz_range"] = o.gz_range;
  config["grid_steps"] = {s.steps_x, s.steps_z};
  auto pts = run_sweep(s, workers);
  std::vector<std::string> files{path_in(o, "scan.csv"), path_in(o, "scan_fidelity.csv")};
  CsvWriter a(files[0], {"gx", "gz", "nf_mean"});
  CsvWriter b(files[1], {"gx", "gz", "nX", "nZ", "nf_se", "F0", "Fplus", "phase"});
  for (const auto& p : pts) {
    a.row({p.gx, p.gz, p.nf_mean});
    b.row({p.gx, p.gz, p.nX, p.nZ, p.nf_se, p.F0, p.Fplus,
           double(static_cast<int>(classify_phase(p.nX, p.nZ)))});
  }
  finish("sweep", o, config, files, {{"points", pts.size()}});
}

void cmd_transition(const Options& o, int workers) {
  TransitionConfig c;
  c.model = o.model == "d4" ? Model::d4 : Model::toric;
  if (!o.L_list.empty()) c.Ls = o.L_list;
  if (!o.gx_list.empty()) c.gxs = o.gx_list;
  c.base = rates_of(o);
  c.threshold = o.threshold;
  c.horizon_sweeps = o.horizon;
  c.trajectories = scaled(o.trajectories, 1000, o.budget);
  c.seed = o.seed;
  c.chunk = o.chunk;
  json config = base_config("transition", o);
  config.update({{"L_list", c.Ls},
                 {"gx_list", c.gxs},
                 {"threshold", c.threshold},
                 {"horizon_sweeps", c.horizon_sweeps},
                 {"trajectories", c.trajectories},
                 {"chunk", c.chunk}});
  auto r = run_transition(c, workers);
  std::vector<std::string> files{path_in(o, "tau.csv"), path_in(o, "curvature.csv")};
  CsvWriter t(files[0], {"gamma_x", "L", "tau_mean", "tau_se", "censored_frac", "tau_median", "n"});
  for (const auto& row : r.rows) {
    t.row({row.gx, double(row.L), row.tau_mean, row.tau_se, row.censored_frac, row.tau_median,
           double(row.n)});
  }
  CsvWriter k(files[1], {"gamma_x", "curvature"});
  for (size_t i = 0; i < r.gxs.size(); ++i) k.row({r.gxs[i], r.curvature[i]});
  finish("transition", o, config, files, {{"gamma_x_star", format_double(r.gx_star)}});
}

void cmd_bistability(const Options& o, int workers) {
  BistabilityConfig c;
  c.model = o.model == "d4" ? Model::d4 : Model::toric;
  c.L = o.L;
  c.rates = rates_of(o);
  c.target = o.target;
  c.record_dt = o.dt > 0 ? o.dt : 1.0;
  c.horizon_sweeps = o.horizon;
  c.trajectories = scaled(o.trajectories, 500, o.budget);
  c.seed = o.seed;
  c.bins = o.bins;
  json config = base_config("bistability", o);
  config.update({{"target", c.target},
                 {"record_dt", c.record_dt},
                 {"horizon_sweeps", c.horizon_sweeps},
                 {"trajectories", c.trajectories},
                 {"bins", c.bins}});
  auto r = run_bistability(c, workers);
  std::vector<std::string> files{path_in(o, "histogram.csv"), path_in(o, "density.csv")};
  CsvWriter h(files[0], {"bin_lo", "bin_hi", "count"});
  for (int i = 0; i < r.snap.hist.bins(); ++i) {
    h.row({r.snap.hist.bin_lo(i), r.snap.hist.bin_hi(i), double(r.snap.hist.counts[i])});
  }
  CsvWriter d(files[1], {"t", "mean", "conditioned_mean"});
  for (size_t i = 0; i < r.times.size(); ++i) d.row({r.times[i], r.mean[i], r.conditioned[i]});
  json res = {{"snapshot_time", r.snap.time},
              {"snapshot_mean", r.snap.mean},
              {"absorbed_fraction", r.modes.absorbed_fraction},
              {"low_fraction", r.modes.low_fraction},
              {"low_peak", r.modes.low_peak},
              {"mode", r.modes.mode}};
  finish("bistability", o, config, files, res);
}

void cmd_recover(const Options& o, int workers) {
  RecoverConfig c;
  c.model = o.model == "toric" ? Model::toric : Model::d4;
  if (!o.L_list.empty()) c.Ls = o.L_list;
  c.steady = rates_of(o);
  c.steady_sweeps = o.steady_sweeps;
  c.horizon_sweeps = o.horizon;
  c.trajectories = scaled(o.trajectories, 1000, o.budget);
  c.seed = o.seed;
  c.eps = o.eps;
  json config = base_config("recover", o);
  config.update({{"L_list", c.Ls},
                 {"steady_sweeps", c.steady_sweeps},
                 {"horizon_sweeps", c.horizon_sweeps},
                 {"trajectories", c.trajectories},
                 {"eps", c.eps}});
  auto r = run_recover(c, workers);
  std::vector<std::string> files{path_in(o, "recover.csv"), path_in(o, "fflag.csv")};
  CsvWriter t(files[0], {"eps", "L", "tau", "censored_frac"});
  for (size_t k = 0; k < c.eps.size(); ++k) {
    for (size_t li = 0; li < r.Ls.size(); ++li) {
      int cens = 0;
      for (double x : r.t_empty[li]) cens += std::isinf(x);
      t.row({c.eps[k], double(r.Ls[li]), r.tau[li][k], double(cens) / r.t_empty[li].size()});
    }
  }
  // F_flag(t): fraction of trajectories already empty, at every distinct time.
  CsvWriter f(files[1], {"L", "t", "Fflag"});
  for (size_t li = 0; li < r.Ls.size(); ++li) {
    auto te = r.t_empty[li];
    std::sort(te.begin(), te.end());
    for (size_t i = 0; i < te.size() && std::isfinite(te[i]); ++i) {
      f.row({double(r.Ls[li]), te[i], double(i + 1) / te.size()});
    }
  }
  json fits = json::array();
  for (size_t k = 0; k < c.eps.size(); ++k) {
    fits.push_back({{"eps", c.eps[k]},
                    {"alpha", format_double(r.fits[k].alpha)},
                    {"L0", format_double(r.fits[k].L0)},
                    {"r2", format_double(r.fits[k].r2)}});
  }
  finish("recover", o, config, files, {{"fits", fits}});
}

void cmd_unheralded(const Options& o, int workers) {
  UnheraldedConfig c;
  c.L = o.L;
  c.base = rates_of(o);
  c.phis = o.phi_list;
  c.t_final = o.t_final > 0 ? o.t_final : 12.0;
  c.dt = o.dt > 0 ? o.dt : 0.25;
  c.trajectories = scaled(o.trajectories, 100, o.budget);
  c.seed = o.seed;
  c.bases = o.basis == "both" ? std::vector<Basis>{Basis::zero} : bases_of(o.basis);
  json config = base_config("unheralded", o);
  json b = json::array();
  for (Basis x : c.bases) b.push_back(to_string(x));
  config.update({{"phi_list", c.phis},
                 {"t_final", c.t_final},
                 {"dt", c.dt},
                 {"trajectories", c.trajectories},
                 {"bases", b}});
  auto r = run_unheralded(c, workers);
  std::vector<std::string> files;
  for (size_t k = 0; k < r.phis.size(); ++k) {
    files.push_back(path_in(o, "series_phi" + format_double(r.phis[k]) + ".csv"));
    write_series_csv(files.back(), r.curves[k]);
  }
  files.push_back(path_in(o, "halflife.csv"));
  CsvWriter h(files.back(), {"phi_e", "tau0", "tau_plus"});
  for (size_t k = 0; k < r.phis.size(); ++k) h.row({r.phis[k], r.tau0[k], r.tau_plus[k]});
  json res = {{"b_zero", format_double(r.fit0.b)},
              {"b_zero_se", format_double(r.fit0.b_se)},
              {"b_plus", format_double(r.fit_plus.b)}};
  finish("unheralded", o, config, files, res);
}

void cmd_meanfield(const Options& o) {
  const int sx = o.grid_steps.at(0);
  const int sz = o.grid_steps.size() > 1 ? o.grid_steps[1] : sx;
  const double t = o.t_final > 0 ? o.t_final : 1e4;
  json config = base_config("meanfield", o);
  config.update({{"gx_range", o.gx_range}, {"gz_range", o.gz_range}, {"grid_steps", {sx, sz}},
                 {"t_final", t}});
  auto pts = mf_scan(o.eta, o.gx_range.at(0), o.gx_range.at(1), o.gz_range.at(0),
                     o.gz_range.at(1), sx, sz, t);
  std::vector<std::string> files{path_in(o, "meanfield.csv")};
  CsvWriter w(files[0], {"gx", "gz", "nX", "nZ", "phase"});
  for (const auto& p : pts) {
    w.row({p.gamma_x, p.gamma_z, p.final.nx, p.final.nz,
           double(static_cast<int>(mf_classify(p.final)))});
  }
  finish("meanfield", o, config, files, {{"points", pts.size()}});
}

void cmd_clusters(const Options& o, int workers) {
  ClustersConfig c;
  c.model = o.model == "toric" ? Model::toric : Model::d4;
  if (!o.L_list.empty()) c.Ls = o.L_list;
  c.rates = rates_of(o);
  c.t_final = o.t_final > 0 ? o.t_final : 20.0;
  c.trajectories = scaled(o.trajectories, 100, o.budget);
  c.seed = o.seed;
  c.x_flags = o.basis != "z";
  json config = base_config("clusters", o);
  config.update({{"L_list", c.Ls},
                 {"t_final", c.t_final},
                 {"trajectories", c.trajectories},
                 {"x_flags", c.x_flags}});
  auto r = run_clusters(c, workers);
  std::vector<std::string> files{path_in(o, "clusters.csv"), path_in(o, "smax.csv")};
  CsvWriter a(files[0], {"L", "size", "count"});
  CsvWriter b(files[1], {"L", "smax_mean", "smax_se"});
  for (size_t li = 0; li < r.Ls.size(); ++li) {
    for (auto [s, n] : r.sizes[li]) a.row({double(r.Ls[li]), double(s), double(n)});
    b.row({double(r.Ls[li]), r.smax[li].mean(), r.smax[li].stderr_mean()});
  }
  finish("clusters", o, config, files,
         {{"alpha", format_double(r.fit.alpha)}, {"r2", format_double(r.fit.r2)}});
}

void cmd_decode_check(const Options& o, int workers) {
  const int n = scaled(o.trajectories, 1000, o.budget);
  json config = base_config("decode-check", o);
  config.update({{"instances", n}, {"max_defects", 10}});
  auto rows = decode_check(n, 10, o.L, o.seed, workers);
  std::vector<std::string> files{path_in(o, "decode_check.csv")};
  CsvWriter w(files[0], {"instance", "defects", "w_mwpm", "w_brute"});
  int bad = 0;
  for (const auto& r : rows) {
    w.row({double(r.instance), double(r.defects), double(r.w_mwpm), double(r.w_brute)});
    bad += r.w_mwpm != r.w_brute;
  }
  finish("decode-check", o, config, files, {{"instances", n}, {"mismatches", bad}});
  if (bad) throw std::runtime_error("matching disagrees with brute force");
}

void cmd_geometry(const Options& o) {
  const Model m = parse_model(o.model == "flags" ? "toric" : o.model);
  Lattice g(o.L, m == Model::d4 ? 3 : 1, false);
  json config = base_config("geometry", o);
  json geo = geometry_json(g);
  std::vector<std::string> files{path_in(o, "geometry.json")};
  std::ofstream(files[0]) << geo.dump() << '\n';
  finish("geometry", o, config, files, {{"geometry_hash", hex64(geometry_hash(g))}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local error correction under heralded noise"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> names{
      "run-toric", "run-d4",      "run-flags",  "sweep",     "recover",      "transition",
      "bistability", "unheralded", "meanfield", "clusters", "decode-check", "geometry"};
  std::vector<Binder> binders;
  binders.reserve(names.size());
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    Binder b{sub, {}};
    b.add("--model", "model", o.model, "toric, d4 or flags");
    b.add("--L", "L", o.L, "linear size");
    b.add("--eta", "eta", o.eta, "noise rate");
    b.add("--gamma-x", "gamma_x", o.gamma_x, "X correction rate");
    b.add("--gamma-z", "gamma_z", o.gamma_z, "Z correction rate");
    b.add("--phi-e", "phi_e", o.phi_e, "heralded fraction");
    b.add("--t-final", "t_final", o.t_final, "physical time (command default when < 0)");
    b.add("--trajectories", "trajectories", o.trajectories, "(command default when < 0)");
    b.add("--seed", "seed", o.seed, "base seed");
    b.add("--basis", "basis", o.basis, "zero, plus or both");
    b.add("--workers", "workers", o.workers, "threads (HTSIM_WORKERS when 0)");
    b.add("--out", "out", o.out, "output directory");
    b.add("--budget", "budget", o.budget, "scales default trajectory counts");
    b.add("--gx-range", "gx_range", o.gx_range, "lo hi");
    b.add("--gz-range", "gz_range", o.gz_range, "lo hi");
    b.add("--grid-steps", "grid_steps", o.grid_steps, "steps (x [z])");
    b.add("--L-list", "L_list", o.L_list, "sizes");
    b.add("--threshold", "threshold", o.threshold, "flag density threshold");
    b.add("--record-stride", "record_stride", o.record_stride, "sweeps between records");
    b.add("--decode-stride", "decode_stride", o.decode_stride, "sweeps between decodes");
    b.add("--horizon", "horizon_sweeps", o.horizon, "censoring horizon in sweeps");
    b.add("--steady-sweeps", "steady_sweeps", o.steady_sweeps, "sweeps before recovery");
    b.add("--eps", "eps", o.eps, "recovery thresholds on 1 - F_flag");
    b.add("--phi-list", "phi_list", o.phi_list, "heralded fractions");
    b.add("--gx-list", "gx_list", o.gx_list, "gamma_x grid");
    b.add("--target", "target", o.target, "ensemble mean for the histogram");
    b.add("--dt", "dt", o.dt, "record interval in physical time");
    b.add("--chunk", "chunk", o.chunk, "early-stop chunk size");
    b.add("--bins", "bins", o.bins, "histogram bins");
    sub->add_option("--config", o.config, "JSON config; command-line flags override it");
    binders.push_back(std::move(b));
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (size_t i = 0; i < names.size(); ++i) {
      if (!binders[i].app->parsed()) continue;
      binders[i].load(o.config);
      std::filesystem::create_directories(o.out);
      const int w = resolve_workers(o.workers);
      const std::string& n = names[i];
      if (n == "run-toric") cmd_series(n, o, Model::toric, false, w);
      if (n == "run-d4") cmd_series(n, o, Model::d4, false, w);
      if (n == "run-flags") {
        cmd_series(n, o, o.model == "d4" ? Model::d4 : Model::toric, true, w);
      }
      if (n == "sweep") cmd_sweep(o, w);
      if (n == "transition") cmd_transition(o, w);
      if (n == "bistability") cmd_bistability(o, w);
      if (n == "recover") cmd_recover(o, w);
      if (n == "unheralded") cmd_unheralded(o, w);
      if (n == "meanfield") cmd_meanfield(o);
      if (n == "clusters") cmd_clusters(o, w);
      if (n == "decode-check") cmd_decode_check(o, w);
      if (n == "geometry") cmd_geometry(o);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
