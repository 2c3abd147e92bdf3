#include "htsim/flags.h"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace htsim {

int x_move(const Lattice& g, const FlagState& f, int v) {
  const auto& st = g.star(v);
  const bool b0 = f.x(st[0]);
  const bool b1 = f.x(st[1]);
  const bool b2 = f.x(st[2]);
  const int n = b0 + b1 + b2;
  if (n == 1) return b0 ? 0 : (b1 ? 1 : 2);
  if (n == 2 && b0 && b1 && g.vertex_sublattice(v) == 1) return kXLoop;
  return kNoMove;
}

int z_move(const Lattice& g, const FlagState& f, int p, Model m) {
  if (m == Model::d4) {
    for (int e : g.interior(p)) {
      if (f.x(e)) return kNoMove;
    }
  }
  const auto& b = g.boundary(p);
  int mask = 0;
  for (int k = 0; k < 6; ++k) mask |= f.z(b[k]) << k;
  if (mask == 0) return kNoMove;
  if ((mask & (mask - 1)) == 0) return std::countr_zero(static_cast<unsigned>(mask));
  if (mask & ~0b1110) return kNoMove;
  return kZLoopBase + (mask >> 1);
}

int x_push_edge(const Lattice& g, int v, int move) {
  return move == kXLoop ? g.xloop(v).e[0] : g.star(v)[move];
}

int z_push_edge(const Lattice& g, int p, int move) {
  if (move < kZLoopBase) return g.boundary(p)[move];
  const int mask = move - kZLoopBase;
  return g.zloop(p).e[std::countr_zero(static_cast<unsigned>(mask))];
}

FlagSim::FlagSim(const Lattice& g, Model m, const Rates& r)
    : g_(g), model_(m), rates_(r), table_(r), f_(g.num_edges()) {
  if (m == Model::d4 && g.colors() != 3) {
    throw std::invalid_argument("d4 flags need a three-color lattice");
  }
  reset(f_);
}

void FlagSim::set_rates(const Rates& r) {
  rates_ = r;
  table_ = EventTable(r);
  reset(FlagState(f_));
}

void FlagSim::reset(const FlagState& f) {
  f_ = f;
  noise_.init(g_.num_edges());
  verts_.init(g_.num_vertices());
  plaqs_.init(g_.num_plaquettes());
  for (int e = 0; e < g_.num_edges(); ++e) noise_.put(e, !(f_.x(e) && f_.z(e)));
  if (table_.x_correct() > 0) {
    for (int v = 0; v < g_.num_vertices(); ++v) {
      verts_.put(v, x_move(g_, f_, v) != kNoMove);
    }
  }
  if (table_.z_correct() > 0) {
    for (int p = 0; p < g_.num_plaquettes(); ++p) {
      plaqs_.put(p, z_move(g_, f_, p, model_) != kNoMove);
    }
  }
}

void FlagSim::set_x(int e, bool b) {
  if (f_.x(e) == b) return;
  f_.set_x(e, b);
  noise_.put(e, !(f_.x(e) && f_.z(e)));
  if (table_.x_correct() > 0) {
    for (int v : g_.edge_vertices(e)) verts_.put(v, x_move(g_, f_, v) != kNoMove);
  }
  if (model_ == Model::d4 && table_.z_correct() > 0) {
    for (int p : g_.edge_enclosing(e)) {
      plaqs_.put(p, z_move(g_, f_, p, model_) != kNoMove);
    }
  }
}

void FlagSim::set_z(int e, bool b) {
  if (f_.z(e) == b) return;
  f_.set_z(e, b);
  noise_.put(e, !(f_.x(e) && f_.z(e)));
  if (table_.z_correct() > 0) {
    for (int p : g_.edge_plaquettes(e)) {
      plaqs_.put(p, z_move(g_, f_, p, model_) != kNoMove);
    }
  }
}

void FlagSim::apply(const SiteEvent& ev) {
  switch (ev.branch) {
    case Branch::heralded:
      set_x(ev.edge, true);
      set_z(ev.edge, true);
      break;
    case Branch::unheralded:
      break;
    case Branch::x_correct: {
      int v = g_.edge_vertices(ev.edge)[ev.side];
      int mv = x_move(g_, f_, v);
      if (mv != kNoMove) apply_x_flags(g_, model_, *this, v, mv);
      break;
    }
    case Branch::z_correct: {
      int p = g_.edge_plaquettes(ev.edge)[ev.side];
      int mv = z_move(g_, f_, p, model_);
      if (mv != kNoMove) apply_z_flags(g_, *this, p, mv);
      break;
    }
  }
}

void FlagSim::event(Rng& rng) {
  apply(sample_event(rng, table_, g_.num_edges()));
  ++events_;
  t_ += rates_.c0() / g_.num_edges();
}

double FlagSim::active_probability() const {
  const double w = table_.heralded() * noise_.size() +
                   1.5 * table_.x_correct() * verts_.size() +
                   3.0 * table_.z_correct() * plaqs_.size();
  return std::min(1.0, w / g_.num_edges());
}

bool FlagSim::stopped(const StopRule& stop) const {
  if (stop.x_at_least >= 0 && f_.count_x() >= stop.x_at_least) return true;
  if (stop.z_at_least >= 0 && f_.count_z() >= stop.z_at_least) return true;
  return stop.when_empty && f_.empty();
}

void FlagSim::set_all_noise(bool on) { all_noise_ = on; }

bool FlagSim::next_active(Rng& rng, int64_t end, ActiveEvent& ev) {
  const double dt = rates_.c0() / g_.num_edges();
  const double wn = all_noise_ ? (table_.heralded() + table_.unheralded()) * g_.num_edges()
                               : table_.heralded() * noise_.size();
  const double wx = 1.5 * table_.x_correct() * verts_.size();
  const double wz = 3.0 * table_.z_correct() * plaqs_.size();
  const double w = wn + wx + wz;
  const double p = w / g_.num_edges();
  int64_t k = std::numeric_limits<int64_t>::max();
  if (p >= 1.0) {
    k = 1;
  } else if (p > 0.0) {
    double skip = std::floor(std::log1p(-uniform01(rng)) / std::log1p(-p));
    if (skip < 9e18) k = 1 + static_cast<int64_t>(skip);
  }
  if (k > end - events_) {
    t_ += static_cast<double>(end - events_) * dt;
    events_ = end;
    return false;
  }
  events_ += k;
  t_ += static_cast<double>(k) * dt;
  const double r = uniform01(rng) * w;
  const bool has_noise = all_noise_ || noise_.size() > 0;
  ev.pauli = 0;
  if ((r < wn && has_noise) || (verts_.size() == 0 && plaqs_.size() == 0)) {
    ev.branch = Branch::heralded;
    if (all_noise_) {
      ev.site = uniform_index(rng, g_.num_edges());
      const double u = uniform01(rng) * (table_.heralded() + table_.unheralded());
      table_.classify(u, ev.branch, ev.pauli);
    } else {
      ev.site = noise_.items[uniform_index(rng, noise_.size())];
    }
  } else if ((r < wn + wx && verts_.size() > 0) || plaqs_.size() == 0) {
    ev.branch = Branch::x_correct;
    ev.site = verts_.items[uniform_index(rng, verts_.size())];
  } else {
    ev.branch = Branch::z_correct;
    ev.site = plaqs_.items[uniform_index(rng, plaqs_.size())];
  }
  return true;
}

void FlagSim::apply_active(const ActiveEvent& ev) {
  switch (ev.branch) {
    case Branch::heralded:
      set_x(ev.site, true);
      set_z(ev.site, true);
      break;
    case Branch::unheralded:
      break;
    case Branch::x_correct:
      apply_x_flags(g_, model_, *this, ev.site, x_move(g_, f_, ev.site));
      break;
    case Branch::z_correct:
      apply_z_flags(g_, *this, ev.site, z_move(g_, f_, ev.site, model_));
      break;
  }
}

bool FlagSim::advance(Rng& rng, int64_t n, const StopRule& stop) {
  const int64_t end = events_ + n;
  if (stopped(stop)) return true;
  ActiveEvent ev;
  while (next_active(rng, end, ev)) {
    apply_active(ev);
    if (stopped(stop)) return true;
  }
  return false;
}

namespace {

struct Dsu {
  std::vector<int> parent, size;
  explicit Dsu(int n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace

std::map<int, int> cluster_sizes(const Lattice& g, const FlagState& f, bool x_flags,
                                 int color) {
  const int per = g.edges_per_color();
  const int base = color * per;
  auto on = [&](int e) { return x_flags ? f.x(e) : f.z(e); };
  Dsu dsu(per);
  auto join = [&](const auto& edges) {
    int first = -1;
    for (int e : edges) {
      if (!on(e)) continue;
      if (first < 0) {
        first = e;
      } else {
        dsu.unite(first - base, e - base);
      }
    }
  };
  if (x_flags) {
    for (int v = color * g.vertices_per_color(); v < (color + 1) * g.vertices_per_color(); ++v) {
      join(g.star(v));
    }
  } else {
    for (int p = color * g.plaquettes_per_color(); p < (color + 1) * g.plaquettes_per_color();
         ++p) {
      join(g.boundary(p));
    }
  }
  std::map<int, int> hist;
  for (int i = 0; i < per; ++i) {
    if (on(base + i) && dsu.find(i) == i) hist[dsu.size[i]]++;
  }
  return hist;
}

int largest_cluster(const Lattice& g, const FlagState& f, bool x_flags, int color) {
  auto h = cluster_sizes(g, f, x_flags, color);
  return h.empty() ? 0 : h.rbegin()->first;
}

TauSample time_to_density(const Lattice& g, Model m, const Rates& r, double threshold,
                          double horizon_sweeps, Rng& rng, bool x_flags) {
  if (!(threshold <= 1.0)) throw std::invalid_argument("threshold must be <= 1");
  if (threshold <= 0.0) return {0.0, false};
  FlagSim sim(g, m, r);
  StopRule stop;
  int need = static_cast<int>(std::ceil(threshold * g.num_edges() - 1e-9));
  (x_flags ? stop.x_at_least : stop.z_at_least) = need;
  auto n = static_cast<int64_t>(std::llround(horizon_sweeps * g.num_edges()));
  bool hit = sim.advance(rng, n, stop);
  return {sim.time(), !hit};
}

}  // namespace htsim
