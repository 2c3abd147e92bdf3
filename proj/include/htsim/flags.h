#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "htsim/lattice.h"
#include "htsim/rates.h"
#include "htsim/rng.h"

namespace htsim {

class FlagState {
 public:
  FlagState() = default;
  explicit FlagState(int num_edges) : x_(num_edges, 0), z_(num_edges, 0) {}

  int size() const { return static_cast<int>(x_.size()); }
  bool x(int e) const { return x_[e]; }
  bool z(int e) const { return z_[e]; }
  void set_x(int e, bool b) {
    if (x_[e] != b) {
      x_[e] = b;
      nx_ += b ? 1 : -1;
    }
  }
  void set_z(int e, bool b) {
    if (z_[e] != b) {
      z_[e] = b;
      nz_ += b ? 1 : -1;
    }
  }
  int count_x() const { return nx_; }
  int count_z() const { return nz_; }
  double density_x() const { return size() ? double(nx_) / size() : 0.0; }
  double density_z() const { return size() ? double(nz_) / size() : 0.0; }
  bool empty() const { return nx_ == 0 && nz_ == 0; }
  const std::vector<uint8_t>& xs() const { return x_; }
  const std::vector<uint8_t>& zs() const { return z_; }
  bool operator==(const FlagState& o) const { return x_ == o.x_ && z_ == o.z_; }

 private:
  std::vector<uint8_t> x_, z_;
  int nx_ = 0;
  int nz_ = 0;
};

// Move codes. X: 0..2 leaf on star slot, 3 loop. Z: 0..5 leaf on boundary
// side, 6 + mask for a loop where mask marks which of e0,e1,e2 are flagged.
inline constexpr int kNoMove = -1;
inline constexpr int kXLoop = 3;
inline constexpr int kZLoopBase = 6;

int x_move(const Lattice& g, const FlagState& f, int v);
int z_move(const Lattice& g, const FlagState& f, int p, Model m);
// Edge that receives the Pauli when the measured check is a defect.
int x_push_edge(const Lattice& g, int v, int move);
int z_push_edge(const Lattice& g, int p, int move);

template <class S>
void apply_x_flags(const Lattice& g, Model m, S& s, int v, int move) {
  if (move == kXLoop) {
    const XLoop& xl = g.xloop(v);
    s.set_x(xl.e[0], false);
    s.set_x(xl.e[1], false);
    for (int e : xl.outer) s.set_x(e, true);
    if (m == Model::d4) {
      for (int e : g.xi(v)) s.set_z(e, true);
    }
    return;
  }
  int e = g.star(v)[move];
  s.set_x(e, false);
  if (m == Model::d4) {
    for (int k : g.omega(e)) s.set_z(k, true);
  }
}

template <class S>
void apply_z_flags(const Lattice& g, S& s, int p, int move) {
  if (move < kZLoopBase) {
    s.set_z(g.boundary(p)[move], false);
    return;
  }
  const ZLoop& zl = g.zloop(p);
  const int mask = move - kZLoopBase;
  for (int i = 0; i < 3; ++i) {
    if (mask >> i & 1) s.set_z(zl.e[i], false);
  }
  if (mask != 6) s.set_z(zl.d0, true);
  if (mask != 3) s.set_z(zl.d1, true);
}

inline SiteEvent sample_event(Rng& rng, const EventTable& t, int num_edges) {
  SiteEvent ev;
  ev.edge = uniform_index(rng, num_edges);
  uint64_t r = rng();
  ev.side = static_cast<int>(r & 1);
  t.classify(static_cast<double>(r >> 11) * 0x1.0p-53, ev.branch, ev.pauli);
  return ev;
}

// An event that changes the flags (or, with all noise on, any noise event).
// site is the edge, vertex or plaquette acted on.
struct ActiveEvent {
  Branch branch = Branch::heralded;
  int site = -1;
  int pauli = 0;
};

struct StopRule {
  int x_at_least = -1;
  int z_at_least = -1;
  bool when_empty = false;
};

// Classical flag dynamics on its own. Keeps the sets of edges, vertices and
// plaquettes where an event would change the flags, which allows an exact
// skip over the inactive events.
class FlagSim {
 public:
  FlagSim(const Lattice& g, Model m, const Rates& r);

  void set_rates(const Rates& r);
  const Rates& rates() const { return rates_; }
  void reset(const FlagState& f);
  void restart_clock() {
    t_ = 0.0;
    events_ = 0;
  }
  const FlagState& flags() const { return f_; }
  double time() const { return t_; }
  int64_t events() const { return events_; }
  int edges() const { return g_.num_edges(); }

  // One random-sequential site event.
  void event(Rng& rng);
  // Advance by n events, skipping inactive ones in one draw. Returns true
  // when the stop rule fired (the clock then sits on the firing event).
  bool advance(Rng& rng, int64_t n, const StopRule& stop = {});
  // Every edge takes noise events, unheralded ones included, so a quantum
  // state driven alongside sees every Pauli.
  void set_all_noise(bool on);
  // Skips to the next active event before `end` (in events) and returns it
  // without applying; false when the clock reached `end` first.
  bool next_active(Rng& rng, int64_t end, ActiveEvent& ev);
  void apply_active(const ActiveEvent& ev);
  // Probability that the next event changes the flags.
  double active_probability() const;

  bool x(int e) const { return f_.x(e); }
  bool z(int e) const { return f_.z(e); }
  void set_x(int e, bool b);
  void set_z(int e, bool b);

 private:
  struct IndexSet {
    std::vector<int> items;
    std::vector<int> pos;
    void init(int n) {
      items.clear();
      pos.assign(n, -1);
    }
    void put(int i, bool in) {
      if (in && pos[i] < 0) {
        pos[i] = static_cast<int>(items.size());
        items.push_back(i);
      } else if (!in && pos[i] >= 0) {
        int last = items.back();
        items[pos[i]] = last;
        pos[last] = pos[i];
        items.pop_back();
        pos[i] = -1;
      }
    }
    int size() const { return static_cast<int>(items.size()); }
  };

  void apply(const SiteEvent& ev);
  bool stopped(const StopRule& stop) const;

  const Lattice& g_;
  Model model_;
  Rates rates_;
  EventTable table_;
  FlagState f_;
  IndexSet noise_, verts_, plaqs_;
  bool all_noise_ = false;
  double t_ = 0.0;
  int64_t events_ = 0;
};

// Component sizes of flagged edges. X flags connect through shared
// same-color vertices, Z flags through shared same-color plaquettes.
std::map<int, int> cluster_sizes(const Lattice& g, const FlagState& f, bool x_flags,
                                 int color);
int largest_cluster(const Lattice& g, const FlagState& f, bool x_flags, int color);

struct TauSample {
  double tau;
  bool censored;
};

// Time for the X (or Z) flag density to first reach `threshold` from the
// empty configuration; censored after horizon_sweeps sweeps.
TauSample time_to_density(const Lattice& g, Model m, const Rates& r, double threshold,
                          double horizon_sweeps, Rng& rng, bool x_flags = true);

}  // namespace htsim
