#include "htsim/toric.h"

#include <stdexcept>

#include "htsim/decoder.h"

namespace htsim {

ToricSim::ToricSim(const Lattice& g, const Rates& r)
    : g_(g), rates_(r), table_(r) {
  if (g.colors() != 1) throw std::invalid_argument("toric code needs a one-color lattice");
  on_zlog_.assign(g.num_edges(), 0);
  on_xlog_.assign(g.num_edges(), 0);
  for (int a = 0; a < 2; ++a) {
    for (int e : g.z_logical(0, Axis(a))) on_zlog_[e] |= 1 << a;
    for (int e : g.x_logical(0, Axis(a))) on_xlog_[e] |= 1 << a;
  }
  reset();
}

void ToricSim::reset() {
  f_ = FlagState(g_.num_edges());
  ex_.assign(g_.num_edges(), 0);
  ez_.assign(g_.num_edges(), 0);
  bdef_.assign(g_.num_vertices(), 0);
  adef_.assign(g_.num_plaquettes(), 0);
  nb_ = na_ = 0;
  par_ = {};
  t_ = 0.0;
  events_ = 0;
  meas_ = 0;
}

void ToricSim::apply_x(int e) {
  ex_[e] ^= 1;
  for (int v : g_.edge_vertices(e)) {
    bdef_[v] ^= 1;
    nb_ += bdef_[v] ? 1 : -1;
  }
  par_[0] ^= on_zlog_[e] & 1;
  par_[1] ^= (on_zlog_[e] >> 1) & 1;
}

void ToricSim::apply_z(int e) {
  ez_[e] ^= 1;
  for (int p : g_.edge_plaquettes(e)) {
    adef_[p] ^= 1;
    na_ += adef_[p] ? 1 : -1;
  }
  par_[2] ^= on_xlog_[e] & 1;
  par_[3] ^= (on_xlog_[e] >> 1) & 1;
}

void ToricSim::apply(const SiteEvent& ev) {
  switch (ev.branch) {
    case Branch::heralded:
    case Branch::unheralded:
      if (ev.pauli & 1) apply_x(ev.edge);
      if (ev.pauli & 2) apply_z(ev.edge);
      if (ev.branch == Branch::heralded) {
        f_.set_x(ev.edge, true);
        f_.set_z(ev.edge, true);
      }
      break;
    case Branch::x_correct: {
      const int v = g_.edge_vertices(ev.edge)[ev.side];
      const int mv = x_move(g_, f_, v);
      if (mv == kNoMove) break;
      const int target = x_push_edge(g_, v, mv);
      const bool defect = bdef_[v];
      apply_x_flags(g_, Model::toric, *this, v, mv);
      if (defect) apply_x(target);
      break;
    }
    case Branch::z_correct: {
      const int p = g_.edge_plaquettes(ev.edge)[ev.side];
      const int mv = z_move(g_, f_, p, Model::toric);
      if (mv == kNoMove) break;
      const int target = z_push_edge(g_, p, mv);
      const bool defect = adef_[p];
      ++meas_;
      apply_z_flags(g_, *this, p, mv);
      if (defect) apply_z(target);
      break;
    }
  }
}

void ToricSim::event(Rng& rng) {
  apply(sample_event(rng, table_, g_.num_edges()));
  ++events_;
  t_ += rates_.c0() / g_.num_edges();
}

std::vector<int> ToricSim::b_defects() const {
  std::vector<int> out;
  for (int v = 0; v < g_.num_vertices(); ++v) {
    if (bdef_[v]) out.push_back(v);
  }
  return out;
}

std::vector<int> ToricSim::a_defects() const {
  std::vector<int> out;
  for (int p = 0; p < g_.num_plaquettes(); ++p) {
    if (adef_[p]) out.push_back(p);
  }
  return out;
}

LogicalError toric_logical_error(const ToricSim& s, bool exact) {
  const Lattice& g = s.lattice();
  auto dx = correction_chain(g, Kind::vertex, s.b_defects(), exact);
  auto dz = correction_chain(g, Kind::plaquette, s.a_defects(), exact);
  for (int e = 0; e < g.num_edges(); ++e) {
    dx[e] ^= s.ex(e);
    dz[e] ^= s.ez(e);
  }
  LogicalError out;
  out.x = parity_crossings(dx, g.z_logical(0, Axis::vertical)) ||
          parity_crossings(dx, g.z_logical(0, Axis::horizontal));
  out.z = parity_crossings(dz, g.x_logical(0, Axis::vertical)) ||
          parity_crossings(dz, g.x_logical(0, Axis::horizontal));
  return out;
}

}  // namespace htsim
