#pragma once

// Dense state-vector replay of the toric frame simulator on tiny lattices.
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "htsim/toric.h"

namespace oracle {

using namespace htsim;

// 2^n real amplitudes; qubit e is bit e.
struct Dense {
  int n;
  std::vector<double> a;
  explicit Dense(int n) : n(n), a(size_t(1) << n, 0.0) {}

  static uint32_t mask(const auto& edges) {
    uint32_t m = 0;
    for (int e : edges) m |= 1u << e;
    return m;
  }
  void x(int e) {
    for (uint32_t i = 0; i < a.size(); ++i) {
      uint32_t j = i ^ (1u << e);
      if (i < j) std::swap(a[i], a[j]);
    }
  }
  void z(int e) {
    for (uint32_t i = 0; i < a.size(); ++i) {
      if (i >> e & 1) a[i] = -a[i];
    }
  }
  double z_expect(uint32_t m) const {
    double s = 0;
    for (uint32_t i = 0; i < a.size(); ++i) s += a[i] * a[i] * (std::popcount(i & m) % 2 ? -1 : 1);
    return s;
  }
  double x_expect(uint32_t m) const {
    double s = 0;
    for (uint32_t i = 0; i < a.size(); ++i) s += a[i] * a[i ^ m];
    return s;
  }
  void project_x(uint32_t m) {
    std::vector<double> b(a.size());
    for (uint32_t i = 0; i < a.size(); ++i) b[i] = 0.5 * (a[i] + a[i ^ m]);
    a.swap(b);
  }
  void project_z(uint32_t m) {
    for (uint32_t i = 0; i < a.size(); ++i) {
      if (std::popcount(i & m) % 2) a[i] = 0;
    }
  }
  void normalize() {
    double s = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    for (double& x : a) x /= s;
  }
};

struct Flags {
  FlagState f;
  bool x(int e) const { return f.x(e); }
  bool z(int e) const { return f.z(e); }
  void set_x(int e, bool b) { f.set_x(e, b); }
  void set_z(int e, bool b) { f.set_z(e, b); }
};

// +1 / -1 for a definite expectation, 0 otherwise.
inline int sign_of(double v) {
  if (std::abs(std::abs(v) - 1.0) > 1e-9) return 0;
  return v > 0 ? 1 : -1;
}

// Replays `steps` random site events on the frame simulator and on the
// dense state. Returns the number of disagreements in flags, defects and the
// final logical parities.
inline int toric_replay(const Lattice& g, const Rates& rates, Basis basis, int steps, Rng& rng) {
  const int n = g.num_edges();
  EventTable table(rates);
  Dense psi(n);
  if (basis == Basis::zero) {
    psi.a[0] = 1;
    for (int p = 0; p < g.num_plaquettes(); ++p) psi.project_x(Dense::mask(g.boundary(p)));
  } else {
    std::fill(psi.a.begin(), psi.a.end(), 1.0);
    for (int v = 0; v < g.num_vertices(); ++v) psi.project_z(Dense::mask(g.star(v)));
  }
  psi.normalize();
  ToricSim sim(g, rates);
  Flags of{FlagState(n)};
  int bad = 0;
  for (int step = 0; step < steps; ++step) {
    SiteEvent ev = sample_event(rng, table, n);
    sim.apply(ev);
    switch (ev.branch) {
      case Branch::heralded:
      case Branch::unheralded:
        if (ev.pauli & 1) psi.x(ev.edge);
        if (ev.pauli & 2) psi.z(ev.edge);
        if (ev.branch == Branch::heralded) {
          of.set_x(ev.edge, true);
          of.set_z(ev.edge, true);
        }
        break;
      case Branch::x_correct: {
        int v = g.edge_vertices(ev.edge)[ev.side];
        int mv = x_move(g, of.f, v);
        if (mv == kNoMove) break;
        int m = sign_of(psi.z_expect(Dense::mask(g.star(v))));
        bad += m == 0;
        int target = x_push_edge(g, v, mv);
        apply_x_flags(g, Model::toric, of, v, mv);
        if (m < 0) psi.x(target);
        break;
      }
      case Branch::z_correct: {
        int p = g.edge_plaquettes(ev.edge)[ev.side];
        int mv = z_move(g, of.f, p, Model::toric);
        if (mv == kNoMove) break;
        int m = sign_of(psi.x_expect(Dense::mask(g.boundary(p))));
        bad += m == 0;
        int target = z_push_edge(g, p, mv);
        apply_z_flags(g, of, p, mv);
        if (m < 0) psi.z(target);
        break;
      }
    }
    bad += !(sim.flags() == of.f);
    for (int v = 0; v < g.num_vertices(); ++v) {
      bad += (sign_of(psi.z_expect(Dense::mask(g.star(v)))) < 0) != sim.b_defect(v);
    }
    for (int p = 0; p < g.num_plaquettes(); ++p) {
      bad += (sign_of(psi.x_expect(Dense::mask(g.boundary(p)))) < 0) != sim.a_defect(p);
    }
  }
  const auto& par = sim.parities();
  auto zl = [&](Axis a) { return sign_of(psi.z_expect(Dense::mask(g.z_logical(0, a)))); };
  auto xl = [&](Axis a) { return sign_of(psi.x_expect(Dense::mask(g.x_logical(0, a)))); };
  if (basis == Basis::zero) {
    bad += (zl(Axis::vertical) < 0) != par[0];
    bad += (zl(Axis::horizontal) < 0) != par[1];
  } else {
    bad += (xl(Axis::vertical) < 0) != par[2];
    bad += (xl(Axis::horizontal) < 0) != par[3];
  }
  return bad;
}

}  // namespace oracle
