#include "htsim/d4sim.h"

namespace htsim {

D4Sim::D4Sim(const D4Algebra& alg, const Rates& r, Basis basis)
    : g_(alg.lattice()), flags_(alg.lattice(), Model::d4, r), tab_(alg, basis) {
  flags_.set_all_noise(true);
}

void D4Sim::reset(Basis basis) {
  flags_.reset(FlagState(g_.num_edges()));
  flags_.restart_clock();
  tab_ = Tableau(tab_.algebra(), basis);
  meas_ = 0;
}

void D4Sim::set_flags(const FlagState& f) { flags_.reset(f); }

void D4Sim::set_rates(const Rates& r) { flags_.set_rates(r); }

void D4Sim::apply(const ActiveEvent& ev, Rng& rng) {
  switch (ev.branch) {
    case Branch::heralded:
    case Branch::unheralded:
      tab_.apply_pauli(ev.site, ev.pauli);
      flags_.apply_active(ev);
      break;
    case Branch::x_correct: {
      const int v = ev.site;
      const int target = x_push_edge(g_, v, x_move(g_, flags_.flags(), v));
      const bool defect = tab_.vertex_negative(v);
      flags_.apply_active(ev);
      if (defect) tab_.apply_x(target);
      break;
    }
    case Branch::z_correct: {
      const int p = ev.site;
      const int target = z_push_edge(g_, p, z_move(g_, flags_.flags(), p, Model::d4));
      flags_.apply_active(ev);
      ++meas_;
      if (tab_.measure_plaquette(p, rng) < 0) tab_.apply_z(target);
      break;
    }
  }
}

void D4Sim::advance(Rng& rng, int64_t n) {
  const int64_t end = flags_.events() + n;
  ActiveEvent ev;
  while (flags_.next_active(rng, end, ev)) apply(ev, rng);
}

double D4Sim::density_a() const {
  double s = 0.0;
  for (int p = 0; p < g_.num_plaquettes(); ++p) s += (1.0 - tab_.expect_plaquette(p)) / 2.0;
  return s / g_.num_plaquettes();
}

}  // namespace htsim
