#pragma once

#include <cstdint>

#include "htsim/flags.h"
#include "htsim/tableau.h"

namespace htsim {

// D4 trajectory: flag dynamics with the skip engine, every noise Pauli and
// correction move mirrored on the quasi-stabilizer tableau.
class D4Sim {
 public:
  D4Sim(const D4Algebra& alg, const Rates& r, Basis basis);

  void reset(Basis basis);
  // Start from given flags on the current tableau (used by recovery runs).
  void set_flags(const FlagState& f);
  void set_rates(const Rates& r);

  // Advance by n site events.
  void advance(Rng& rng, int64_t n);
  // Carry out one active event.
  void apply(const ActiveEvent& ev, Rng& rng);

  const Lattice& lattice() const { return g_; }
  const Tableau& tableau() const { return tab_; }
  const FlagState& flags() const { return flags_.flags(); }
  double time() const { return flags_.time(); }
  int64_t events() const { return flags_.events(); }
  int64_t measurements() const { return meas_; }

  double density_b() const {
    return double(tab_.count_vertex_defects()) / g_.num_vertices();
  }
  // (1/#p) sum_p (1 - <A_p>)/2 with undetermined plaquettes counted as 0.
  double density_a() const;

 private:
  const Lattice& g_;
  FlagSim flags_;
  Tableau tab_;
  int64_t meas_ = 0;
};

}  // namespace htsim
