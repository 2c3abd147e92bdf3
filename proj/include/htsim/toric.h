#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "htsim/flags.h"
#include "htsim/lattice.h"
#include "htsim/rates.h"
#include "htsim/rng.h"

namespace htsim {

// Toric code in the Pauli frame. B_v = prod Z over star(v) flags X errors,
// A_p = prod X over boundary(p) flags Z errors.
class ToricSim {
 public:
  ToricSim(const Lattice& g, const Rates& r);

  void reset();
  const Lattice& lattice() const { return g_; }
  const Rates& rates() const { return rates_; }

  void event(Rng& rng);
  void apply(const SiteEvent& ev);
  void apply_x(int e);
  void apply_z(int e);

  // Flag interface used by the move templates.
  bool x(int e) const { return f_.x(e); }
  bool z(int e) const { return f_.z(e); }
  void set_x(int e, bool b) { f_.set_x(e, b); }
  void set_z(int e, bool b) { f_.set_z(e, b); }

  const FlagState& flags() const { return f_; }
  bool ex(int e) const { return ex_[e]; }
  bool ez(int e) const { return ez_[e]; }
  const std::vector<uint8_t>& ex() const { return ex_; }
  const std::vector<uint8_t>& ez() const { return ez_; }
  bool b_defect(int v) const { return bdef_[v]; }
  bool a_defect(int p) const { return adef_[p]; }
  int count_b() const { return nb_; }
  int count_a() const { return na_; }
  double density_b() const { return double(nb_) / g_.num_vertices(); }
  double density_a() const { return double(na_) / g_.num_plaquettes(); }
  std::vector<int> b_defects() const;
  std::vector<int> a_defects() const;

  // Undecoded error parities against the logicals: Z_V, Z_H (X errors),
  // X_V, X_H (Z errors).
  const std::array<bool, 4>& parities() const { return par_; }

  double time() const { return t_; }
  int64_t events() const { return events_; }
  // Plaquette measurements made by Z-correction moves.
  int64_t measurements() const { return meas_; }

 private:
  const Lattice& g_;
  Rates rates_;
  EventTable table_;
  FlagState f_;
  std::vector<uint8_t> ex_, ez_, bdef_, adef_;
  std::vector<uint8_t> on_zlog_, on_xlog_;  // bit 0 vertical, bit 1 horizontal
  int nb_ = 0;
  int na_ = 0;
  std::array<bool, 4> par_{};
  double t_ = 0.0;
  int64_t events_ = 0;
  int64_t meas_ = 0;
};

struct LogicalError {
  bool x = false;  // decoded X residual flips a Z logical
  bool z = false;  // decoded Z residual flips an X logical
};

// Decodes a copy of the frame by matching and reports the residual logical
// class. The trajectory is untouched.
LogicalError toric_logical_error(const ToricSim& s, bool exact = true);

}  // namespace htsim
