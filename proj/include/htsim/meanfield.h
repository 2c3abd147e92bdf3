#pragma once

#include <vector>

#include "htsim/rates.h"

namespace htsim {

struct MFState {
  double nx = 0.0;
  double nz = 0.0;
};

// Site approximation of the D4 flag dynamics (leaf moves only).
MFState mf_rhs(const MFState& s, const Rates& r);

// Fixed-step RK4 from s0 to t_final with step min(dt, stability limit). A
// step that leaves [0,1] by more than 1e-9 is retried with half the step, at
// most max_halvings times. Without a path, stops early once stationary.
MFState mf_integrate(MFState s0, const Rates& r, double t_final, double dt = 1e-2,
                     int max_halvings = 20, std::vector<MFState>* path = nullptr,
                     double path_every = 1.0);

enum class MFPhase { active, x_active, absorbing };

MFPhase mf_classify(const MFState& s, double absorbing_sum = 1.9);

struct MFPoint {
  double gamma_x;
  double gamma_z;
  MFState final;
};

// Row-major over gamma_z, then gamma_x; both grids inclusive of endpoints.
std::vector<MFPoint> mf_scan(double eta, double gx_lo, double gx_hi, double gz_lo, double gz_hi,
                             int steps_x, int steps_z, double t_final = 1e4, double dt = 1e-2);

}  // namespace htsim
