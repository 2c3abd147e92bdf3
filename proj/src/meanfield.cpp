#include "htsim/meanfield.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htsim {

MFState mf_rhs(const MFState& s, const Rates& r) {
  const double x = s.nx;
  const double z = s.nz;
  const double leaf = 2.0 * r.gamma_x * x * (1 - x) * (1 - x);
  MFState d;
  d.nx = r.eta * (1 - x) - leaf;
  d.nz = r.eta * (1 - z) + leaf * (1 - z) -
         2.0 * r.gamma_z * z * std::pow(1 - z, 5) * std::pow(1 - x, 6);
  return d;
}

namespace {

MFState rk4(const MFState& s, const Rates& r, double h) {
  auto add = [](const MFState& a, const MFState& k, double c) {
    return MFState{a.nx + c * k.nx, a.nz + c * k.nz};
  };
  MFState k1 = mf_rhs(s, r);
  MFState k2 = mf_rhs(add(s, k1, h / 2), r);
  MFState k3 = mf_rhs(add(s, k2, h / 2), r);
  MFState k4 = mf_rhs(add(s, k3, h), r);
  return {s.nx + h / 6 * (k1.nx + 2 * k2.nx + 2 * k3.nx + k4.nx),
          s.nz + h / 6 * (k1.nz + 2 * k2.nz + 2 * k3.nz + k4.nz)};
}

bool in_bounds(const MFState& s) {
  constexpr double tol = 1e-9;
  return s.nx >= -tol && s.nx <= 1 + tol && s.nz >= -tol && s.nz <= 1 + tol;
}

MFState clamp(MFState s) {
  s.nx = std::clamp(s.nx, 0.0, 1.0);
  s.nz = std::clamp(s.nz, 0.0, 1.0);
  return s;
}

// Advance by h, subdividing when a step leaves the unit square.
MFState step(const MFState& s, const Rates& r, double h, int halvings_left) {
  MFState n = rk4(s, r, h);
  if (in_bounds(n)) return clamp(n);
  if (halvings_left == 0) throw std::runtime_error("mean-field step left [0,1]");
  MFState mid = step(s, r, h / 2, halvings_left - 1);
  return step(mid, r, h / 2, halvings_left - 1);
}

}  // namespace

MFState mf_integrate(MFState s0, const Rates& r, double t_final, double dt, int max_halvings,
                     std::vector<MFState>* path, double path_every) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  // RK4 is stable for h * lambda < 2.78 on the real axis
  const double lambda = r.eta + 4.0 * r.gamma_x + 2.0 * r.gamma_z;
  const double h_max = std::min(dt, 2.0 / lambda);
  const auto n = static_cast<long long>(std::ceil(t_final / h_max - 1e-9));
  if (n == 0) return s0;
  const double h = t_final / n;
  const auto every = std::max(1LL, std::llround(path_every / h));
  MFState s = s0;
  if (path) path->push_back(s);
  for (long long i = 1; i <= n; ++i) {
    s = step(s, r, h, max_halvings);
    if (path && i % every == 0) path->push_back(s);
    if (!path && i % 1024 == 0) {
      MFState d = mf_rhs(s, r);
      if (std::abs(d.nx) < 1e-13 && std::abs(d.nz) < 1e-13) break;
    }
  }
  return s;
}

MFPhase mf_classify(const MFState& s, double absorbing_sum) {
  if (s.nx + s.nz >= absorbing_sum) return MFPhase::absorbing;
  if (s.nz >= 0.5 * absorbing_sum && s.nx < 0.5) return MFPhase::x_active;
  return MFPhase::active;
}

std::vector<MFPoint> mf_scan(double eta, double gx_lo, double gx_hi, double gz_lo, double gz_hi,
                             int steps_x, int steps_z, double t_final, double dt) {
  if (steps_x < 1 || steps_z < 1) throw std::invalid_argument("empty mean-field grid");
  auto at = [](double lo, double hi, int i, int n) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  std::vector<MFPoint> out;
  for (int j = 0; j < steps_z; ++j) {
    for (int i = 0; i < steps_x; ++i) {
      Rates r{eta, at(gx_lo, gx_hi, i, steps_x), at(gz_lo, gz_hi, j, steps_z), 1.0};
      out.push_back({r.gamma_x, r.gamma_z, mf_integrate({}, r, t_final, dt)});
    }
  }
  return out;
}

}  // namespace htsim
