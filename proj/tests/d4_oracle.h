#pragma once

// Exact state-vector reference for the D4 code on an L=3 torus (27 qubits).
// The state is kept as a sparse map over computational configurations.

#include <bit>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "htsim/tableau.h"

namespace oracle {

using htsim::Basis;
using htsim::DecoratedX;
using htsim::Lattice;
using htsim::Tableau;

class D4State {
 public:
  using Amp = std::unordered_map<uint32_t, double>;

  D4State(const Lattice& g, const htsim::D4Algebra& alg) : g_(g), alg_(alg) {
    if (g.num_edges() > 32) throw std::invalid_argument("oracle needs at most 32 qubits");
    for (int p = 0; p < g.num_plaquettes(); ++p) aops_.push_back(mask_of(alg.a_op(p)));
    for (int c = 0; c < 3; ++c) xops_.push_back(mask_of(alg.x_op(c)));
  }

  void init(Basis b) {
    psi_.clear();
    psi_[0] = 1.0;
    for (int p = 0; p < g_.num_plaquettes(); ++p) project(aops_[p], false);
    if (b == Basis::plus) {
      for (int c = 0; c < 3; ++c) project(xops_[c], false);
    }
  }

  const Amp& psi() const { return psi_; }

  void x(int e) {
    Amp out;
    for (const auto& [k, a] : psi_) out[k ^ (1u << e)] += a;
    psi_ = std::move(out);
  }
  void z(int e) {
    for (auto& [k, a] : psi_) {
      if (k >> e & 1) a = -a;
    }
  }

  double expect_a(int p) const { return overlap(psi_, apply(aops_[p], psi_)); }
  double expect_xt(int c) const { return overlap(psi_, apply(xops_[c], psi_)); }

  double expect_z(const std::vector<int>& edges) const {
    uint32_t m = 0;
    for (int e : edges) m ^= 1u << e;
    double s = 0;
    for (const auto& [k, a] : psi_) s += (std::popcount(k & m) & 1 ? -a : a) * a;
    return s;
  }
  double vertex_value(int v) const {
    const auto& st = g_.star(v);
    return expect_z({st[0], st[1], st[2]});
  }

  // Probability of outcome m for A_p, then collapse onto it.
  double measure_a(int p, int m) {
    double pr = (1.0 + m * expect_a(p)) / 2.0;
    project(aops_[p], m < 0);
    return pr;
  }

  // R|psi> for a tableau row, read as s Z^z (prod A ascending) (prod Xt).
  Amp apply_row(const Tableau& t, const Tableau::Row& r) const {
    Amp v = psi_;
    for (int c = 2; c >= 0; --c) {
      if (r.xmask >> c & 1) v = apply(xops_[c], v);
    }
    for (int p = g_.num_plaquettes() - 1; p >= 0; --p) {
      if (t.a_bit(r, p)) v = apply(aops_[p], v);
    }
    uint32_t zm = 0;
    for (int e = 0; e < g_.num_edges(); ++e) {
      if (t.z_bit(r, e)) zm |= 1u << e;
    }
    for (auto& [k, a] : v) {
      if ((std::popcount(k & zm) & 1) != r.neg) a = -a;
    }
    return v;
  }
  double expect_row(const Tableau& t, const Tableau::Row& r) const {
    return overlap(psi_, apply_row(t, r));
  }

  static double overlap(const Amp& a, const Amp& b) {
    double s = 0;
    for (const auto& [k, x] : a) {
      auto it = b.find(k);
      if (it != b.end()) s += x * it->second;
    }
    return s;
  }

 private:
  struct Op {
    uint32_t x = 0;
    std::vector<std::array<int, 2>> pairs;
  };

  static Op mask_of(const DecoratedX& d) {
    Op o;
    for (int e : d.xs) o.x ^= 1u << e;
    o.pairs = d.pairs;
    return o;
  }

  // X first, then the CZ gates.
  static Amp apply(const Op& o, const Amp& v) {
    Amp out;
    out.reserve(v.size());
    for (const auto& [k, a] : v) {
      uint32_t k2 = k ^ o.x;
      int par = 0;
      for (const auto& pr : o.pairs) par ^= (k2 >> pr[0]) & (k2 >> pr[1]) & 1;
      out[k2] += par ? -a : a;
    }
    return out;
  }

  void project(const Op& o, bool minus) {
    Amp w = apply(o, psi_);
    Amp out = psi_;
    for (const auto& [k, a] : w) out[k] += minus ? -a : a;
    double n = 0;
    for (auto it = out.begin(); it != out.end();) {
      if (std::abs(it->second) < 1e-12) {
        it = out.erase(it);
      } else {
        n += it->second * it->second;
        ++it;
      }
    }
    if (n < 1e-12) throw std::logic_error("projection onto an empty eigenspace");
    n = std::sqrt(n);
    for (auto& [k, a] : out) a /= n;
    psi_ = std::move(out);
  }

  const Lattice& g_;
  const htsim::D4Algebra& alg_;
  std::vector<Op> aops_, xops_;
  Amp psi_;
};

}  // namespace oracle
