#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "htsim/lattice.h"
#include "htsim/rates.h"
#include "htsim/rng.h"

namespace htsim {

// X^xs followed by a product of CZ gates on disjoint qubits.
struct DecoratedX {
  std::vector<int> xs;
  std::vector<std::array<int, 2>> pairs;
};

// U1 U2 = U2 U1 Z^w (-1)^neg.
struct RawCommutator {
  std::vector<int> w;
  bool neg = false;
};
RawCommutator commutator(const DecoratedX& u1, const DecoratedX& u2, int num_edges);

// A Z-string written as (-1)^neg * prod_{v in verts} B_v * Z_V^hv * Z_H^hh,
// with hv, hh one bit per color.
struct CommScalar {
  std::vector<int> verts;
  bool neg = false;
  uint8_t hv = 0;
  uint8_t hh = 0;
};

// Commutation tables between plaquette operators A_p and the dressed
// X-logicals, shared by all tableaux on one three-color lattice.
class D4Algebra {
 public:
  explicit D4Algebra(const Lattice& g);

  const Lattice& lattice() const { return g_; }
  DecoratedX a_op(int p) const;
  const DecoratedX& x_op(int c) const { return xop_[c]; }
  bool on_x(int c, int e) const { return onx_[c][e]; }

  struct PairComm {
    int q;
    CommScalar s;
  };
  const std::vector<PairComm>& omega(int p) const { return omega_[p]; }
  // nullptr when A_p commutes with the dressed X-logical of color c.
  const CommScalar* kappa(int p, int c) const {
    int i = kappa_idx_[c][p];
    return i < 0 ? nullptr : &kappa_store_[i];
  }
  const CommScalar& xx(int a, int b) const { return xx_[a][b]; }
  // Bit 2c + axis set when e lies on x_logical(c, axis).
  uint8_t xlog_bits(int e) const { return xlog_bits_[e]; }
  // Spanning tree of the color-c vertex graph, root first.
  const std::vector<int>& tree_order(int c) const { return tree_order_[c]; }
  int tree_parent_edge(int v) const { return tree_edge_[v]; }
  int tree_parent(int v) const { return tree_parent_[v]; }

  // Splits a Z-string into vertex checks and logical loops; nullopt when the
  // string is not closed.
  std::optional<CommScalar> decompose(const std::vector<uint8_t>& w, bool neg) const;

 private:
  const Lattice& g_;
  std::array<DecoratedX, 3> xop_;
  std::array<std::vector<uint8_t>, 3> onx_;
  std::vector<std::vector<PairComm>> omega_;
  std::array<std::vector<int>, 3> kappa_idx_;
  std::vector<CommScalar> kappa_store_;
  std::array<std::array<CommScalar, 3>, 3> xx_;
  std::vector<uint8_t> xlog_bits_;
  std::array<std::vector<int>, 3> tree_order_;
  std::vector<int> tree_edge_, tree_parent_;
};

// Quasi-stabilizer state of the D4 code: vertex-check signs plus rows
// s * Z^z * prod A_p (ascending) * prod Xt^c (color order).
class Tableau {
 public:
  struct Row {
    std::vector<uint64_t> bits;  // z words then A words
    bool neg = false;
    uint8_t xmask = 0;
  };
  enum class LogKind : uint8_t { z_vertical, z_horizontal, x_dressed };
  struct LogSlot {
    LogKind kind;
    int color;
  };

  Tableau(const D4Algebra& alg, Basis basis);

  const D4Algebra& algebra() const { return *alg_; }
  Basis basis() const { return basis_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const Row& row(int i) const { return rows_[i]; }
  int num_g() const { return ng_; }
  int first_cp() const { return ng_; }
  int first_d() const { return ng_ + 3; }
  int first_log() const { return 2 * ng_ + 3; }
  const std::vector<LogSlot>& log_slots() const { return slots_; }

  bool vertex_negative(int v) const { return vneg_[v]; }
  int count_vertex_defects() const { return vdefects_; }
  bool collapsed(int c) const { return collapsed_[c]; }
  bool any_collapsed() const { return collapsed_[0] || collapsed_[1] || collapsed_[2]; }

  void apply_x(int e);
  void apply_z(int e);
  // Pauli code bit0 = X, bit1 = Z.
  void apply_pauli(int e, int pauli);

  // Projective measurement of A_p; returns +1 or -1.
  int measure_plaquette(int p, Rng& rng);
  // <A_p> without touching the state: 0, +1 or -1.
  int expect_plaquette(int p) const;
  bool anticommutes(int p, const Row& r) const;

  // r1 <- r1 * r2
  void multiply(Row& r1, const Row& r2) const;
  Row plaquette_row(int p) const;
  bool z_bit(const Row& r, int e) const { return r.bits[e >> 6] >> (e & 63) & 1; }
  bool a_bit(const Row& r, int p) const {
    return r.bits[zw_ + (p >> 6)] >> (p & 63) & 1;
  }
  bool has_a(const Row& r) const;
  // Value of <Z^z> for a string in the stabilizer group, as a sign bit.
  bool z_value_negative(const Row& r) const;
  // Value of a logical Z loop tracked by a row.
  bool zlog_negative(int c, Axis a) const;

  // Dense JSON-ready summary: vertex signs and row contents.
  std::string snapshot_json() const;

  // Cross-check pairing values against explicit decompositions.
  static void set_checks(bool on);

 private:
  bool eval(const CommScalar& s) const;
  void flip_z(Row& r, int e) const { r.bits[e >> 6] ^= uint64_t{1} << (e & 63); }
  void flip_a(Row& r, int p) const { r.bits[zw_ + (p >> 6)] ^= uint64_t{1} << (p & 63); }
  Row empty_row() const;
  bool resolve(int p) const;  // case with no anticommuting row
  void ensure_pairing() const;

  const D4Algebra* alg_;
  const Lattice* g_;
  Basis basis_;
  int zw_ = 0;
  int aw_ = 0;
  int ng_ = 0;
  std::vector<Row> rows_;
  std::vector<LogSlot> slots_;
  std::vector<uint8_t> vneg_;
  int vdefects_ = 0;
  std::array<bool, 3> collapsed_{false, false, false};

  mutable uint64_t version_ = 1;
  mutable uint64_t pair_version_ = 0;
  mutable std::vector<uint8_t> ppar_;
  mutable std::array<bool, 6> zlog_ppar_{};
};

struct D4Outcome {
  // zero basis: every Z-logical +1; plus basis: Z_V and dressed X-logicals +1
  bool ok = false;
  int a_defects = 0;  // A_p = -1 outcomes before the Z correction
};

// Decodes a copy of the state: vertex defects by matching per color, then all
// plaquette checks, then plaquette defects on the dual lattice.
D4Outcome decode_d4(const Tableau& t, Rng& rng, bool exact = true);
// Logical value of the dressed X-logical once every A_p is +1; nullopt when
// the residual string is not in the stabilizer group.
std::optional<bool> x_logical_negative(const Tableau& t, int c);

}  // namespace htsim
