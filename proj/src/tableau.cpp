#include "htsim/tableau.h"

#include <algorithm>
#include <bit>
#include <queue>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "htsim/decoder.h"

namespace htsim {

namespace {

bool g_checks = false;

template <class F>
void for_bits(const std::vector<uint64_t>& bits, int from, int words, F&& f) {
  for (int w = 0; w < words; ++w) {
    uint64_t x = bits[from + w];
    while (x) {
      f(w * 64 + std::countr_zero(x));
      x &= x - 1;
    }
  }
}

template <class F>
void for_mask(uint8_t m, F&& f) {
  for (int c = 0; c < 3; ++c) {
    if (m >> c & 1) f(c);
  }
}

bool trivial(const RawCommutator& r) { return r.w.empty() && !r.neg; }

}  // namespace

RawCommutator commutator(const DecoratedX& u1, const DecoratedX& u2, int num_edges) {
  std::vector<uint8_t> a(num_edges), b(num_edges), w(num_edges);
  for (int x : u1.xs) a[x] ^= 1;
  for (int x : u2.xs) b[x] ^= 1;
  int n = 0;
  auto side = [&](const DecoratedX& u, const std::vector<uint8_t>& in) {
    for (const auto& pr : u.pairs) {
      if (in[pr[0]]) w[pr[1]] ^= 1;
      if (in[pr[1]]) w[pr[0]] ^= 1;
      if (in[pr[0]] && in[pr[1]]) ++n;
    }
  };
  side(u1, b);
  side(u2, a);
  RawCommutator r;
  r.neg = n & 1;
  for (int e = 0; e < num_edges; ++e) {
    if (w[e]) r.w.push_back(e);
  }
  return r;
}

D4Algebra::D4Algebra(const Lattice& g) : g_(g) {
  if (g.colors() != 3) throw std::invalid_argument("D4 algebra needs a three-color lattice");
  const int ne = g.num_edges();
  const int np = g.num_plaquettes();
  const int nv = g.num_vertices();

  xlog_bits_.assign(ne, 0);
  for (int c = 0; c < 3; ++c) {
    for (int a = 0; a < 2; ++a) {
      for (int e : g.x_logical(c, static_cast<Axis>(a))) xlog_bits_[e] |= 1 << (2 * c + a);
    }
  }

  tree_edge_.assign(nv, -1);
  tree_parent_.assign(nv, -1);
  for (int c = 0; c < 3; ++c) {
    const int root = c * g.vertices_per_color();
    std::vector<char> seen(nv, 0);
    std::queue<int> q;
    q.push(root);
    seen[root] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      tree_order_[c].push_back(u);
      for (int e : g.star(u)) {
        for (int v : g.edge_vertices(e)) {
          if (seen[v]) continue;
          seen[v] = 1;
          tree_edge_[v] = e;
          tree_parent_[v] = u;
          q.push(v);
        }
      }
    }
  }

  for (int c = 0; c < 3; ++c) {
    const XLogicalLoop& x = g.x_dressed(c);
    xop_[c].xs = x.support;
    const int n = static_cast<int>(x.links.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (x.link_sub1[i] && !x.link_sub1[j]) xop_[c].pairs.push_back({x.links[i], x.links[j]});
      }
    }
    onx_[c].assign(ne, 0);
    for (int e : x.support) onx_[c][e] = 1;
  }

  auto checked = [&](const RawCommutator& r, const char* what) {
    std::vector<uint8_t> w(ne, 0);
    for (int e : r.w) w[e] = 1;
    auto s = decompose(w, r.neg);
    if (!s) throw std::logic_error(std::string(what) + " commutator is not closed");
    if (s->hh) throw std::logic_error(std::string(what) + " commutator has a horizontal loop");
    // commuting on the ground state: all checks and Z_V loops at +1
    if (s->neg) throw std::logic_error(std::string(what) + " commutator is -1 on the code");
    return *s;
  };

  // plaquette pairs with overlapping supports
  omega_.resize(np);
  std::vector<DecoratedX> aops(np);
  for (int p = 0; p < np; ++p) aops[p] = a_op(p);
  for (int p = 0; p < np; ++p) {
    std::set<int> cand;
    auto add = [&](int e) {
      for (int q : g.edge_plaquettes(e)) cand.insert(q);
      for (int q : g.edge_enclosing(e)) cand.insert(q);
    };
    for (int e : g.boundary(p)) add(e);
    for (int e : g.interior(p)) add(e);
    cand.erase(p);
    for (int q : cand) {
      auto r = commutator(aops[p], aops[q], ne);
      if (trivial(r)) continue;
      auto s = checked(r, "plaquette");
      if (s.hv) throw std::logic_error("plaquette commutator wraps the torus");
      omega_[p].push_back({q, std::move(s)});
    }
  }

  for (int c = 0; c < 3; ++c) {
    kappa_idx_[c].assign(np, -1);
    std::vector<uint8_t> touch(ne, 0);
    for (int e : xop_[c].xs) touch[e] = 1;
    for (const auto& pr : xop_[c].pairs) touch[pr[0]] = touch[pr[1]] = 1;
    for (int p = 0; p < np; ++p) {
      bool hit = false;
      for (int e : g.boundary(p)) hit = hit || touch[e];
      for (int e : g.interior(p)) hit = hit || touch[e];
      if (!hit) continue;
      // A_p Xt^c = Xt^c A_p C; stored as the commutator of Xt^c past A_p
      auto r = commutator(xop_[c], aops[p], ne);
      if (trivial(r)) continue;
      kappa_idx_[c][p] = static_cast<int>(kappa_store_.size());
      kappa_store_.push_back(checked(r, "plaquette-logical"));
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      xx_[a][b] = checked(commutator(xop_[a], xop_[b], ne), "logical");
    }
  }
}

DecoratedX D4Algebra::a_op(int p) const {
  DecoratedX d;
  d.xs.assign(g_.boundary(p).begin(), g_.boundary(p).end());
  d.pairs = g_.cz_pairs(p);
  return d;
}

std::optional<CommScalar> D4Algebra::decompose(const std::vector<uint8_t>& w, bool neg) const {
  CommScalar s;
  s.neg = neg;
  const int per = g_.edges_per_color();
  for (int c = 0; c < 3; ++c) {
    std::vector<uint8_t> wc(w.begin() + c * per, w.begin() + (c + 1) * per);
    bool any = std::find(wc.begin(), wc.end(), 1) != wc.end();
    if (!any) continue;
    bool hv = false, hh = false;
    for (int e : g_.x_logical(c, Axis::horizontal)) hv ^= wc[e - c * per];
    for (int e : g_.x_logical(c, Axis::vertical)) hh ^= wc[e - c * per];
    if (hv) {
      for (int e : g_.z_logical(c, Axis::vertical)) wc[e - c * per] ^= 1;
    }
    if (hh) {
      for (int e : g_.z_logical(c, Axis::horizontal)) wc[e - c * per] ^= 1;
    }
    s.hv |= hv << c;
    s.hh |= hh << c;
    // solve delta V = wc along the spanning tree, then verify every edge
    const int v0 = c * g_.vertices_per_color();
    std::vector<uint8_t> in(g_.vertices_per_color(), 0);
    for (int v : tree_order_[c]) {
      if (tree_parent_[v] < 0) continue;
      in[v - v0] = in[tree_parent_[v] - v0] ^ wc[tree_edge_[v] - c * per];
    }
    for (int i = 0; i < per; ++i) {
      const auto& ev = g_.edge_vertices(c * per + i);
      if ((in[ev[0] - v0] ^ in[ev[1] - v0]) != wc[i]) return std::nullopt;
    }
    const int count = static_cast<int>(std::count(in.begin(), in.end(), 1));
    const bool flip = 2 * count > g_.vertices_per_color();
    for (int i = 0; i < g_.vertices_per_color(); ++i) {
      if (in[i] != flip) s.verts.push_back(v0 + i);
    }
  }
  return s;
}

void Tableau::set_checks(bool on) { g_checks = on; }

Tableau::Row Tableau::empty_row() const {
  Row r;
  r.bits.assign(zw_ + aw_, 0);
  return r;
}

Tableau::Row Tableau::plaquette_row(int p) const {
  Row r = empty_row();
  flip_a(r, p);
  return r;
}

Tableau::Tableau(const D4Algebra& alg, Basis basis)
    : alg_(&alg), g_(&alg.lattice()), basis_(basis) {
  const Lattice& g = *g_;
  zw_ = (g.num_edges() + 63) / 64;
  aw_ = (g.num_plaquettes() + 63) / 64;
  vneg_.assign(g.num_vertices(), 0);
  std::vector<int> gp;
  for (int p = 0; p < g.num_plaquettes(); ++p) {
    if (p != g.excluded_plaquette(g.plaquette_color(p))) gp.push_back(p);
  }
  ng_ = static_cast<int>(gp.size());
  for (int p : gp) rows_.push_back(plaquette_row(p));
  for (int c = 0; c < 3; ++c) {
    Row r = empty_row();
    for (int p = c * g.plaquettes_per_color(); p < (c + 1) * g.plaquettes_per_color(); ++p) {
      flip_a(r, p);
    }
    rows_.push_back(std::move(r));
  }
  for (int p : gp) {
    Row r = empty_row();
    for (int e : g.destab_path(p)) flip_z(r, e);
    rows_.push_back(std::move(r));
  }
  for (int c = 0; c < 3; ++c) {
    Row zv = empty_row();
    for (int e : g.z_logical(c, Axis::vertical)) flip_z(zv, e);
    rows_.push_back(std::move(zv));
    slots_.push_back({LogKind::z_vertical, c});
    if (basis == Basis::zero) {
      Row zh = empty_row();
      for (int e : g.z_logical(c, Axis::horizontal)) flip_z(zh, e);
      rows_.push_back(std::move(zh));
      slots_.push_back({LogKind::z_horizontal, c});
    } else {
      Row x = empty_row();
      x.xmask = static_cast<uint8_t>(1 << c);
      rows_.push_back(std::move(x));
      slots_.push_back({LogKind::x_dressed, c});
    }
  }
}

bool Tableau::zlog_negative(int c, Axis a) const {
  const LogKind want = a == Axis::vertical ? LogKind::z_vertical : LogKind::z_horizontal;
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].kind == want && slots_[i].color == c) return rows_[first_log() + i].neg;
  }
  throw std::logic_error("logical Z loop is not determined in this basis");
}

bool Tableau::eval(const CommScalar& s) const {
  bool b = s.neg;
  for (int v : s.verts) b ^= vneg_[v];
  for (int c = 0; c < 3; ++c) {
    if (s.hv >> c & 1) b ^= zlog_negative(c, Axis::vertical);
    if (s.hh >> c & 1) b ^= zlog_negative(c, Axis::horizontal);
  }
  return b;
}

bool Tableau::has_a(const Row& r) const {
  for (int w = 0; w < aw_; ++w) {
    if (r.bits[zw_ + w]) return true;
  }
  return false;
}

void Tableau::multiply(Row& r1, const Row& r2) const {
  const Lattice& g = *g_;
  const D4Algebra& alg = *alg_;
  bool s = r1.neg ^ r2.neg;
  // Z of r2 moves left past the X parts of r1
  const bool a1 = has_a(r1);
  if (a1 || r1.xmask) {
    for_bits(r2.bits, 0, zw_, [&](int e) {
      for (int q : g.edge_plaquettes(e)) s ^= a_bit(r1, q);
      for_mask(r1.xmask, [&](int c) { s ^= alg.on_x(c, e); });
    });
  }
  // A of r2 moves left past the logicals of r1, then merges into A of r1
  for_bits(r2.bits, zw_, aw_, [&](int q) {
    for_mask(r1.xmask, [&](int c) {
      if (const CommScalar* k = alg.kappa(q, c)) s ^= eval(*k);
    });
    if (a1) {
      for (const auto& pc : alg.omega(q)) {
        if (pc.q > q && a_bit(r1, pc.q)) s ^= eval(pc.s);
      }
    }
  });
  for_mask(r2.xmask, [&](int b) {
    for_mask(r1.xmask, [&](int a) {
      if (a > b) s ^= eval(alg.xx(a, b));
    });
  });
  for (size_t w = 0; w < r1.bits.size(); ++w) r1.bits[w] ^= r2.bits[w];
  r1.xmask ^= r2.xmask;
  r1.neg = s;
}

bool Tableau::anticommutes(int p, const Row& r) const {
  bool b = false;
  for (int e : g_->boundary(p)) b ^= z_bit(r, e);
  for (const auto& pc : alg_->omega(p)) {
    if (a_bit(r, pc.q)) b ^= eval(pc.s);
  }
  for_mask(r.xmask, [&](int c) {
    if (const CommScalar* k = alg_->kappa(p, c)) b ^= eval(*k);
  });
  return b;
}

void Tableau::apply_z(int k) {
  const Lattice& g = *g_;
  const auto& ep = g.edge_plaquettes(k);
  for (Row& r : rows_) {
    bool par = a_bit(r, ep[0]) ^ a_bit(r, ep[1]);
    for_mask(r.xmask, [&](int c) { par ^= alg_->on_x(c, k); });
    r.neg ^= par;
  }
}

void Tableau::apply_x(int j) {
  const Lattice& g = *g_;
  const D4Algebra& alg = *alg_;
  for (int v : g.edge_vertices(j)) {
    vneg_[v] ^= 1;
    vdefects_ += vneg_[v] ? 1 : -1;
  }
  ++version_;
  const auto& encl = g.edge_enclosing(j);
  std::array<std::array<int, 2>, 2> partners{};
  for (size_t i = 0; i < encl.size(); ++i) partners[i] = g.cz_partners(encl[i], j);
  std::array<int, 3> li{-1, -1, -1};
  for (int c = 0; c < 3; ++c) li[c] = g.x_dressed(c).link_of_edge[j];

  for (Row& r : rows_) {
    if (z_bit(r, j)) r.neg ^= 1;
    for (size_t i = 0; i < encl.size(); ++i) {
      const int q = encl[i];
      if (!a_bit(r, q)) continue;
      for (int k : partners[i]) {
        for (int q2 : g.edge_plaquettes(k)) {
          if (q2 < q && a_bit(r, q2)) r.neg ^= 1;
        }
        flip_z(r, k);
      }
    }
    for_mask(r.xmask, [&](int c) {
      if (li[c] < 0) return;
      for (int k : g.x_dressed(c).xi[li[c]]) {
        for (int q2 : g.edge_plaquettes(k)) r.neg ^= a_bit(r, q2);
        for (int c2 = 0; c2 < c; ++c2) {
          if (r.xmask >> c2 & 1) r.neg ^= alg.on_x(c2, k);
        }
        flip_z(r, k);
      }
    });
  }
}

void Tableau::apply_pauli(int e, int pauli) {
  if (pauli & 1) apply_x(e);
  if (pauli & 2) apply_z(e);
}

void Tableau::ensure_pairing() const {
  if (pair_version_ == version_) return;
  const Lattice& g = *g_;
  ppar_.assign(g.num_edges(), 0);
  std::vector<uint8_t> up(g.num_vertices(), 0);
  for (int c = 0; c < 3; ++c) {
    const auto& order = alg_->tree_order(c);
    for (int v : order) up[v] = vneg_[v];
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int v = *it;
      const int pv = alg_->tree_parent(v);
      if (pv < 0) continue;
      if (up[v]) {
        ppar_[alg_->tree_parent_edge(v)] = 1;
        up[pv] ^= 1;
      }
    }
  }
  for (int c = 0; c < 3; ++c) {
    for (int a = 0; a < 2; ++a) {
      bool b = false;
      for (int e : g.z_logical(c, static_cast<Axis>(a))) b ^= ppar_[e];
      zlog_ppar_[2 * c + a] = b;
    }
  }
  pair_version_ = version_;
}

bool Tableau::z_value_negative(const Row& r) const {
  ensure_pairing();
  bool b = r.neg;
  uint8_t h = 0;
  for_bits(r.bits, 0, zw_, [&](int e) {
    b ^= ppar_[e];
    h ^= alg_->xlog_bits(e);
  });
  for (int c = 0; c < 3; ++c) {
    // crossing X_H picks up Z_V, crossing X_V picks up Z_H
    if (h >> (2 * c + 1) & 1) b ^= zlog_ppar_[2 * c] ^ zlog_negative(c, Axis::vertical);
    if (h >> (2 * c) & 1) b ^= zlog_ppar_[2 * c + 1] ^ zlog_negative(c, Axis::horizontal);
  }
  if (g_checks) {
    std::vector<uint8_t> w(g_->num_edges(), 0);
    for_bits(r.bits, 0, zw_, [&](int e) { w[e] = 1; });
    auto s = alg_->decompose(w, r.neg);
    if (!s) throw std::logic_error("residual Z string is not closed");
    if (eval(*s) != b) throw std::logic_error("pairing value disagrees with decomposition");
  }
  return b;
}

bool Tableau::resolve(int p) const {
  Row r = plaquette_row(p);
  for (int i = 0; i < ng_; ++i) {
    if (anticommutes(p, rows_[first_d() + i])) multiply(r, rows_[i]);
  }
  if (has_a(r)) {
    // eliminate the rest against CP rows and collapsed logical rows
    std::vector<Row> basis;
    std::vector<int> lead;
    auto lowest = [&](const Row& x) {
      for (int w = 0; w < aw_; ++w) {
        if (x.bits[zw_ + w]) return w * 64 + std::countr_zero(x.bits[zw_ + w]);
      }
      return -1;
    };
    auto reduce = [&](Row& x) {
      for (size_t k = 0; k < basis.size(); ++k) {
        if (a_bit(x, lead[k])) multiply(x, basis[k]);
      }
    };
    for (int i = first_cp(); i < num_rows(); ++i) {
      if (i == first_d()) i = first_log();
      if (i >= num_rows()) break;
      if (rows_[i].xmask || !has_a(rows_[i])) continue;
      Row x = rows_[i];
      reduce(x);
      const int l = lowest(x);
      if (l < 0) continue;
      for (size_t k = 0; k < basis.size(); ++k) {
        if (a_bit(basis[k], l)) multiply(basis[k], x);
      }
      basis.push_back(std::move(x));
      lead.push_back(l);
    }
    reduce(r);
    if (has_a(r)) throw std::logic_error("plaquette check is not in the row span");
  }
  if (r.xmask) throw std::logic_error("plaquette check resolves to a logical");
  return z_value_negative(r);
}

int Tableau::expect_plaquette(int p) const {
  for (int i = 0; i < ng_ + 3; ++i) {
    if (anticommutes(p, rows_[i])) return 0;
  }
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (anticommutes(p, rows_[first_log() + i])) return 0;
  }
  return resolve(p) ? -1 : 1;
}

int Tableau::measure_plaquette(int p, Rng& rng) {
  std::vector<int> anti;
  for (int i = 0; i < num_rows(); ++i) {
    if (anticommutes(p, rows_[i])) anti.push_back(i);
  }
  int pivot = -1;
  for (int i : anti) {
    if (i < first_d() || i >= first_log()) {
      pivot = i;
      break;
    }
  }
  if (pivot < 0) return resolve(p) ? -1 : 1;
  const bool neg = rng() >> 63;
  if (pivot >= ng_) {
    for (int i : anti) {
      if (i >= first_log() && slots_[i - first_log()].kind == LogKind::x_dressed) {
        collapsed_[slots_[i - first_log()].color] = true;
      }
    }
  }
  const Row pr = rows_[pivot];
  for (int i : anti) {
    if (i != pivot) multiply(rows_[i], pr);
  }
  if (pivot < ng_) rows_[first_d() + pivot] = pr;
  Row m = plaquette_row(p);
  m.neg = neg;
  rows_[pivot] = std::move(m);
  return neg ? -1 : 1;
}

std::string Tableau::snapshot_json() const {
  nlohmann::json j;
  j["basis"] = to_string(basis_);
  std::vector<int> vn;
  for (int v = 0; v < g_->num_vertices(); ++v) {
    if (vneg_[v]) vn.push_back(v);
  }
  j["vertex_defects"] = vn;
  j["collapsed"] = collapsed_;
  j["num_g"] = ng_;
  auto rows = nlohmann::json::array();
  for (const Row& r : rows_) {
    std::vector<int> z, a;
    for_bits(r.bits, 0, zw_, [&](int e) { z.push_back(e); });
    for_bits(r.bits, zw_, aw_, [&](int q) { a.push_back(q); });
    rows.push_back({{"neg", r.neg}, {"z", z}, {"a", a}, {"xmask", r.xmask}});
  }
  j["rows"] = std::move(rows);
  return j.dump();
}

std::optional<bool> x_logical_negative(const Tableau& t, int c) {
  int slot = -1;
  for (size_t i = 0; i < t.log_slots().size(); ++i) {
    if (t.log_slots()[i].kind == Tableau::LogKind::x_dressed && t.log_slots()[i].color == c) {
      slot = static_cast<int>(i);
    }
  }
  if (slot < 0 || t.collapsed(c)) return std::nullopt;
  Tableau::Row r = t.row(t.first_log() + slot);
  if (r.xmask != (1 << c)) return std::nullopt;
  const Lattice& g = t.algebra().lattice();
  for (int q = 0; q < g.num_plaquettes(); ++q) {
    if (t.a_bit(r, q)) t.multiply(r, t.plaquette_row(q));
  }
  // r = s Z^z Xt^c, so <Xt^c> = s <Z^z>
  std::vector<uint8_t> w(g.num_edges(), 0);
  for (int e = 0; e < g.num_edges(); ++e) w[e] = t.z_bit(r, e);
  auto s = t.algebra().decompose(w, r.neg);
  if (!s || s->hh) return std::nullopt;
  bool b = s->neg;
  for (int v : s->verts) b ^= t.vertex_negative(v);
  for (int k = 0; k < 3; ++k) {
    if (s->hv >> k & 1) b ^= t.zlog_negative(k, Axis::vertical);
  }
  return b;
}

D4Outcome decode_d4(const Tableau& t, Rng& rng, bool exact) {
  Tableau s = t;
  const Lattice& g = s.algebra().lattice();
  D4Outcome out;
  std::vector<int> dv;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (s.vertex_negative(v)) dv.push_back(v);
  }
  auto xc = correction_chain(g, Kind::vertex, dv, exact);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (xc[e]) s.apply_x(e);
  }
  std::vector<int> da;
  std::array<int, 3> per{0, 0, 0};
  for (int p = 0; p < g.num_plaquettes(); ++p) {
    if (s.measure_plaquette(p, rng) < 0) {
      da.push_back(p);
      per[g.plaquette_color(p)]++;
    }
  }
  out.a_defects = static_cast<int>(da.size());
  if ((per[0] | per[1] | per[2]) & 1) return out;
  auto zc = correction_chain(g, Kind::plaquette, da, exact);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (zc[e]) s.apply_z(e);
  }
  bool ok = true;
  for (int c = 0; c < 3; ++c) {
    ok = ok && !s.zlog_negative(c, Axis::vertical);
    if (s.basis() == Basis::zero) {
      ok = ok && !s.zlog_negative(c, Axis::horizontal);
    } else {
      auto x = x_logical_negative(s, c);
      ok = ok && x && !*x;
    }
  }
  out.ok = ok;
  return out;
}

}  // namespace htsim
