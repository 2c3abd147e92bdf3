#include "htsim/lattice.h"

#include <queue>
#include <stdexcept>
#include <string>

namespace htsim {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

Lattice::Lattice(int L, int colors, bool distances) : L_(L), colors_(colors) {
  if (L < 3 || L % 3 != 0) {
    throw std::invalid_argument("L must be a positive multiple of 3, got " +
                                std::to_string(L));
  }
  if (colors != 1 && colors != 3) {
    throw std::invalid_argument("colors must be 1 or 3");
  }
  if (L > 3 * 21845) throw std::invalid_argument("L too large");
  build_elements();
  build_moves();
  build_logicals();
  if (distances) {
    if (L_ <= 64) build_distances();
    if (colors_ == 3) {
      destab_.resize(num_plaquettes());
      for (int p = 0; p < num_plaquettes(); ++p) {
        int target = excluded_plaquette(plaquette_color(p));
        destab_[p] = path(Kind::plaquette, p, target);
      }
    }
  }
}

int Lattice::site(int x, int y) const { return mod(x, L_) + L_ * mod(y, L_); }

int Lattice::site_type(int s) const {
  return mod(s % L_ - s / L_, 3);
}

int Lattice::step(int s, int k) const {
  const Coord& d = kDir[mod(k, 6)];
  return site(s % L_ + d.x, s / L_ + d.y);
}

int Lattice::direction(int s, int s2) const {
  for (int k = 0; k < 6; ++k) {
    if (step(s, k) == s2) return k;
  }
  return -1;
}

int Lattice::edge_between(int s, int s2) const {
  int k = direction(s, s2);
  if (k < 0) return -1;
  if (k < 3) return eid_[3 * s + k];
  return eid_[3 * s2 + (k - 3)];
}

void Lattice::build_elements() {
  const int n = num_sites();
  vat_.assign(colors_ * n, -1);
  pat_.assign(n, -1);
  for (int c = 0; c < colors_; ++c) {
    for (int s = 0; s < n; ++s) {
      int t = site_type(s);
      if (t == c) {
        pat_[s] = static_cast<int>(psite_.size());
        psite_.push_back(s);
      }
    }
  }
  for (int c = 0; c < colors_; ++c) {
    for (int s = 0; s < n; ++s) {
      int t = site_type(s);
      if (t == c) continue;
      vat_[c * n + s] = static_cast<int>(vsite_.size());
      vsite_.push_back(s);
      vsub_.push_back(t == (c + 2) % 3 ? 1 : 2);
    }
  }

  eid_.assign(3 * n, -1);
  for (int c = 0; c < colors_; ++c) {
    for (int s = 0; s < n; ++s) {
      for (int k = 0; k < 3; ++k) {
        int s2 = step(s, k);
        if (3 - site_type(s) - site_type(s2) != c) continue;
        int e = static_cast<int>(esite_.size());
        eid_[3 * s + k] = e;
        esite_.push_back({s, s2});
        evert_.push_back({vat_[c * n + s], vat_[c * n + s2]});
        eplaq_.push_back({pat_[step(s, k + 1)], pat_[step(s, k - 1)]});
      }
    }
  }

  eencl_.assign(num_edges(), {});
  if (colors_ == 3) {
    for (int e = 0; e < num_edges(); ++e) {
      eencl_[e] = {pat_[esite_[e][0]], pat_[esite_[e][1]]};
    }
  }

  star_.resize(num_vertices());
  for (int v = 0; v < num_vertices(); ++v) {
    int s = vsite_[v];
    int k0 = vsub_[v] == 1 ? 1 : 0;
    for (int i = 0; i < 3; ++i) {
      star_[v][i] = edge_between(s, step(s, k0 + 2 * i));
    }
  }

  bnd_.resize(num_plaquettes());
  inter_.assign(num_plaquettes(), {});
  contact_.assign(num_plaquettes(), {});
  for (int p = 0; p < num_plaquettes(); ++p) {
    int r = psite_[p];
    int c = plaquette_color(p);
    for (int k = 0; k < 6; ++k) {
      bnd_[p][k] = edge_between(step(r, k), step(r, k + 1));
    }
    if (colors_ != 3) continue;
    for (int k = 0; k < 6; ++k) {
      int r2 = step(r, k);
      inter_[p].push_back(edge_between(r, r2));
      int q = pat_[r2];
      int c3 = 3 - c - plaquette_color(q);
      contact_[p].push_back({q, vat_[c3 * n + r], vat_[c3 * n + r2]});
    }
  }
}

std::vector<std::array<int, 2>> Lattice::cz_pairs(int p) const {
  std::vector<std::array<int, 2>> out;
  const auto& in = inter_[p];
  if (in.empty()) return out;
  for (int k = 0; k < 6; ++k) out.push_back({in[k], in[(k + 1) % 6]});
  return out;
}

std::array<int, 2> Lattice::cz_partners(int p, int e) const {
  const auto& in = inter_[p];
  for (int k = 0; k < static_cast<int>(in.size()); ++k) {
    if (in[k] == e) return {in[(k + 5) % 6], in[(k + 1) % 6]};
  }
  throw std::invalid_argument("edge is not interior to plaquette");
}

void Lattice::build_moves() {
  xloop_.assign(num_vertices(), XLoop{});
  for (int v = 0; v < num_vertices(); ++v) {
    if (vsub_[v] != 1) continue;
    int s = vsite_[v];
    XLoop& m = xloop_[v];
    m.e = {edge_between(s, step(s, 1)), edge_between(s, step(s, 3)),
           edge_between(s, step(s, 5))};
    m.p_nw = pat_[step(s, 2)];
    for (int k = 0; k < 4; ++k) m.outer[k] = bnd_[m.p_nw][k];
  }

  zloop_.resize(num_plaquettes());
  for (int p = 0; p < num_plaquettes(); ++p) {
    int r = psite_[p];
    ZLoop& m = zloop_[p];
    m.e = {bnd_[p][1], bnd_[p][2], bnd_[p][3]};
    m.d0 = edge_between(step(r, 2), step(step(r, 2), 2));
    m.d1 = edge_between(step(r, 3), step(step(r, 3), 3));
  }

  if (colors_ != 3) return;
  xi_.assign(num_vertices(), {-1, -1, -1, -1, -1, -1});
  for (int v = 0; v < num_vertices(); ++v) {
    if (vsub_[v] != 1) continue;
    int s = vsite_[v];
    int n1 = step(s, 1);
    int n3 = step(s, 3);
    xi_[v] = {edge_between(s, step(s, 0)),   edge_between(s, step(s, 4)),
              edge_between(n1, step(n1, 3)), edge_between(n1, step(n1, 5)),
              edge_between(n3, step(n3, 1)), edge_between(n3, step(n3, 5))};
  }
  omega_.resize(num_edges());
  for (int e = 0; e < num_edges(); ++e) {
    int a = esite_[e][0];
    int b = esite_[e][1];
    int k = direction(a, b);
    omega_[e] = {edge_between(a, step(a, k - 1)), edge_between(a, step(a, k + 1)),
                 edge_between(b, step(b, k + 2)), edge_between(b, step(b, k + 4))};
  }
}

void Lattice::build_logicals() {
  zlog_.assign(2 * colors_, {});
  xlog_.assign(2 * colors_, {});
  const int reps = L_ / 3;
  for (int c = 0; c < colors_; ++c) {
    // dual loops; each entry is the plaquette step and the two corners of
    // the shared edge, as direction indices from the current center
    struct DualStep {
      Coord d;
      int k1, k2;
    };
    const std::array<DualStep, 2> vsteps = {{{{1, 1}, 0, 1}, {{-1, 2}, 1, 2}}};
    const std::array<DualStep, 2> hsteps = {{{{2, -1}, 5, 0}, {{1, 1}, 0, 1}}};
    for (int a = 0; a < 2; ++a) {
      const auto& steps = a == 0 ? vsteps : hsteps;
      int r = site(c, 0);
      auto& out = zlog_[2 * c + a];
      for (int i = 0; i < reps; ++i) {
        for (const auto& st : steps) {
          out.push_back(edge_between(step(r, st.k1), step(r, st.k2)));
          r = site(r % L_ + st.d.x, r / L_ + st.d.y);
        }
      }
    }
    // direct loops from a sublattice-1 site
    const std::array<int, 4> vdirs = {1, 0, 1, 2};
    const std::array<int, 4> hdirs = {5, 0, 1, 0};
    for (int a = 0; a < 2; ++a) {
      const auto& dirs = a == 0 ? vdirs : hdirs;
      int s = site((c + 2) % 3, 0);
      auto& out = xlog_[2 * c + a];
      for (int i = 0; i < reps; ++i) {
        for (int k : dirs) {
          int s2 = step(s, k);
          out.push_back(edge_between(s, s2));
          s = s2;
        }
      }
    }
  }

  if (colors_ != 3) return;
  xdress_.resize(3);
  for (int c = 0; c < 3; ++c) {
    XLogicalLoop& x = xdress_[c];
    x.support = xlog_[2 * c];
    std::vector<int> sites;
    int s = site((c + 2) % 3, 0);
    const std::array<int, 4> vdirs = {1, 0, 1, 2};
    for (int i = 0; i < L_ / 3; ++i) {
      for (int k : vdirs) {
        sites.push_back(s);
        s = step(s, k);
      }
    }
    const int n = static_cast<int>(sites.size());
    for (int i = 0; i < n; ++i) {
      int si = sites[i];
      int kin = direction(si, sites[(i + n - 1) % n]);
      int kout = direction(si, sites[(i + 1) % n]);
      int beta = mod(kout - kin, 6) == 2 ? kin + 1 : kin - 1;
      x.links.push_back(edge_between(si, step(si, beta)));
      x.link_sub1.push_back(site_type(si) == (c + 2) % 3 ? 1 : 0);
    }
    x.link_of_edge.assign(num_edges(), -1);
    for (int i = 0; i < n; ++i) {
      if (x.link_of_edge[x.links[i]] != -1) {
        throw std::logic_error("repeated link on dressed X loop");
      }
      x.link_of_edge[x.links[i]] = i;
    }
    x.xi.assign(n, {});
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (x.link_sub1[i] && !x.link_sub1[j]) {
          x.xi[i].push_back(x.links[j]);
          x.xi[j].push_back(x.links[i]);
        }
      }
    }
  }
}

int Lattice::local(Kind kind, int a) const {
  return kind == Kind::vertex ? a % vertices_per_color()
                              : a % plaquettes_per_color();
}

std::vector<std::array<int, 2>> Lattice::neighbors(Kind kind, int a) const {
  std::vector<std::array<int, 2>> out;
  if (kind == Kind::vertex) {
    for (int e : star_[a]) {
      int b = evert_[e][0] == a ? evert_[e][1] : evert_[e][0];
      out.push_back({b, e});
    }
  } else {
    for (int e : bnd_[a]) {
      int b = eplaq_[e][0] == a ? eplaq_[e][1] : eplaq_[e][0];
      out.push_back({b, e});
    }
  }
  return out;
}

std::vector<int> Lattice::bfs_from(Kind kind, int a) const {
  const int per = kind == Kind::vertex ? vertices_per_color()
                                       : plaquettes_per_color();
  const int base = a - local(kind, a);
  std::vector<int> dist(per, -1);
  std::queue<int> q;
  dist[a - base] = 0;
  q.push(a);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& nb : neighbors(kind, u)) {
      int w = nb[0] - base;
      if (dist[w] < 0) {
        dist[w] = dist[u - base] + 1;
        q.push(nb[0]);
      }
    }
  }
  return dist;
}

void Lattice::build_distances() {
  vdist_.assign(colors_, {});
  pdist_.assign(colors_, {});
  for (int c = 0; c < colors_; ++c) {
    for (int kind = 0; kind < 2; ++kind) {
      Kind k = kind == 0 ? Kind::vertex : Kind::plaquette;
      int per = kind == 0 ? vertices_per_color() : plaquettes_per_color();
      auto& table = kind == 0 ? vdist_[c] : pdist_[c];
      table.resize(static_cast<size_t>(per) * per);
      for (int i = 0; i < per; ++i) {
        auto d = bfs_from(k, c * per + i);
        for (int j = 0; j < per; ++j) {
          table[static_cast<size_t>(i) * per + j] = static_cast<uint16_t>(d[j]);
        }
      }
    }
  }
}

int Lattice::bfs_distance(Kind kind, int a, int b) const {
  return bfs_from(kind, a)[local(kind, b)];
}

int Lattice::distance(Kind kind, int a, int b) const {
  int ca = kind == Kind::vertex ? vertex_color(a) : plaquette_color(a);
  int cb = kind == Kind::vertex ? vertex_color(b) : plaquette_color(b);
  if (ca != cb) throw std::invalid_argument("distance between different colors");
  if (vdist_.empty()) return bfs_distance(kind, a, b);
  int per = kind == Kind::vertex ? vertices_per_color() : plaquettes_per_color();
  const auto& table = kind == Kind::vertex ? vdist_[ca] : pdist_[ca];
  return table[static_cast<size_t>(local(kind, a)) * per + local(kind, b)];
}

std::vector<int> Lattice::path(Kind kind, int a, int b) const {
  int ca = kind == Kind::vertex ? vertex_color(a) : plaquette_color(a);
  int cb = kind == Kind::vertex ? vertex_color(b) : plaquette_color(b);
  if (ca != cb) throw std::invalid_argument("path between different colors");
  std::vector<int> to_b;
  if (vdist_.empty()) to_b = bfs_from(kind, b);
  auto dist = [&](int u) {
    return vdist_.empty() ? to_b[local(kind, u)] : distance(kind, u, b);
  };
  std::vector<int> out;
  int cur = a;
  while (cur != b) {
    int d = dist(cur);
    for (const auto& nb : neighbors(kind, cur)) {
      if (dist(nb[0]) == d - 1) {
        out.push_back(nb[1]);
        cur = nb[0];
        break;
      }
    }
  }
  return out;
}

}  // namespace htsim
