#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace htsim {

// Everything lives on an L x L triangular lattice T with sites s = x + L*y.
// t1 = (1,0) points at 30 degrees, t2 = (0,1) at 90 degrees. The site type
// (x - y) mod 3 decides the role of a site for each color c:
//   type == c      plaquette center of color c
//   type == c + 2  sublattice-1 vertex (south-east hexagon corners)
//   type == c + 1  sublattice-2 vertex
// A T-edge joining types a and b is a qubit of the third color.
//
// Index spaces are grouped by color:
//   edge      = c * L^2       + rank of (site, forward direction 0..2)
//   vertex    = c * 2L^2 / 3  + rank of site among type != c
//   plaquette = c * L^2 / 3   + rank of site among type == c
// where ranks follow increasing site index.

struct Coord {
  int x;
  int y;
};

// Unit steps at 30 + 60k degrees.
inline constexpr std::array<Coord, 6> kDir = {
    {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

enum class Kind { vertex, plaquette };
enum class Axis { vertical = 0, horizontal = 1 };

struct XLoop {
  std::array<int, 3> e{-1, -1, -1};  // N, SW, SE star edges
  int p_nw = -1;
  std::array<int, 4> outer{-1, -1, -1, -1};
};

struct ZLoop {
  std::array<int, 3> e{-1, -1, -1};  // west-side boundary, north-most first
  int d0 = -1;                       // outward edge at the e0/e1 corner
  int d1 = -1;                       // outward edge at the e1/e2 corner
};

// Different-color plaquette sharing a T-edge with p. u and v are the
// third-color vertices sitting at the two centers.
struct Contact {
  int q;
  int u;
  int v;
};

// Dressed X-logical along the vertical direct loop of one color.
struct XLogicalLoop {
  std::vector<int> support;             // direct-lattice edges
  std::vector<int> links;               // CZ link edges in path order
  std::vector<char> link_sub1;          // link sits at a sublattice-1 site
  std::vector<std::vector<int>> xi;     // CZ partners of each link
  std::vector<int> link_of_edge;        // edge -> link index or -1
};

class Lattice {
 public:
  Lattice(int L, int colors, bool distances = true);

  int L() const { return L_; }
  int colors() const { return colors_; }
  int num_sites() const { return L_ * L_; }
  int edges_per_color() const { return L_ * L_; }
  int vertices_per_color() const { return 2 * L_ * L_ / 3; }
  int plaquettes_per_color() const { return L_ * L_ / 3; }
  int num_edges() const { return colors_ * edges_per_color(); }
  int num_vertices() const { return colors_ * vertices_per_color(); }
  int num_plaquettes() const { return colors_ * plaquettes_per_color(); }

  int site(int x, int y) const;
  Coord coord(int s) const { return {s % L_, s / L_}; }
  int site_type(int s) const;
  int step(int s, int k) const;
  int direction(int s, int s2) const;  // k with step(s,k)==s2, else -1
  int edge_between(int s, int s2) const;

  int edge_color(int e) const { return e / edges_per_color(); }
  int vertex_color(int v) const { return v / vertices_per_color(); }
  int plaquette_color(int p) const { return p / plaquettes_per_color(); }
  int vertex_sublattice(int v) const { return vsub_[v]; }
  int vertex_site(int v) const { return vsite_[v]; }
  int plaquette_site(int p) const { return psite_[p]; }
  int vertex_at(int c, int s) const { return vat_[c * num_sites() + s]; }
  int plaquette_at(int s) const { return pat_[s]; }

  const std::array<int, 2>& edge_sites(int e) const { return esite_[e]; }
  const std::array<int, 2>& edge_vertices(int e) const { return evert_[e]; }
  const std::array<int, 2>& edge_plaquettes(int e) const { return eplaq_[e]; }
  const std::vector<int>& edge_enclosing(int e) const { return eencl_[e]; }

  const std::array<int, 3>& star(int v) const { return star_[v]; }
  const std::array<int, 6>& boundary(int p) const { return bnd_[p]; }
  const std::vector<int>& interior(int p) const { return inter_[p]; }
  std::vector<std::array<int, 2>> cz_pairs(int p) const;
  // The two CZ partners of interior edge e inside plaquette p.
  std::array<int, 2> cz_partners(int p, int e) const;
  const std::vector<Contact>& contacts(int p) const { return contact_[p]; }

  bool has_xloop(int v) const { return vsub_[v] == 1; }
  const XLoop& xloop(int v) const { return xloop_[v]; }
  const ZLoop& zloop(int p) const { return zloop_[p]; }
  const std::array<int, 6>& xi(int v) const { return xi_[v]; }
  const std::array<int, 4>& omega(int e) const { return omega_[e]; }

  const std::vector<int>& z_logical(int c, Axis a) const {
    return zlog_[2 * c + static_cast<int>(a)];
  }
  const std::vector<int>& x_logical(int c, Axis a) const {
    return xlog_[2 * c + static_cast<int>(a)];
  }
  const XLogicalLoop& x_dressed(int c) const { return xdress_[c]; }

  int excluded_plaquette(int c) const {
    return (c + 1) * plaquettes_per_color() - 1;
  }
  const std::vector<int>& destab_path(int p) const { return destab_[p]; }

  // Same-color neighbors with the connecting edge, in direction order.
  std::vector<std::array<int, 2>> neighbors(Kind kind, int a) const;
  int distance(Kind kind, int a, int b) const;
  std::vector<int> path(Kind kind, int a, int b) const;
  bool has_distance_table() const { return !vdist_.empty(); }

 private:
  int bfs_distance(Kind kind, int a, int b) const;
  std::vector<int> bfs_from(Kind kind, int a) const;
  int local(Kind kind, int a) const;

  void build_elements();
  void build_moves();
  void build_logicals();
  void build_distances();

  int L_;
  int colors_;

  std::vector<int> eid_;  // site*3 + forward direction -> edge
  std::vector<std::array<int, 2>> esite_, evert_, eplaq_;
  std::vector<std::vector<int>> eencl_;
  std::vector<int> vsite_, vsub_, vat_;
  std::vector<int> psite_, pat_;
  std::vector<std::array<int, 3>> star_;
  std::vector<std::array<int, 6>> bnd_;
  std::vector<std::vector<int>> inter_;
  std::vector<std::vector<Contact>> contact_;
  std::vector<XLoop> xloop_;
  std::vector<ZLoop> zloop_;
  std::vector<std::array<int, 6>> xi_;
  std::vector<std::array<int, 4>> omega_;
  std::vector<std::vector<int>> zlog_, xlog_;
  std::vector<XLogicalLoop> xdress_;
  std::vector<std::vector<int>> destab_;
  // per color, row-major over local indices
  std::vector<std::vector<uint16_t>> vdist_, pdist_;
};

}  // namespace htsim
