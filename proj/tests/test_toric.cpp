#include <doctest.h>

#include <bit>
#include <cmath>
#include <numeric>

#include "htsim/decoder.h"
#include "htsim/toric.h"
#include "toric_oracle.h"

using namespace htsim;


TEST_CASE("fresh frame has no defects and decodes trivially") {
  Lattice g(6, 1);
  ToricSim s(g, Rates{1, 2, 3, 1});
  CHECK(s.count_b() == 0);
  CHECK(s.count_a() == 0);
  auto le = toric_logical_error(s);
  CHECK_FALSE(le.x);
  CHECK_FALSE(le.z);
}

TEST_CASE("ZX noise creates vertex and plaquette defect pairs") {
  Lattice g(6, 1);
  ToricSim s(g, Rates{1, 2, 3, 1});
  const int e = 17;
  s.apply(SiteEvent{e, 0, Branch::heralded, 3});
  CHECK(s.count_b() == 2);
  CHECK(s.count_a() == 2);
  for (int v : g.edge_vertices(e)) CHECK(s.b_defect(v));
  for (int p : g.edge_plaquettes(e)) CHECK(s.a_defect(p));
  CHECK(s.flags().x(e));
  CHECK(s.flags().z(e));
  auto le = toric_logical_error(s);
  CHECK_FALSE(le.x);
  CHECK_FALSE(le.z);
}

TEST_CASE("X leaf clears a single heralded X error") {
  Lattice g(3, 1);
  ToricSim s(g, Rates{1, 2, 3, 1});
  const int e = 4;
  s.apply(SiteEvent{e, 0, Branch::heralded, 1});
  s.apply(SiteEvent{e, 1, Branch::x_correct, 0});
  CHECK(s.count_b() == 0);
  CHECK_FALSE(s.ex(e));
  CHECK_FALSE(s.flags().x(e));
  CHECK(s.flags().z(e));
}

TEST_CASE("flag loop around a plaquette is cleared without Paulis") {
  Lattice g(6, 1);
  for (int p = 0; p < g.num_plaquettes(); ++p) {
    ToricSim s(g, Rates{0, 3, 0, 1});
    for (int e : g.boundary(p)) s.set_x(e, true);
    Rng rng(100 + p);
    int guard = 0;
    while (s.flags().count_x() > 0 && guard++ < 100000) s.event(rng);
    CHECK(s.flags().count_x() == 0);
    CHECK(s.count_b() == 0);
    CHECK(std::accumulate(s.ex().begin(), s.ex().end(), 0) == 0);
  }
}

TEST_CASE("decoder closes a long string the short way") {
  Lattice g(6, 1);
  const auto& loop = g.x_logical(0, Axis::vertical);
  const int len = static_cast<int>(loop.size());
  REQUIRE(len >= 4);
  for (int k : {1, len - 2, len - 1}) {
    ToricSim s(g, Rates{1, 2, 3, 1});
    for (int i = 0; i < k; ++i) s.apply_x(loop[i]);
    REQUIRE(s.count_b() == 2);
    auto le = toric_logical_error(s);
    CHECK(le.x == (k > len / 2));
    CHECK_FALSE(le.z);
  }
}

TEST_CASE("defects stay consistent with the error record and the flags") {
  Lattice g(6, 1);
  Rng rng(5);
  for (Rates r : {Rates{1, 3, 5, 1}, Rates{1, 8, 12, 1}}) {
    ToricSim s(g, r);
    for (int step = 0; step < 20000; ++step) {
      s.event(rng);
      if (step % 97) continue;
      for (int v = 0; v < g.num_vertices(); ++v) {
        bool par = false;
        bool flagged = false;
        for (int e : g.star(v)) {
          par ^= s.ex(e);
          flagged |= s.flags().x(e);
        }
        REQUIRE(par == s.b_defect(v));
        if (par) REQUIRE(flagged);
      }
      for (int p = 0; p < g.num_plaquettes(); ++p) {
        bool par = false;
        for (int e : g.boundary(p)) par ^= s.ez(e);
        REQUIRE(par == s.a_defect(p));
      }
      // each X-flag component carries an even number of vertex defects
      std::vector<int> root(g.num_vertices());
      std::iota(root.begin(), root.end(), 0);
      auto find = [&](int a) {
        while (root[a] != a) a = root[a] = root[root[a]];
        return a;
      };
      for (int e = 0; e < g.num_edges(); ++e) {
        if (s.flags().x(e)) root[find(g.edge_vertices(e)[0])] = find(g.edge_vertices(e)[1]);
      }
      std::vector<int> odd(g.num_vertices(), 0);
      for (int v = 0; v < g.num_vertices(); ++v) odd[find(v)] ^= s.b_defect(v);
      REQUIRE(std::accumulate(odd.begin(), odd.end(), 0) == 0);
    }
  }
}

TEST_CASE("frame replay agrees with the dense state vector on L=3") {
  Lattice g(3, 1);
  REQUIRE(g.num_edges() == 9);
  Rng rng(2024);
  const Rates rates{1, 3, 3, 0.7};
  int bad = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    bad += oracle::toric_replay(g, rates, seq % 2 ? Basis::plus : Basis::zero, 40, rng);
  }
  CHECK(bad == 0);
}

TEST_CASE("greedy and exact decoding agree on isolated pairs") {
  Lattice g(12, 1);
  ToricSim s(g, Rates{1, 2, 3, 1});
  s.apply_x(0);
  s.apply_x(g.num_edges() / 2);
  auto a = toric_logical_error(s, true);
  auto b = toric_logical_error(s, false);
  CHECK(a.x == b.x);
  CHECK_FALSE(a.x);
}
