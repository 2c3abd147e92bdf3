#include <doctest.h>

#include <cmath>

#include "htsim/d4sim.h"
#include "htsim/stats.h"

using namespace htsim;

TEST_CASE("fresh d4 state has no defects") {
  Lattice g(6, 3);
  D4Algebra alg(g);
  for (Basis b : {Basis::zero, Basis::plus}) {
    D4Sim sim(alg, Rates{1, 4, 8, 1}, b);
    CHECK(sim.density_b() == 0.0);
    CHECK(sim.density_a() == 0.0);
    Rng rng(1);
    CHECK(decode_d4(sim.tableau(), rng).ok);
  }
}

TEST_CASE("heralded d4 defects sit next to flags") {
  Lattice g(6, 3);
  D4Algebra alg(g);
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    D4Sim sim(alg, Rates{1, 3, 6, 1}, seed % 2 ? Basis::zero : Basis::plus);
    Rng rng(seed);
    for (int step = 0; step < 40; ++step) {
      sim.advance(rng, 15);
      const FlagState& f = sim.flags();
      for (int v = 0; v < g.num_vertices(); ++v) {
        if (!sim.tableau().vertex_negative(v)) continue;
        bool flagged = false;
        for (int e : g.star(v)) flagged = flagged || f.x(e);
        REQUIRE(flagged);
      }
      for (int p = 0; p < g.num_plaquettes(); ++p) {
        if (sim.tableau().expect_plaquette(p) == 1) continue;
        bool flagged = false;
        for (int e : g.boundary(p)) flagged = flagged || f.z(e) || f.x(e);
        for (int e : g.interior(p)) flagged = flagged || f.x(e);
        REQUIRE(flagged);
      }
    }
  }
}

TEST_CASE("d4 flag marginals match the flags-only engine") {
  Lattice g(6, 3);
  D4Algebra alg(g);
  const Rates r{1, 5, 12, 0.8};
  const int64_t n = 3 * g.num_edges();
  RunningStats ax, az, bx, bz;
  for (uint64_t i = 0; i < 300; ++i) {
    Rng ra(trajectory_seed(11, i)), rb(trajectory_seed(12, i));
    D4Sim a(alg, r, Basis::zero);
    a.advance(ra, n);
    FlagSim b(g, Model::d4, r);
    b.advance(rb, n);
    ax.add(a.flags().density_x());
    az.add(a.flags().density_z());
    bx.add(b.flags().density_x());
    bz.add(b.flags().density_z());
  }
  CHECK(two_sample_z(ax, bx) < 4.0);
  CHECK(two_sample_z(az, bz) < 4.0);
}

TEST_CASE("plaquette measurements only come from Z corrections") {
  Lattice g(6, 3);
  D4Algebra alg(g);
  Rng rng(4);
  D4Sim none(alg, Rates{1, 2, 0, 1}, Basis::zero);
  none.advance(rng, 20 * g.num_edges());
  CHECK(none.measurements() == 0);
  D4Sim some(alg, Rates{1, 2, 9, 1}, Basis::zero);
  some.advance(rng, 20 * g.num_edges());
  CHECK(some.measurements() > 0);
}

TEST_CASE("random Z errors leave the plus state with probability 1/8") {
  Lattice g(6, 3);
  D4Algebra alg(g);
  Rng rng(21);
  const int n = 600;
  RunningStats ok;
  for (int i = 0; i < n; ++i) {
    Tableau t(alg, Basis::plus);
    for (int e = 0; e < g.num_edges(); ++e) {
      if (rng() >> 63) t.apply_z(e);
    }
    ok.add(decode_d4(t, rng).ok ? 1.0 : 0.0);
  }
  const double p = 1.0 / 8.0;
  CHECK(std::abs(ok.mean() - p) <= 3 * std::sqrt(p * (1 - p) / n));
}
