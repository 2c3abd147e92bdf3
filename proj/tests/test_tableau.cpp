#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "d4_oracle.h"
#include "htsim/decoder.h"
#include "htsim/tableau.h"

using namespace htsim;

namespace {

struct Fixture {
  Lattice g{3, 3};
  D4Algebra alg{g};
};

Fixture& fix() {
  static Fixture f;
  return f;
}

// Every non-destabilizer row must stabilize the reference state.
void check_rows(const Tableau& t, const oracle::D4State& o) {
  for (int i = 0; i < t.num_rows(); ++i) {
    if (i >= t.first_d() && i < t.first_log()) continue;
    INFO("row " << i);
    CHECK(o.expect_row(t, t.row(i)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

void check_vertices(const Tableau& t, const oracle::D4State& o, const Lattice& g) {
  for (int v = 0; v < g.num_vertices(); ++v) {
    CHECK(o.vertex_value(v) == doctest::Approx(t.vertex_negative(v) ? -1.0 : 1.0));
  }
}

}  // namespace

TEST_CASE("algebra tables on small tori") {
  for (int L : {3, 6, 9}) {
    Lattice g(L, 3);
    D4Algebra alg(g);
    for (int p = 0; p < g.num_plaquettes(); ++p) {
      // plaquettes fail to commute only with their six contacts, by B_u B_v
      CHECK(alg.omega(p).size() == 6);
      for (const auto& pc : alg.omega(p)) {
        bool contact = false;
        for (const auto& ct : g.contacts(p)) {
          if (ct.q != pc.q) continue;
          contact = true;
          std::vector<int> uv = {std::min(ct.u, ct.v), std::max(ct.u, ct.v)};
          std::vector<int> got = pc.s.verts;
          std::sort(got.begin(), got.end());
          CHECK(got == uv);
        }
        CHECK(contact);
        CHECK_FALSE(pc.s.neg);
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) CHECK(alg.xx(a, b).hh == 0);
      }
    }
  }
}

TEST_CASE("commutator of single gates") {
  DecoratedX x{{0}, {}};
  DecoratedX cz{{}, {{0, 1}}};
  auto r = commutator(x, cz, 4);
  CHECK(r.w == std::vector<int>{1});
  CHECK_FALSE(r.neg);
  DecoratedX xx{{0, 1}, {}};
  r = commutator(xx, cz, 4);
  CHECK(r.w == std::vector<int>{0, 1});
  CHECK(r.neg);
}

TEST_CASE("initial rows stabilize the reference states") {
  auto& f = fix();
  for (Basis b : {Basis::zero, Basis::plus}) {
    Tableau t(f.alg, b);
    oracle::D4State o(f.g, f.alg);
    o.init(b);
    check_rows(t, o);
    for (int p = 0; p < f.g.num_plaquettes(); ++p) {
      CHECK(t.expect_plaquette(p) == 1);
      CHECK(o.expect_a(p) == doctest::Approx(1.0));
    }
    // destabilizer pairing
    for (int i = 0; i < t.num_g(); ++i) {
      for (int j = 0; j < t.num_g(); ++j) {
        int p = -1;
        for (int q = 0; q < f.g.num_plaquettes(); ++q) {
          if (t.a_bit(t.row(j), q)) p = q;
        }
        CHECK(t.anticommutes(p, t.row(t.first_d() + i)) == (i == j));
      }
    }
  }
}

TEST_CASE("random Pauli and measurement sequences match the exact state") {
  auto& f = fix();
  const Lattice& g = f.g;
  Tableau::set_checks(true);
  Rng rng(20261016);
  int case_a = 0, case_b = 0, collapses = 0;
  for (int seq = 0; seq < 150; ++seq) {
    const Basis b = seq % 2 ? Basis::plus : Basis::zero;
    Tableau t(f.alg, b);
    oracle::D4State o(g, f.alg);
    o.init(b);
    for (int step = 0; step < 30; ++step) {
      const int kind = uniform_index(rng, 4);
      if (kind < 2) {
        const int e = uniform_index(rng, g.num_edges());
        const int pauli = 1 + uniform_index(rng, 3);
        t.apply_pauli(e, pauli);
        if (pauli & 1) o.x(e);
        if (pauli & 2) o.z(e);
      } else {
        const int p = uniform_index(rng, g.num_plaquettes());
        const double ea = o.expect_a(p);
        const int pred = t.expect_plaquette(p);
        CHECK(ea == doctest::Approx(static_cast<double>(pred)).epsilon(1e-9));
        const int m = t.measure_plaquette(p, rng);
        const double pr = o.measure_a(p, m);
        if (pred == 0) {
          ++case_a;
          CHECK(pr == doctest::Approx(0.5));
        } else {
          ++case_b;
          CHECK(m == pred);
          CHECK(pr == doctest::Approx(1.0));
        }
        // idempotence
        CHECK(t.expect_plaquette(p) == m);
      }
      check_vertices(t, o, g);
      check_rows(t, o);
    }
    collapses += t.any_collapsed();
  }
  Tableau::set_checks(false);
  MESSAGE("case a " << case_a << ", case b " << case_b << ", collapsed runs " << collapses);
  CHECK(case_a > 100);
  CHECK(case_b > 100);
}

TEST_CASE("dressed X-logical values follow the exact state") {
  auto& f = fix();
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Tableau t(f.alg, Basis::plus);
    oracle::D4State o(f.g, f.alg);
    o.init(Basis::plus);
    // Z errors only keep every vertex check at +1
    for (int k = 0; k < 4; ++k) {
      int e = uniform_index(rng, f.g.num_edges());
      t.apply_z(e);
      o.z(e);
    }
    bool all_plus = true;
    for (int p = 0; p < f.g.num_plaquettes(); ++p) {
      int m = t.measure_plaquette(p, rng);
      o.measure_a(p, m);
      all_plus = all_plus && m > 0;
    }
    if (!all_plus) continue;
    for (int c = 0; c < 3; ++c) {
      auto x = x_logical_negative(t, c);
      REQUIRE(x.has_value());
      CHECK(o.expect_xt(c) == doctest::Approx(*x ? -1.0 : 1.0));
    }
  }
}

TEST_CASE("decoder undoes a single error") {
  // on L=3 same-color plaquettes share two edges, so use L=6
  Lattice g(6, 3);
  D4Algebra alg(g);
  Rng rng(11);
  for (Basis b : {Basis::zero, Basis::plus}) {
    Tableau t(alg, b);
    CHECK(decode_d4(t, rng).ok);
    for (int e = 0; e < g.num_edges(); e += 5) {
      for (int pauli = 1; pauli <= 3; ++pauli) {
        Tableau s(alg, b);
        s.apply_pauli(e, pauli);
        auto out = decode_d4(s, rng);
        INFO("edge " << e << " pauli " << pauli);
        CHECK(out.ok);
      }
    }
  }
}

TEST_CASE("joint outcome statistics match Born probabilities") {
  auto& f = fix();
  const Lattice& g = f.g;
  Rng rng(99);
  // a fixed X error pattern, then three plaquette measurements
  const std::vector<int> xs = {g.x_logical(0, Axis::vertical)[0], g.star(g.vertices_per_color())[1],
                               2 * g.edges_per_color() + 4};
  const std::vector<int> ps = {0, g.plaquettes_per_color() + 1, 2 * g.plaquettes_per_color() + 2};
  for (Basis b : {Basis::zero, Basis::plus}) {
    std::map<int, double> born;
    for (int out = 0; out < 8; ++out) {
      oracle::D4State o(g, f.alg);
      o.init(b);
      for (int e : xs) o.x(e);
      double pr = 1.0;
      for (int k = 0; k < 3 && pr > 1e-12; ++k) {
        int m = (out >> k & 1) ? -1 : 1;
        double pk = (1.0 + m * o.expect_a(ps[k])) / 2.0;
        pr *= pk;
        if (pk > 1e-12) o.measure_a(ps[k], m);
      }
      born[out] = pr;
    }
    const int n = 10000;
    std::map<int, int> counts;
    for (int trial = 0; trial < n; ++trial) {
      Tableau t(f.alg, b);
      for (int e : xs) t.apply_x(e);
      int out = 0;
      for (int k = 0; k < 3; ++k) out |= (t.measure_plaquette(ps[k], rng) < 0) << k;
      counts[out]++;
    }
    for (int out = 0; out < 8; ++out) {
      const double p = born[out];
      const double sigma = std::sqrt(n * p * (1 - p));
      INFO("outcome " << out << " p " << p);
      CHECK(std::abs(counts[out] - n * p) <= 3 * sigma + 1e-9);
    }
  }
}

TEST_CASE("decoding is idempotent and leaves the original untouched") {
  Lattice g(6, 3);
  D4Algebra alg(g);
  Rng rng(5);
  for (Basis b : {Basis::zero, Basis::plus}) {
    Tableau t(alg, b);
    for (int k = 0; k < 6; ++k) t.apply_pauli(uniform_index(rng, g.num_edges()), 1 + uniform_index(rng, 3));
    const std::string before = t.snapshot_json();
    decode_d4(t, rng);
    CHECK(t.snapshot_json() == before);
    // a decoded state decodes to itself with no plaquette defects
    Tableau s = t;
    std::vector<int> dv;
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (s.vertex_negative(v)) dv.push_back(v);
    }
    auto xc = correction_chain(g, Kind::vertex, dv);
    for (int e = 0; e < g.num_edges(); ++e) {
      if (xc[e]) s.apply_x(e);
    }
    std::vector<int> da;
    for (int p = 0; p < g.num_plaquettes(); ++p) {
      if (s.measure_plaquette(p, rng) < 0) da.push_back(p);
    }
    auto zc = correction_chain(g, Kind::plaquette, da);
    for (int e = 0; e < g.num_edges(); ++e) {
      if (zc[e]) s.apply_z(e);
    }
    for (int p = 0; p < g.num_plaquettes(); ++p) CHECK(s.expect_plaquette(p) == 1);
    CHECK(s.count_vertex_defects() == 0);
    auto again = decode_d4(s, rng);
    CHECK(again.a_defects == 0);
  }
}
