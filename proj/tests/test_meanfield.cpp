#include <doctest.h>

#include <cmath>

#include "htsim/meanfield.h"

using namespace htsim;

TEST_CASE("mean-field right-hand side at the corners") {
  auto d = mf_rhs({1, 1}, Rates{1, 7, 30, 1});
  CHECK(d.nx == 0.0);
  CHECK(d.nz == 0.0);
  d = mf_rhs({0, 0}, Rates{1, 0, 0, 1});
  CHECK(d.nx == 1.0);
  CHECK(d.nz == 1.0);
}

TEST_CASE("pure filling follows 1 - exp(-t)") {
  Rates r{1, 0, 0, 1};
  for (double t : {0.5, 1.0, 3.0}) {
    auto s = mf_integrate({}, r, t, 1e-3);
    CHECK(std::abs(s.nx - (1 - std::exp(-t))) < 1e-6);
    CHECK(std::abs(s.nz - (1 - std::exp(-t))) < 1e-6);
  }
}

TEST_CASE("X density settles on the lower root of 2 gx n (1-n) = 1") {
  for (double gx : {2.5, 5.0, 12.0, 35.0}) {
    auto s = mf_integrate({}, Rates{1, gx, 0, 1}, 1e3);
    double root = 0.5 * (1 - std::sqrt(1 - 2 / gx));
    CHECK(s.nx == doctest::Approx(root).epsilon(1e-7));
  }
  auto s = mf_integrate({}, Rates{1, 1.9, 500, 1}, 1e4);
  CHECK(s.nx > 0.999);
  CHECK(s.nz > 0.999);
  CHECK(mf_classify(s) == MFPhase::absorbing);
}

TEST_CASE("large correction rates reach the small-density fixed point") {
  auto s = mf_integrate({}, Rates{1, 35, 500, 1}, 1e4);
  CHECK(s.nx < 0.05);
  CHECK(s.nz < 0.05);
  CHECK(mf_classify(s) == MFPhase::active);
  auto p = mf_integrate({}, Rates{1, 35, 0, 1}, 1e4);
  CHECK(mf_classify(p) == MFPhase::x_active);
}

TEST_CASE("trajectory stays inside the unit square") {
  std::vector<MFState> path;
  mf_integrate({}, Rates{1, 40, 600, 1}, 50, 1e-2, 20, &path, 0.1);
  REQUIRE(path.size() > 100);
  for (const auto& s : path) {
    CHECK(s.nx >= 0.0);
    CHECK(s.nx <= 1.0);
    CHECK(s.nz >= 0.0);
    CHECK(s.nz <= 1.0);
  }
}

TEST_CASE("scan is row-major over gamma_z") {
  auto pts = mf_scan(1, 0, 10, 0, 100, 3, 2, 10);
  REQUIRE(pts.size() == 6);
  CHECK(pts[1].gamma_x == 5.0);
  CHECK(pts[1].gamma_z == 0.0);
  CHECK(pts[3].gamma_z == 100.0);
  CHECK_THROWS(mf_scan(1, 0, 1, 0, 1, 0, 3));
}
