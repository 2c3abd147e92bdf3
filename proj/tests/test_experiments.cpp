#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "htsim/experiments.h"

using namespace htsim;

TEST_CASE("record marks span the run") {
  auto m = record_marks(100, 0.5, 10.0, 0.0);
  CHECK(m.front() == 0);
  CHECK(m.back() == 2000);
  CHECK(m.size() == 101);
  for (size_t i = 1; i < m.size(); ++i) CHECK(m[i] > m[i - 1]);
  auto one = record_marks(100, 0.5, 10.0, 1e9);
  CHECK(one == std::vector<int64_t>{0, 2000});
  auto frac = record_marks(10, 1.0, 1.0, 0.25);
  CHECK(frac == std::vector<int64_t>{0, 3, 5, 8, 10});
}

TEST_CASE("parallel map keeps index order and rethrows") {
  auto v = parallel_map<int>(50, 4, [](int i) { return i * i; });
  for (int i = 0; i < 50; ++i) CHECK(v[i] == i * i);
  CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                    [](int i) -> int {
                                      if (i == 7) throw std::runtime_error("x");
                                      return i;
                                    }),
                  std::runtime_error);
}

TEST_CASE("series are identical for any worker count") {
  RunConfig c;
  c.L = 6;
  c.rates = Rates{1, 3, 5, 1};
  c.t_final = 2.0;
  c.trajectories = 4;
  c.seed = 9;
  c.decode_stride = 3;
  for (Model m : {Model::toric, Model::d4}) {
    c.model = m;
    auto a = run_series(c, 1), b = run_series(c, 3);
    REQUIRE(a.trajectories.size() == b.trajectories.size());
    for (size_t k = 0; k < a.trajectories.size(); ++k) {
      for (size_t i = 0; i < a.trajectories[k].size(); ++i) {
        const auto &p = a.trajectories[k][i], &q = b.trajectories[k][i];
        CHECK(p.t == q.t);
        CHECK(p.nX == q.nX);
        CHECK(p.nZ == q.nZ);
        CHECK(p.ndA == q.ndA);
        CHECK((p.F0 == q.F0 || (std::isnan(p.F0) && std::isnan(q.F0))));
      }
    }
  }
}

TEST_CASE("d4 series split fidelity by basis") {
  RunConfig c;
  c.model = Model::d4;
  c.L = 6;
  c.rates = Rates{1, 30, 60, 1};
  c.t_final = 0.5;
  c.trajectories = 2;
  auto r = run_series(c, 1);
  REQUIRE(r.trajectories.size() == 4);
  CHECK(!std::isnan(r.trajectories[0].back().F0));
  CHECK(std::isnan(r.trajectories[0].back().Fplus));
  CHECK(std::isnan(r.trajectories[3].back().F0));
  CHECK(!std::isnan(r.trajectories[3].back().Fplus));
  CHECK(r.mean.front().F0 == 1.0);
  CHECK(r.mean.front().ndA == 0.0);
}

TEST_CASE("phase labels") {
  CHECK(classify_phase(0.1, 0.1) == Phase::active);
  CHECK(classify_phase(0.9, 0.1) == Phase::z_active);
  CHECK(classify_phase(0.1, 0.9) == Phase::x_active);
  CHECK(classify_phase(0.9, 0.9) == Phase::absorbing);
}

TEST_CASE("log curvature") {
  std::vector<double> L{48, 96, 192};
  auto tau = [&](double a, double b, double c) {
    std::vector<double> t;
    for (double l : L) {
      double x = std::log(l);
      t.push_back(std::exp(a * x * x + b * x + c));
    }
    return t;
  };
  CHECK(log_curvature(L, tau(0.3, -1, 2)) == doctest::Approx(0.6));
  CHECK(log_curvature(L, tau(-0.2, 1, 0)) == doctest::Approx(-0.4));
  CHECK(log_curvature({10, 20, 40, 80}, {5, 10, 20, 40}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(log_curvature(L, {10, 20, INFINITY}) == INFINITY);
  CHECK(std::isnan(log_curvature(L, {10, INFINITY, 20})));
  CHECK_THROWS(log_curvature({1, 2}, {1, 2}));
}

TEST_CASE("concavity flip interpolation") {
  CHECK(concavity_flip({1, 2, 3}, {-2, -1, 1}) == doctest::Approx(2.5));
  CHECK(concavity_flip({1, 2, 3}, {-2, -1, INFINITY}) == doctest::Approx(2.5));
  CHECK(concavity_flip({1, 2, 3, 4}, {0.5, -1, -1, INFINITY}) == doctest::Approx(3.5));
  CHECK(concavity_flip({1, 2, 3}, {-1, 1, -1}) == doctest::Approx(1.5));
  CHECK(std::isnan(concavity_flip({1, 2}, {-1, -0.5})));
}

TEST_CASE("recovery time quantile") {
  std::vector<double> t{4, 1, 3, 2};
  CHECK(recovery_time(t, 0.5) == 2.0);
  CHECK(recovery_time(t, 0.0) == 4.0);
  CHECK(recovery_time(t, 0.9) == 1.0);
  CHECK(recovery_time(t, 1.0) == 0.0);
  CHECK(recovery_time({1, INFINITY, INFINITY}, 0.5) == INFINITY);
}

TEST_CASE("half life interpolation") {
  Series s(4);
  double f[] = {1.0, 0.8, 0.4, 0.1};
  for (int i = 0; i < 4; ++i) {
    s[i].t = i;
    s[i].F0 = f[i];
    s[i].Fplus = std::nan("");
  }
  CHECK(half_life(s, false) == doctest::Approx(1.75));
  CHECK(std::isnan(half_life(s, true)));
}

TEST_CASE("flags-only transition on small lattices") {
  TransitionConfig c;
  c.Ls = {6, 12, 24};
  c.gxs = {0.0};
  c.base = Rates{1, 0, 0, 1};
  c.trajectories = 20;
  c.threshold = 0.5;
  auto r = run_transition(c, 2);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.censored_frac == 0.0);
    CHECK(row.tau_median > 0.3);
    CHECK(row.tau_median < 1.5);
  }
}
