#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "htsim/io.h"
#include "htsim/metrics.h"

using namespace htsim;

TEST_CASE("csv numbers round-trip exactly") {
  const auto path = std::filesystem::temp_directory_path() / "htsim_roundtrip.csv";
  std::mt19937_64 rng(5);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) {
    double a = std::ldexp(static_cast<double>(rng() >> 11), -53);
    double b = std::ldexp(a, static_cast<int>(rng() % 200) - 100);
    rows.push_back({a, -b, double(i)});
  }
  rows.push_back({std::nan(""), INFINITY, -INFINITY});
  {
    CsvWriter w(path.string(), {"a", "b", "i"});
    for (const auto& r : rows) w.row(r);
    CHECK_THROWS(w.row({1.0}));
  }
  CsvTable t = read_csv(path.string());
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "i"});
  REQUIRE(t.rows.size() == rows.size());
  for (size_t i = 0; i + 1 < rows.size(); ++i) CHECK(t.rows[i] == rows[i]);
  CHECK(std::isnan(t.rows.back()[0]));
  CHECK(t.rows.back()[1] == INFINITY);
  CHECK(t.rows.back()[2] == -INFINITY);
  std::filesystem::remove(path);
}

TEST_CASE("fnv1a and hex formatting") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0x2a) == "000000000000002a");
  nlohmann::json a = {{"L", 24}, {"gamma_x", 4.0}};
  nlohmann::json b = {{"L", 24}, {"gamma_x", 4.5}};
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(nlohmann::json::parse(a.dump())));
}

TEST_CASE("geometry hash follows the incidence tables") {
  Lattice g3(6, 3, false), g1(6, 1, false), h3(6, 3, false);
  CHECK(geometry_hash(g3) == geometry_hash(h3));
  CHECK(geometry_hash(g3) != geometry_hash(g1));
  auto j = geometry_json(g1);
  CHECK(j["edge_vertices"].size() == static_cast<size_t>(g1.num_edges()));
}

TEST_CASE("histogram bin edges") {
  Histogram h = make_histogram({0.0, 0.01999, 0.02, 0.5, 0.999, 1.0, 1.5, -0.1}, 50);
  CHECK(h.total() == 6);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 1);
  CHECK(h.counts[25] == 1);
  CHECK(h.counts[49] == 2);
  CHECK(h.bin_lo(25) == doctest::Approx(0.5));
  CHECK(h.bin_hi(49) == 1.0);
  CHECK_THROWS(make_histogram({}, 0));
}

TEST_CASE("absorption threshold is half a flag below saturation") {
  CHECK(absorbed(1.0, 10));
  CHECK(!absorbed(0.9, 10));
  CHECK(absorbed(0.96, 10));
}

TEST_CASE("delta density over a window") {
  std::vector<double> t{0, 1, 2, 3, 4}, n{0.1, 0.2, 0.4, 0.5, 0.55};
  CHECK(delta_density(t, n, 2.0) == doctest::Approx(0.15));
  CHECK(delta_density(t, n, 1.5) == doctest::Approx(0.15));
  CHECK(delta_density(t, n, 4.0) == doctest::Approx(0.45));
  CHECK_THROWS(delta_density(t, n, 5.0));
}

TEST_CASE("snapshot at the ensemble mean") {
  std::vector<double> times{0, 1, 2};
  std::vector<std::vector<double>> d{{0, 0.2, 1.0}, {0, 0.4, 0.3}, {0, 0.3, 1.0}, {0, 0.1, 0.1}};
  MeanSnapshot s = snapshot_at_mean(times, d, 0.5, 100);
  CHECK(s.index == 2);
  CHECK(s.mean == doctest::Approx(0.6));
  CHECK(s.absorbed_fraction == doctest::Approx(0.5));
  CHECK(s.conditioned_mean == doctest::Approx(0.2));
  CHECK(s.hist.total() == 4);
  auto cm = conditioned_means(d, 100);
  CHECK(cm[1] == doctest::Approx(0.25));
  CHECK(cm[2] == doctest::Approx(0.2));
  try {
    snapshot_at_mean(times, d, 0.9, 100);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("attained range") != std::string::npos);
  }
  Modes m = describe_modes(s.hist, {1.0, 0.3, 1.0, 0.1}, 100);
  CHECK(m.absorbed_fraction == doctest::Approx(0.5));
  CHECK(m.low_fraction == doctest::Approx(0.5));
  CHECK(m.mode == doctest::Approx(0.99));
  CHECK(m.low_peak < 0.5);
}
