#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "satrrm/traffic.hpp"
#include "test_util.hpp"

using namespace satrrm;
using namespace satrrm::traffic;

TEST_CASE("grid spec geometry") {
  GridSpec g;
  g.validate();
  CHECK(g.cells() == 640u * 360u);
  CHECK(close_rel(g.lat_step(), 25.0 / 640.0, 1e-15));
  CHECK(close_rel(g.cell_lat(0), 35.0 + 0.5 * 25.0 / 640.0, 1e-15));
  CHECK(close_rel(g.cell_lon(359), 20.0 - 0.5 * 30.0 / 360.0, 1e-12));
}

TEST_CASE("generate_grid is bit-reproducible") {
  const TrafficModel m = default_model();
  const TrafficGrid a = generate_grid(m, 20, 12345);
  const TrafficGrid b = generate_grid(m, 20, 12345);
  CHECK(a.mbps == b.mbps);
  const TrafficGrid c = generate_grid(m, 20, 12346);
  CHECK(a.mbps != c.mbps);
  const TrafficGrid d = generate_grid(m, 3, 12345);
  CHECK(a.mbps != d.mbps);
}

TEST_CASE("noise multiplies positive cells only") {
  TrafficModel m = default_model();
  TrafficModel base = m;
  base.noise_sigma = 0.0;
  const TrafficGrid noisy = generate_grid(m, 20, 7);
  const TrafficGrid clean = generate_grid(base, 20, 7);
  REQUIRE(noisy.mbps.size() == clean.mbps.size());
  std::size_t positive = 0, changed = 0;
  for (std::size_t i = 0; i < clean.mbps.size(); ++i) {
    if (clean.mbps[i] == 0.0f) {
      CHECK(noisy.mbps[i] == 0.0f);  // nothing invents demand in empty cells
    } else {
      ++positive;
      CHECK(noisy.mbps[i] > 0.0f);
      if (noisy.mbps[i] != clean.mbps[i]) ++changed;
    }
  }
  CHECK(positive > 1000);
  CHECK(changed > positive / 2);
}

TEST_CASE("diurnal profile scales the deterministic base field") {
  TrafficModel m = default_model();
  m.noise_sigma = 0.0;
  // population demand peaks in the evening and bottoms out at night
  const double night = generate_grid(m, 3, 1).total_mbps();
  const double midday = generate_grid(m, 14, 1).total_mbps();
  const double evening = generate_grid(m, 20, 1).total_mbps();
  CHECK(evening > 1.5 * night);
  CHECK(midday > night);
}

TEST_CASE("model json round-trip preserves the hash") {
  const TrafficModel m = default_model();
  const TrafficModel back = model_from_json(model_to_json(m));
  CHECK(back.hash() == m.hash());
  CHECK(back.noise_sigma == m.noise_sigma);
  REQUIRE(back.population.size() == m.population.size());
  CHECK(back.population[0].peak_mbps == m.population[0].peak_mbps);
  // a changed model changes the fingerprint
  TrafficModel other = m;
  other.noise_sigma += 0.01;
  CHECK(other.hash() != m.hash());
}

TEST_CASE("assign_cells: nearest beam, ties to the lowest id") {
  GridSpec g;
  g.rows = 4;
  g.cols = 4;
  g.lat_min = 44.0;
  g.lat_max = 46.0;
  g.lon_min = 9.0;
  g.lon_max = 11.0;
  // two beams at the same place: every cell ties, index 0 must win
  std::vector<linkbudget::Beam> twins = {{1, 45.0, 10.0}, {2, 45.0, 10.0}};
  for (std::uint8_t a : assign_cells(g, twins)) CHECK(a == 0);

  // distinct beams split the grid by longitude
  std::vector<linkbudget::Beam> pair = {{1, 45.0, 9.2}, {2, 45.0, 10.8}};
  const auto assign = assign_cells(g, pair);
  CHECK(assign[0] == 0);      // west edge
  CHECK(assign[3] == 1);      // east edge
}

TEST_CASE("aggregate_demand sums cell Mbps into the nearest beam, in bps") {
  GridSpec g;
  g.rows = 2;
  g.cols = 2;
  g.lat_min = 44.0;
  g.lat_max = 46.0;
  g.lon_min = 9.0;
  g.lon_max = 11.0;
  TrafficGrid grid;
  grid.spec = g;
  grid.mbps = {1.0f, 2.0f, 4.0f, 8.0f};  // row 0 = south
  std::vector<linkbudget::Beam> beams = {{1, 45.0, 9.2}, {2, 45.0, 10.8}};

  const DemandVector d = aggregate_demand(grid, beams);
  REQUIRE(d.bps.size() == 2);
  // west column (cells 0 and 2) lands on beam 0, east column on beam 1
  CHECK(d.bps[0] == (1.0 + 4.0) * 1e6);
  CHECK(d.bps[1] == (2.0 + 8.0) * 1e6);

  // precomputed-assignment overload agrees
  const auto assign = assign_cells(g, beams);
  const DemandVector d2 = aggregate_demand(grid, assign, beams.size());
  CHECK(d2.bps == d.bps);
}

TEST_CASE("default model exercises all three service classes") {
  const TrafficModel m = default_model();
  m.validate();
  CHECK(!m.population.empty());
  CHECK(!m.aero.empty());
  CHECK(!m.maritime.empty());
  for (double mult : m.population_diurnal.mult) CHECK(mult >= 0.0);
}
