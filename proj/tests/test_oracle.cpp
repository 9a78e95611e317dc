#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "satrrm/configspace.hpp"
#include "satrrm/linkbudget.hpp"
#include "satrrm/oracle.hpp"
#include "satrrm/rng.hpp"
#include "test_util.hpp"

using namespace satrrm;
using namespace satrrm::oracle;
using configspace::FeasibleSet;
using configspace::PayloadConfig;
using linkbudget::CapacityTable;

namespace {

CapacityTable ref() { return linkbudget::reference_capacity_table(); }

// Completely separate brute force: walk the feasible set in order, recompute
// the objective with the documented fold, keep the documented tie-breaks.
SolveResult brute_force(const traffic::DemandVector& demand, const FeasibleSet& space,
                        const ObjectiveWeights& w) {
  SolveResult best;
  bool have = false;
  for (std::size_t i = 0; i < space.n(); ++i) {
    const std::uint8_t* rows = space.config(i);
    double score = 0.0;
    double pw = 0.0, bw = 0.0;
    for (int b = 0; b < space.n_beams; ++b) {
      const std::size_t r = rows[b];
      score += w.beta0_per_bps * std::abs(space.row_capacity_bps[r] - demand.bps[b]) +
               w.beta1_per_w * space.row_power_w[r] + w.beta2_per_hz * space.row_bandwidth_hz[r];
      pw += space.row_power_w[r];
      bw += space.row_bandwidth_hz[r];
    }
    const bool better =
        !have || score < best.score ||
        (score == best.score && (pw < space.total_power_w[best.index] ||
                                 (pw == space.total_power_w[best.index] &&
                                  bw < space.total_bandwidth_hz[best.index])));
    if (better) {
      best.rows.assign(rows, rows + space.n_beams);
      best.score = score;
      best.index = i;
      have = true;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("objective: hand-folded cost of a two-beam config") {
  const CapacityTable t = ref();
  const PayloadConfig cfg = configspace::make_config({0, 5}, t);
  traffic::DemandVector d;
  d.bps = {400e6, 900e6};
  ObjectiveWeights w;
  w.validate();
  // beam 0: |471.6312e6 - 400e6| mismatch, 10 W, 250 MHz
  // beam 1: |1033.4e6  - 900e6| mismatch, 25.12 W, 500 MHz
  const double p0 = std::pow(10.0, 10.0 / 10.0), p1 = std::pow(10.0, 14.0 / 10.0);
  const double expect = (w.beta0_per_bps * std::abs(471631200.0 - 400e6) +
                         w.beta1_per_w * p0 + w.beta2_per_hz * 250e6) +
                        (w.beta0_per_bps * std::abs(1033400000.0 - 900e6) +
                         w.beta1_per_w * p1 + w.beta2_per_hz * 500e6);
  CHECK(objective(cfg, d, w) == expect);
}

TEST_CASE("equal scores fall back to the lower-power config") {
  // one beam, demand exactly between two offered capacities: same mismatch,
  // lower power must win
  const CapacityTable t = ref();
  const FeasibleSet space = configspace::build_feasible_set(1, t, 1e9, 1e12);
  REQUIRE(space.n() == 6);
  traffic::DemandVector d;
  ObjectiveWeights w;
  w.beta1_per_w = 0.0;
  w.beta2_per_hz = 0.0;  // no resource cost: tie resolved by the tie-break chain
  // rows 0 and 2 offer 471.6312 / 562.5421 Mbps at 10 / 12 dBW, both 250 MHz
  d.bps = {(471631200.0 + 562542100.0) / 2.0};
  const SolveResult r = solve_exhaustive(d, space, w);
  CHECK(r.rows == std::vector<std::uint8_t>{0});  // 10 dBW beats 12 dBW
}

TEST_CASE("solve_exhaustive matches a separately coded brute force on random instances") {
  const CapacityTable t = ref();
  // three beams under a tightened power cap so the filter actually prunes
  const FeasibleSet space = configspace::build_feasible_set(3, t, 55.0, 4e9);
  REQUIRE(space.n() > 0);
  REQUIRE(space.n() < 216);
  ObjectiveWeights w;
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    traffic::DemandVector d;
    for (int b = 0; b < 3; ++b) d.bps.push_back(rng.uniform(50e6, 1.2e9));
    const SolveResult got = solve_exhaustive(d, space, w);
    const SolveResult want = brute_force(d, space, w);
    CHECK(got.rows == want.rows);
    CHECK(got.score == want.score);  // bitwise: same fold order
    CHECK(got.index == want.index);
  }
}

TEST_CASE("solve_exhaustive is thread-count invariant") {
  const CapacityTable t = ref();
  const FeasibleSet space = configspace::build_feasible_set(3, t, 55.0, 4e9);
  ObjectiveWeights w;
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    traffic::DemandVector d;
    for (int b = 0; b < 3; ++b) d.bps.push_back(rng.uniform(50e6, 1.2e9));
    const SolveResult serial = solve_exhaustive(d, space, w, 1);
    const SolveResult parallel = solve_exhaustive(d, space, w, 3);
    CHECK(serial.rows == parallel.rows);
    CHECK(serial.score == parallel.score);
    CHECK(serial.index == parallel.index);
  }
}

TEST_CASE("solve_catalog: restricted argmin, ties to the lowest class id") {
  const CapacityTable t = ref();
  configspace::ClassCatalog cat;
  cat.classes.push_back(configspace::make_config({0, 0}, t));
  cat.classes.push_back(configspace::make_config({1, 1}, t));
  cat.classes.push_back(configspace::make_config({0, 0}, t));  // duplicate of class 0
  cat.support = {10, 5, 1};
  ObjectiveWeights w;

  traffic::DemandVector d;
  d.bps = {650e6, 650e6};  // closest to the 667.4827 Mbps rows of class 1
  const SolveResult r = solve_catalog(d, cat, w);
  CHECK(r.index == 1);
  CHECK(r.rows == std::vector<std::uint8_t>{1, 1});

  // classes 0 and 2 are identical: the tie must land on 0
  d.bps = {471631200.0, 471631200.0};
  CHECK(solve_catalog(d, cat, w).index == 0);
}

TEST_CASE("weights validate") {
  ObjectiveWeights w;
  w.validate();
  w.beta0_per_bps = -1.0;
  CHECK_THROWS(w.validate());
}
