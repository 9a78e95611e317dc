#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "satrrm/common.hpp"
#include "satrrm/configspace.hpp"
#include "satrrm/linkbudget.hpp"
#include "test_util.hpp"

using namespace satrrm;
using namespace satrrm::configspace;
using linkbudget::CapacityTable;

namespace {

CapacityTable ref() { return linkbudget::reference_capacity_table(); }

// Independent count of configs with total power/bandwidth under the caps:
// dynamic programming over beams on exact partial-sum states, folding in the
// same beam order as the enumerator so the float sums are identical.
std::uint64_t dp_feasible(int n_beams, const CapacityTable& t, double p_max_w, double w_max_hz) {
  std::map<std::pair<double, double>, std::uint64_t> states;
  states[{0.0, 0.0}] = 1;
  for (int b = 0; b < n_beams; ++b) {
    std::map<std::pair<double, double>, std::uint64_t> next;
    for (const auto& [sum, count] : states)
      for (const auto& row : t.rows) {
        const double p = std::pow(10.0, row.power_dbw / 10.0);
        next[{sum.first + p, sum.second + row.bandwidth_hz}] += count;
      }
    states = std::move(next);
  }
  std::uint64_t n = 0;
  for (const auto& [sum, count] : states)
    if (sum.first <= p_max_w && sum.second <= w_max_hz) n += count;
  return n;
}

}  // namespace

TEST_CASE("config_count is |rows|^beams") {
  CHECK(config_count(8, ref()) == 1679616ull);  // 6^8
  CHECK(config_count(3, ref()) == 216ull);
}

TEST_CASE("enumeration order: beam 0 most significant, last index fastest") {
  std::vector<std::vector<std::uint8_t>> seen;
  for_each_config(2, 3, [&](const std::uint8_t* rows) {
    seen.push_back({rows[0], rows[1]});
  });
  REQUIRE(seen.size() == 9);
  CHECK(seen[0] == std::vector<std::uint8_t>{0, 0});
  CHECK(seen[1] == std::vector<std::uint8_t>{0, 1});
  CHECK(seen[2] == std::vector<std::uint8_t>{0, 2});
  CHECK(seen[3] == std::vector<std::uint8_t>{1, 0});
  CHECK(seen[8] == std::vector<std::uint8_t>{2, 2});
}

TEST_CASE("make_config folds totals in beam order") {
  const CapacityTable t = ref();
  const PayloadConfig cfg = make_config({0, 1, 5}, t);
  REQUIRE(cfg.beams.size() == 3);
  CHECK(cfg.rows == std::vector<std::uint8_t>{0, 1, 5});
  CHECK(cfg.beams[0].capacity_bps == t.rows[0].capacity_bps);
  CHECK(cfg.beams[2].power_dbw == 14.0);
  const double p0 = std::pow(10.0, 10.0 / 10.0);
  const double p1 = std::pow(10.0, 10.0 / 10.0);
  const double p2 = std::pow(10.0, 14.0 / 10.0);
  CHECK(cfg.total_power_w == (p0 + p1) + p2);  // exact fold order
  CHECK(cfg.total_bandwidth_hz == (250e6 + 500e6) + 500e6);
}

TEST_CASE("feasibility boundary is inclusive") {
  const CapacityTable t = ref();
  PayloadConfig cfg = make_config({0, 0}, t);
  CHECK(is_feasible(cfg, cfg.total_power_w, cfg.total_bandwidth_hz));
  CHECK(!is_feasible(cfg, cfg.total_power_w * 0.999, cfg.total_bandwidth_hz));
  CHECK(!is_feasible(cfg, cfg.total_power_w, cfg.total_bandwidth_hz * 0.999));
}

TEST_CASE("feasible_count matches an independent DP oracle") {
  const CapacityTable t = ref();
  // small space cross-check first
  CHECK(feasible_count(3, t, 45.0, 1.5e9) == dp_feasible(3, t, 45.0, 1.5e9));
  // the full default constraint set
  const std::uint64_t full = feasible_count(8, t, 115.0, 4e9);
  CHECK(full == dp_feasible(8, t, 115.0, 4e9));
  CHECK(full == 194304ull);
}

TEST_CASE("feasible_count is thread-count invariant") {
  const CapacityTable t = ref();
  CHECK(feasible_count(8, t, 115.0, 4e9, 1) == feasible_count(8, t, 115.0, 4e9, 3));
}

TEST_CASE("build_feasible_set lists configs in enumeration order") {
  const CapacityTable t = ref();
  const FeasibleSet fs = build_feasible_set(3, t, 45.0, 1.5e9);
  CHECK(fs.n_beams == 3);
  CHECK(fs.n() == feasible_count(3, t, 45.0, 1.5e9));
  REQUIRE(fs.n() > 1);
  // first feasible tuple is the all-zeros config (cheapest rows first)
  CHECK(fs.config(0)[0] == 0);
  CHECK(fs.config(0)[1] == 0);
  CHECK(fs.config(0)[2] == 0);
  // order is strictly increasing as a base-|rows| number
  auto key = [&](std::size_t i) {
    std::uint64_t k = 0;
    for (int b = 0; b < fs.n_beams; ++b) k = k * t.rows.size() + fs.config(i)[b];
    return k;
  };
  for (std::size_t i = 1; i < fs.n(); ++i) CHECK(key(i) > key(i - 1));
  // every listed config satisfies the caps, with matching precomputed totals
  for (std::size_t i = 0; i < fs.n(); ++i) {
    const PayloadConfig cfg =
        make_config(std::vector<std::uint8_t>(fs.config(i), fs.config(i) + 3), t);
    CHECK(cfg.total_power_w == fs.total_power_w[i]);
    CHECK(cfg.total_bandwidth_hz == fs.total_bandwidth_hz[i]);
    CHECK(is_feasible(cfg, 45.0, 1.5e9));
  }
}

TEST_CASE("reduce_classes: support ordering, pruning, tie by lexicographic rows") {
  const CapacityTable t = ref();
  std::vector<PayloadConfig> labels;
  auto add = [&](std::vector<std::uint8_t> rows, int copies) {
    for (int i = 0; i < copies; ++i) labels.push_back(make_config(rows, t));
  };
  add({2, 0}, 5);
  add({0, 1}, 3);
  add({1, 0}, 3);  // ties with {0,1} on support; {0,1} sorts first
  add({5, 5}, 1);  // 1/12 < 0.2: pruned

  const ClassCatalog cat = reduce_classes(labels, 0.2);
  REQUIRE(cat.classes.size() == 3);
  CHECK(cat.classes[0].rows == std::vector<std::uint8_t>{2, 0});
  CHECK(cat.classes[1].rows == std::vector<std::uint8_t>{0, 1});
  CHECK(cat.classes[2].rows == std::vector<std::uint8_t>{1, 0});
  CHECK(cat.support == std::vector<std::uint64_t>{5, 3, 3});

  CHECK(cat.find({0, 1}) == 1);
  CHECK(cat.find({5, 5}) == -1);

  CHECK_THROWS_AS(reduce_classes(labels, 0.99), ConfigError);  // nothing survives
}

TEST_CASE("catalog csv+json round-trip") {
  TempDir tmp("catalog");
  const CapacityTable t = ref();
  std::vector<PayloadConfig> labels;
  for (int i = 0; i < 4; ++i) labels.push_back(make_config({0, 2, 4}, t));
  for (int i = 0; i < 2; ++i) labels.push_back(make_config({1, 1, 1}, t));
  ClassCatalog cat = reduce_classes(labels, 0.1);
  cat.p_max_w = 115.0;
  cat.w_max_hz = 4e9;
  cat.min_support = 0.1;

  std::vector<linkbudget::Beam> beams = linkbudget::default_beams();
  beams.resize(3);
  save_catalog(tmp.path / "c.csv", tmp.path / "c.json", cat, beams);
  const ClassCatalog back = load_catalog(tmp.path / "c.csv", tmp.path / "c.json", t);

  REQUIRE(back.classes.size() == cat.classes.size());
  for (std::size_t k = 0; k < cat.classes.size(); ++k) {
    CHECK(back.classes[k].rows == cat.classes[k].rows);
    CHECK(back.classes[k].total_power_w == cat.classes[k].total_power_w);
    for (std::size_t b = 0; b < cat.classes[k].beams.size(); ++b)
      CHECK(back.classes[k].beams[b].capacity_bps == cat.classes[k].beams[b].capacity_bps);
  }
  CHECK(back.support == cat.support);
  CHECK(back.p_max_w == cat.p_max_w);
  CHECK(back.w_max_hz == cat.w_max_hz);
  CHECK(back.min_support == cat.min_support);
  back.validate();
}
