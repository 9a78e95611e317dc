#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "satrrm/common.hpp"
#include "satrrm/config.hpp"
#include "satrrm/io.hpp"
#include "satrrm/report.hpp"
#include "satrrm/sweep.hpp"
#include "test_util.hpp"

using namespace satrrm;

namespace {

report::EvalResult fake_result(const std::string& kind, double accuracy, double latency,
                               double ops, std::uint64_t split) {
  report::EvalResult r;
  r.model_kind = kind;
  r.split_name = "test";
  r.split_hash = split;
  r.truth = {0, 1, 0, 1};
  r.pred = {0, 1, 1, 1};
  r.scores = {{0.8, 0.2}, {0.1, 0.9}, {0.4, 0.6}, {0.3, 0.7}};
  r.confusion = metrics::confusion_matrix(r.truth, r.pred, 2);
  r.per_class = metrics::per_class_stats(r.confusion);
  for (int k = 0; k < 2; ++k) r.roc.push_back(metrics::roc_one_vs_rest(r.scores, r.truth, k));
  r.accuracy = accuracy;
  r.macro_f1 = metrics::macro_f1(r.confusion);
  r.macro_auc = metrics::macro_auc(r.scores, r.truth, 2);
  r.capacity_gap_bps = 1.5e7;
  r.latency_seconds = latency;
  r.ops_per_example = ops;
  r.ops_kind = kind == "snn" ? "synops" : "macs";
  r.spikes_per_example = kind == "snn" ? 123.0 : 0.0;
  return r;
}

}  // namespace

TEST_CASE("sweep spec validation") {
  sweep::SweepSpec ok{"steps", {"4", "8", "32"}};
  ok.validate();
  sweep::SweepSpec enc{"encoder", {"rate", "tem"}};
  enc.validate();

  CHECK_THROWS_AS(sweep::SweepSpec({"latency", {"1"}}).validate(), ConfigError);
  CHECK_THROWS_AS(sweep::SweepSpec({"steps", {}}).validate(), ConfigError);
  CHECK_THROWS_AS(sweep::SweepSpec({"steps", {"8", "4"}}).validate(), ConfigError);
  CHECK_THROWS_AS(sweep::SweepSpec({"steps", {"4", "4"}}).validate(), ConfigError);
  CHECK_THROWS_AS(sweep::SweepSpec({"encoder", {"tem", "rate"}}).validate(), ConfigError);
  CHECK_THROWS_AS(sweep::SweepSpec({"rho", {"0.5", "0.25"}}).validate(), ConfigError);
}

TEST_CASE("split hash: order-sensitive fingerprint of sample ids") {
  const std::vector<std::size_t> a = {1, 2, 3};
  const std::vector<std::size_t> b = {1, 2, 3};
  const std::vector<std::size_t> c = {3, 2, 1};
  CHECK(report::split_hash(a) == report::split_hash(b));
  CHECK(report::split_hash(a) != report::split_hash(c));
  CHECK(report::split_hash({}) != report::split_hash(a));
}

TEST_CASE("report directory round-trips through compare_models") {
  TempDir tmp("reports");
  const auto snn_dir = tmp.path / "snn";
  const auto cnn_dir = tmp.path / "cnn";
  const auto out_dir = tmp.path / "cmp";
  // spiking model: slightly lower accuracy, slower, far fewer ops
  report::write_report(snn_dir, fake_result("snn", 0.95, 2e-3, 1.0e5, 42));
  report::write_report(cnn_dir, fake_result("cnn", 0.97, 5e-4, 6.5e6, 42));

  const report::Comparison c = report::compare_models(snn_dir, cnn_dir, out_dir);
  CHECK(close_rel(c.accuracy_delta, -0.02, 1e-12));
  CHECK(close_rel(c.latency_ratio, 4.0, 1e-12));
  CHECK(close_rel(c.ops_ratio, 65.0, 1e-12));

  // compare.csv carries the same numbers, round-trip exact
  const io::Csv csv = io::read_csv(out_dir / "compare.csv");
  REQUIRE(csv.rows.size() == 3);
  CHECK(csv.rows[0][0] == "accuracy_delta_snn_minus_cnn");
  CHECK(io::parse_double(csv.rows[0][1]) == c.accuracy_delta);
  CHECK(io::parse_double(csv.rows[1][1]) == c.latency_ratio);
  CHECK(io::parse_double(csv.rows[2][1]) == c.ops_ratio);
}

TEST_CASE("report files are complete and self-consistent") {
  TempDir tmp("repfiles");
  const auto dir = tmp.path / "r";
  const report::EvalResult r = fake_result("snn", 0.75, 1e-3, 5e4, 7);
  report::write_report(dir, r);

  for (const char* name : {"report.csv", "confusion.csv", "roc_0.csv", "roc_1.csv",
                           "roc.svg", "f1.svg", "manifest.json"})
    CHECK(std::filesystem::exists(dir / name));

  const io::json manifest = io::read_json_file(dir / "manifest.json");
  CHECK(manifest.at("model") == "snn");
  CHECK(manifest.at("split_hash") == 7);

  // accuracy row in report.csv equals the confusion-trace ratio
  const io::Csv rep = io::read_csv(dir / "report.csv");
  double acc = -1.0;
  std::string spikes;
  for (const auto& row : rep.rows) {
    if (row[0] == "accuracy") acc = io::parse_double(row[1]);
    if (row[0] == "spikes_per_example") spikes = row[1];
  }
  CHECK(acc == 0.75);
  CHECK(spikes == "123");

  // confusion.csv reproduces the matrix
  const io::Csv conf = io::read_csv(dir / "confusion.csv");
  REQUIRE(conf.rows.size() == 2);
  CHECK(io::parse_int(conf.rows[0][1]) == static_cast<std::int64_t>(r.confusion.at(0, 0)));
  CHECK(io::parse_int(conf.rows[0][2]) == static_cast<std::int64_t>(r.confusion.at(0, 1)));
}

TEST_CASE("compare_models rejects mismatched splits and wrong kinds") {
  TempDir tmp("badcmp");
  const auto snn_dir = tmp.path / "snn";
  const auto cnn_dir = tmp.path / "cnn";
  report::write_report(snn_dir, fake_result("snn", 0.9, 1e-3, 1e5, 42));
  report::write_report(cnn_dir, fake_result("cnn", 0.9, 1e-3, 1e6, 43));
  CHECK_THROWS_AS(report::compare_models(snn_dir, cnn_dir, tmp.path / "out"), ConfigError);
  // both reports the same kind: also rejected
  const auto snn2 = tmp.path / "snn2";
  report::write_report(snn2, fake_result("snn", 0.9, 1e-3, 1e5, 42));
  CHECK_THROWS_AS(report::compare_models(snn_dir, snn2, tmp.path / "out2"), ConfigError);
}

TEST_CASE("run config json: defaults overlay and file round-trip") {
  TempDir tmp("cfg");
  const config::RunConfig def = config::default_config();
  def.validate();
  CHECK(def.encoder.kind == "tem");
  CHECK(def.encoder.preprocess.pool_stride == 32);
  CHECK(def.cnn.preprocess.pool_stride == 3);
  CHECK(def.snn.hidden == std::vector<int>{512, 256, 512});

  // partial json only overrides what it names
  const io::json partial = {{"encoder", {{"kind", "rate"}, {"steps", 32}}}};
  const config::RunConfig over = config::from_json(partial);
  CHECK(over.encoder.kind == "rate");
  CHECK(over.encoder.steps == 32);
  CHECK(over.encoder.preprocess.pool_stride == 32);
  CHECK(over.dataset.samples == def.dataset.samples);

  const auto path = tmp.path / "c.json";
  config::save(path, over);
  const config::RunConfig back = config::load(path);
  CHECK(back.encoder.kind == "rate");
  CHECK(back.encoder.steps == 32);
  CHECK(back.snn.hyper.lr == def.snn.hyper.lr);
  CHECK(config::to_json(back) == config::to_json(over));
}

TEST_CASE("bad configs are rejected with ConfigError") {
  config::RunConfig cfg = config::default_config();
  cfg.encoder.kind = "morse";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  config::RunConfig cfg2 = config::default_config();
  cfg2.table_mode = "mystery";
  CHECK_THROWS_AS(cfg2.validate(), ConfigError);

  config::RunConfig cfg3 = config::default_config();
  cfg3.dataset.train_frac = 0.99;
  cfg3.dataset.val_frac = 0.05;
  CHECK_THROWS_AS(cfg3.validate(), ConfigError);
}
