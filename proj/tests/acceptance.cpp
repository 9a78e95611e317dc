// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line and
// the process exit code reports the verdict, so the test driver can run the
// criteria individually:
//
//   satrrm_acceptance <1..11|compare>
//
// Expensive artifacts (the 4000-sample labeled dataset, trained checkpoints)
// are cached under the build tree and reused across criteria; the measured
// preparation/training times are cached with them so runtime bounds stay
// meaningful when a later criterion reuses an earlier artifact.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "satrrm/checkpoint.hpp"
#include "satrrm/cnn.hpp"
#include "satrrm/common.hpp"
#include "satrrm/config.hpp"
#include "satrrm/configspace.hpp"
#include "satrrm/dataset.hpp"
#include "satrrm/encoding.hpp"
#include "satrrm/io.hpp"
#include "satrrm/linkbudget.hpp"
#include "satrrm/metrics.hpp"
#include "satrrm/oracle.hpp"
#include "satrrm/report.hpp"
#include "satrrm/rng.hpp"
#include "satrrm/snn.hpp"
#include "satrrm/traffic.hpp"

using namespace satrrm;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

fs::path cache_dir() {
  const fs::path dir = SATRRM_ACCEPTANCE_CACHE;
  fs::create_directories(dir);
  return dir;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "[ok] " : "[FAILED] ") << what << "; ";
  }
};

int verdict(const std::string& name, const Check& c) {
  std::cout << "criterion " << name << ": " << (c.pass ? "PASS" : "FAIL") << " — "
            << c.detail.str() << "\n";
  return c.pass ? 0 : 1;
}

// ---------------------------------------------------------------- dataset --

config::RunConfig base_config() { return config::default_config(); }

// Generate + label the shared 4000-sample dataset once; remember how long it
// took so dependent criteria can report full cold-start runtimes.
struct PreparedData {
  fs::path dir;
  double prep_seconds = 0.0;
};

PreparedData ensure_dataset() {
  const config::RunConfig cfg = base_config();
  PreparedData out;
  out.dir = cache_dir() / "ds4000";
  const fs::path stamp = out.dir / "prep.json";
  if (fs::exists(stamp)) {
    try {
      const dataset::LoadedData data = dataset::load(cfg, out.dir, true);
      // load() trusts the manifest, so confirm the cache matches today's config
      if (data.n != cfg.dataset.samples || data.seed != cfg.dataset.seed ||
          data.model.hash() != cfg.traffic.hash())
        throw ConfigError("cached dataset was built from a different config");
      out.prep_seconds = io::read_json_file(stamp).at("prep_seconds").get<double>();
      return out;
    } catch (const std::exception&) {
      fs::remove_all(out.dir);  // stale or corrupt: rebuild
    }
  }
  fs::create_directories(out.dir);
  const double t0 = now_seconds();
  dataset::generate(cfg, out.dir);
  dataset::label(cfg, out.dir);
  out.prep_seconds = now_seconds() - t0;
  io::write_json_file(stamp, {{"prep_seconds", out.prep_seconds}});
  return out;
}

struct TrainedModel {
  double val_accuracy = 0.0;
  double train_seconds = 0.0;  // includes encoding/feature extraction
  fs::path checkpoint;
};

TrainedModel ensure_snn(const std::string& tag, const config::RunConfig& cfg,
                        const PreparedData& prep) {
  TrainedModel out;
  out.checkpoint = cache_dir() / (tag + ".ckpt");
  const fs::path stamp = cache_dir() / (tag + ".json");
  if (fs::exists(stamp) && fs::exists(out.checkpoint)) {
    const io::json j = io::read_json_file(stamp);
    out.val_accuracy = j.at("val_accuracy").get<double>();
    out.train_seconds = j.at("train_seconds").get<double>();
    return out;
  }
  const dataset::LoadedData data = dataset::load(cfg, prep.dir, true);
  const double t0 = now_seconds();
  snn::EncodedDataset enc = dataset::snn_train_dataset(cfg.encoder, data, cfg.threads);
  std::vector<int> sizes;
  sizes.push_back(enc.rasters.front().neurons);
  for (int h : cfg.snn.hidden) sizes.push_back(h);
  sizes.push_back(enc.n_classes);
  snn::LayeredSnn net = snn::make_network(sizes, cfg.snn.neuron, cfg.snn.hyper.seed);
  const snn::TrainHistory hist = snn::train(net, enc, cfg.snn.hyper);
  out.train_seconds = now_seconds() - t0;
  out.val_accuracy = hist.epochs.back().val_accuracy;
  checkpoint::save_snn(out.checkpoint, net);
  io::write_json_file(stamp, {{"val_accuracy", out.val_accuracy},
                              {"train_seconds", out.train_seconds}});
  return out;
}

TrainedModel ensure_cnn(const std::string& tag, const config::RunConfig& cfg,
                        const PreparedData& prep) {
  TrainedModel out;
  out.checkpoint = cache_dir() / (tag + ".ckpt");
  const fs::path stamp = cache_dir() / (tag + ".json");
  if (fs::exists(stamp) && fs::exists(out.checkpoint)) {
    const io::json j = io::read_json_file(stamp);
    out.val_accuracy = j.at("val_accuracy").get<double>();
    out.train_seconds = j.at("train_seconds").get<double>();
    return out;
  }
  const dataset::LoadedData data = dataset::load(cfg, prep.dir, true);
  const double t0 = now_seconds();
  cnn::FeatureDataset feats = dataset::cnn_train_dataset(cfg.cnn, data, cfg.threads);
  cnn::CnnSpec spec;
  spec.in_rows = feats.rows;
  spec.in_cols = feats.cols;
  spec.conv1_filters = cfg.cnn.conv1_filters;
  spec.conv2_filters = cfg.cnn.conv2_filters;
  spec.kernel = cfg.cnn.kernel;
  spec.pool = cfg.cnn.pool;
  spec.dense1 = cfg.cnn.dense1;
  spec.dense2 = cfg.cnn.dense2;
  spec.n_classes = feats.n_classes;
  cnn::CnnModel model = cnn::make_model(spec, cfg.cnn.hyper.seed);
  cnn::train(model, feats, cfg.cnn.hyper);
  out.val_accuracy = cnn::validation_accuracy(model, feats, cfg.threads);
  out.train_seconds = now_seconds() - t0;
  checkpoint::save_cnn(out.checkpoint, model);
  io::write_json_file(stamp, {{"val_accuracy", out.val_accuracy},
                              {"train_seconds", out.train_seconds}});
  return out;
}

// -------------------------------------------------------------- criteria --

int criterion_1() {
  const double t0 = now_seconds();
  Check c;
  const linkbudget::CapacityTable ref = linkbudget::reference_capacity_table();
  c.require(ref.rows.size() == 6, "six reference rows");
  double worst = 0.0;
  for (const auto& r : ref.rows)
    worst = std::max(worst, std::abs(r.capacity_bps - r.bandwidth_hz * r.efficiency_bps_hz));
  c.require(worst <= 0.05e6, "max |capacity - bandwidth*efficiency| = " +
                                 io::fmt_double(worst) + " bps <= 0.05 Mbps");

  const fs::path csv = fs::path(SATRRM_DATA_DIR) / "capacity_table.csv";
  const linkbudget::CapacityTable loaded = linkbudget::load_capacity_csv(csv);
  bool exact = loaded.rows.size() == ref.rows.size();
  for (std::size_t i = 0; exact && i < ref.rows.size(); ++i)
    exact = loaded.rows[i].bandwidth_hz == ref.rows[i].bandwidth_hz &&
            loaded.rows[i].power_dbw == ref.rows[i].power_dbw &&
            loaded.rows[i].eirp_dbw == ref.rows[i].eirp_dbw &&
            loaded.rows[i].cinr_db == ref.rows[i].cinr_db &&
            loaded.rows[i].efficiency_bps_hz == ref.rows[i].efficiency_bps_hz &&
            loaded.rows[i].capacity_bps == ref.rows[i].capacity_bps;
  c.require(exact, "shipped csv loads bit-exactly");
  const double dt = now_seconds() - t0;
  c.require(dt < 1.0, "runtime " + io::fmt_double(dt) + " s < 1 s");
  return verdict("1", c);
}

int criterion_2() {
  const double t0 = now_seconds();
  Check c;
  linkbudget::SystemParams sys;
  const linkbudget::Beam beam = linkbudget::default_beams()[3];
  const linkbudget::CapacityTable ref = linkbudget::reference_capacity_table();
  sys.extra_loss_db =
      linkbudget::fit_extra_loss_db(sys, beam, 10.0, 250e6, ref.rows[0].cinr_db);
  c.detail << "extra_loss " << io::fmt_double(sys.extra_loss_db) << " dB; ";
  double worst = 0.0;
  for (const auto& r : ref.rows)
    worst = std::max(worst,
                     std::abs(linkbudget::cinr_db(r.power_dbw, r.bandwidth_hz, beam, sys) -
                              r.cinr_db));
  c.require(worst <= 1.5, "worst CINR residual " + io::fmt_double(worst) + " dB <= 1.5 dB");
  const double dt = now_seconds() - t0;
  c.require(dt < 1.0, "runtime " + io::fmt_double(dt) + " s < 1 s");
  return verdict("2", c);
}

int criterion_3() {
  const double t0 = now_seconds();
  Check c;
  const linkbudget::CapacityTable table = linkbudget::reference_capacity_table();

  std::uint64_t enumerated = 0;
  configspace::for_each_config(8, table.rows.size(), [&](const std::uint8_t*) { ++enumerated; });
  c.require(enumerated == 1679616ull, "enumeration count " + std::to_string(enumerated) +
                                          " == 6^8");

  const std::uint64_t feasible = configspace::feasible_count(8, table, 115.0, 4e9);

  // independent oracle: dynamic programming over per-beam (power, bandwidth)
  // partial sums, folded in the same beam order
  std::map<std::pair<double, double>, std::uint64_t> states;
  states[{0.0, 0.0}] = 1;
  for (int b = 0; b < 8; ++b) {
    std::map<std::pair<double, double>, std::uint64_t> next;
    for (const auto& [sum, count] : states)
      for (const auto& row : table.rows)
        next[{sum.first + linkbudget::db_to_linear(row.power_dbw),
              sum.second + row.bandwidth_hz}] += count;
    states = std::move(next);
  }
  std::uint64_t dp = 0;
  for (const auto& [sum, count] : states)
    if (sum.first <= 115.0 && sum.second <= 4e9) dp += count;

  c.require(feasible == dp, "feasible_count " + std::to_string(feasible) +
                                " == DP oracle " + std::to_string(dp));
  const double share = 100.0 * static_cast<double>(feasible) / 1679616.0;
  // expected-red: with the pinned 6-row table and P_max = 115 W the true
  // share is ~11.57%; the bound stays as designed so the gap stays visible
  c.require(share < 1.0,
            "feasible share " + io::fmt_double(share) + "% < 1% of 6^8");
  const double dt = now_seconds() - t0;
  c.require(dt < 30.0, "runtime " + io::fmt_double(dt) + " s < 30 s");
  return verdict("3", c);
}

int criterion_4() {
  const double t0 = now_seconds();
  Check c;
  const linkbudget::CapacityTable table = linkbudget::reference_capacity_table();
  const configspace::FeasibleSet space = configspace::build_feasible_set(3, table, 55.0, 4e9);
  const oracle::ObjectiveWeights w;

  Rng rng(1234);
  int exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    traffic::DemandVector d;
    for (int b = 0; b < 3; ++b) d.bps.push_back(rng.uniform(50e6, 1.2e9));

    const oracle::SolveResult got = oracle::solve_exhaustive(d, space, w);

    // separately coded brute force with the documented fold and tie-breaks
    oracle::SolveResult want;
    bool have = false;
    for (std::size_t i = 0; i < space.n(); ++i) {
      const std::uint8_t* rows = space.config(i);
      double score = 0.0;
      for (int b = 0; b < 3; ++b)
        score += w.beta0_per_bps * std::abs(space.row_capacity_bps[rows[b]] - d.bps[b]) +
                 w.beta1_per_w * space.row_power_w[rows[b]] +
                 w.beta2_per_hz * space.row_bandwidth_hz[rows[b]];
      bool better = !have || score < want.score;
      if (have && score == want.score) {
        const double p = space.total_power_w[i], bp = space.total_power_w[want.index];
        const double bw = space.total_bandwidth_hz[i], bbw = space.total_bandwidth_hz[want.index];
        better = p < bp || (p == bp && bw < bbw);
      }
      if (better) {
        want.rows.assign(rows, rows + 3);
        want.score = score;
        want.index = i;
        have = true;
      }
    }
    if (got.rows == want.rows && got.score == want.score && got.index == want.index) ++exact;
  }
  c.require(exact == 20, std::to_string(exact) + "/20 instances match config and score exactly");
  const double dt = now_seconds() - t0;
  c.require(dt < 10.0, "runtime " + io::fmt_double(dt) + " s < 10 s");
  return verdict("4", c);
}

int criterion_5() {
  const double t0 = now_seconds();
  Check c;
  const fs::path work = cache_dir() / "determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cli = SATRRM_CLI_PATH;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >> " + (work / "cli.log").string() + " 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  bool ok = true;
  for (const char* which : {"a", "b"}) {
    const fs::path dir = work / which;
    ok = ok && run("gen-data --samples 1000 --seed 7 --out " + dir.string());
    ok = ok && run("label --data " + dir.string());
  }
  c.require(ok, "two gen-data+label runs completed");

  if (ok) {
    const io::json ma = io::read_json_file(work / "a" / "manifest.json");
    const io::json mb = io::read_json_file(work / "b" / "manifest.json");
    c.require(ma.at("feature_hash") == mb.at("feature_hash"),
              "feature hashes match (" + ma.at("feature_hash").dump() + ")");
    c.require(ma.at("splits") == mb.at("splits"), "splits match");
    c.require(io::read_text_file(work / "a" / "labels.csv") ==
                  io::read_text_file(work / "b" / "labels.csv"),
              "labels match byte-for-byte");
    c.require(io::read_text_file(work / "a" / "demands.csv") ==
                  io::read_text_file(work / "b" / "demands.csv"),
              "demand tables match byte-for-byte");
  }
  fs::remove_all(work);
  const double dt = now_seconds() - t0;
  c.require(dt < 120.0, "runtime " + io::fmt_double(dt) + " s < 2 min");
  return verdict("5", c);
}

int criterion_6() {
  Check c;
  const PreparedData prep = ensure_dataset();
  const TrainedModel m = ensure_snn("snn_tem8", base_config(), prep);
  c.require(m.val_accuracy >= 0.95,
            "reference spiking model val accuracy " + io::fmt_double(m.val_accuracy) +
                " >= 0.95");
  const double total = prep.prep_seconds + m.train_seconds;
  c.require(total < 1800.0,
            "dataset prep + training " + io::fmt_double(total) + " s < 30 min");
  return verdict("6", c);
}

int criterion_7() {
  Check c;
  const PreparedData prep = ensure_dataset();
  const TrainedModel tem8 = ensure_snn("snn_tem8", base_config(), prep);

  config::RunConfig rate8_cfg = base_config();
  rate8_cfg.encoder.kind = "rate";
  const TrainedModel rate8 = ensure_snn("snn_rate8", rate8_cfg, prep);

  config::RunConfig rate32_cfg = rate8_cfg;
  rate32_cfg.encoder.steps = 32;
  const TrainedModel rate32 = ensure_snn("snn_rate32", rate32_cfg, prep);

  c.detail << "tem8 " << io::fmt_double(tem8.val_accuracy) << ", rate8 "
           << io::fmt_double(rate8.val_accuracy) << ", rate32 "
           << io::fmt_double(rate32.val_accuracy) << "; ";
  c.require(tem8.val_accuracy - rate8.val_accuracy >= 0.05,
            "tem(T=8) beats rate(T=8) by >= 5 points");
  c.require(rate32.val_accuracy > rate8.val_accuracy, "rate(T=32) > rate(T=8)");
  const double total =
      prep.prep_seconds + tem8.train_seconds + rate8.train_seconds + rate32.train_seconds;
  c.require(total < 5400.0, "all retrains " + io::fmt_double(total) + " s < 90 min");
  return verdict("7", c);
}

int criterion_8() {
  Check c;
  const PreparedData prep = ensure_dataset();
  const TrainedModel ds3 = ensure_cnn("cnn_ds3", base_config(), prep);

  config::RunConfig coarse = base_config();
  coarse.cnn.preprocess.pool_stride = 36;
  const TrainedModel ds36 = ensure_cnn("cnn_ds36", coarse, prep);

  c.detail << "ds3 " << io::fmt_double(ds3.val_accuracy) << ", ds36 "
           << io::fmt_double(ds36.val_accuracy) << "; ";
  c.require(ds3.val_accuracy >= 0.95, "conv baseline val accuracy >= 0.95 at ds=3");
  c.require(ds3.val_accuracy >= ds36.val_accuracy, "finer input is at least as accurate");
  const double total = prep.prep_seconds + ds3.train_seconds + ds36.train_seconds;
  c.require(total < 1800.0, "dataset prep + both trainings " + io::fmt_double(total) +
                                " s < 30 min");
  return verdict("8", c);
}

int criterion_9() {
  const double t0 = now_seconds();
  Check c;

  {  // relaxed-mode spiking network vs central differences
    snn::LayeredSnn net = snn::make_network({8, 6, 4}, snn::NeuronParams{}, 21);
    encoding::SpikeRaster input;
    input.resize(8, 6);
    Rng rng(7);
    for (int n = 0; n < 8; ++n)
      for (int t = 0; t < 6; ++t)
        if (rng.bernoulli(0.5)) input.set(n, t);

    snn::Grads grads = snn::zero_grads(net);
    snn::example_grad(net, input, 1, 0.5, 0.01, snn::GradMode::kRelaxed, &grads);
    const double h = 1e-5;
    int checked = 0, ok = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l)
      for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
        const double keep = net.weights[l][i];
        net.weights[l][i] = keep + h;
        const double up = snn::relaxed_loss(net, input, 1, 0.5, 0.01);
        net.weights[l][i] = keep - h;
        const double dn = snn::relaxed_loss(net, input, 1, 0.5, 0.01);
        net.weights[l][i] = keep;
        const double fd = (up - dn) / (2.0 * h);
        ++checked;
        if (std::abs(grads[l][i] - fd) <=
            1e-3 * std::max({std::abs(grads[l][i]), std::abs(fd), 1e-6}))
          ++ok;
      }
    c.require(ok >= checked * 95 / 100, "spiking net (relaxed): " + std::to_string(ok) + "/" +
                                            std::to_string(checked) +
                                            " params within 1e-3 of finite differences");
  }

  {  // tiny convolutional network vs central differences
    cnn::CnnSpec spec;
    spec.in_rows = 16;
    spec.in_cols = 14;
    spec.conv1_filters = 2;
    spec.conv2_filters = 2;
    spec.dense1 = 10;
    spec.dense2 = 8;
    spec.n_classes = 3;
    cnn::CnnModel model = cnn::make_model(spec, 77);
    Rng rng(5);
    std::vector<double> img(16 * 14);
    for (double& v : img) v = rng.uniform01();

    cnn::CnnGrads grads = cnn::zero_grads(spec);
    cnn::example_grad(model, img.data(), 2, cnn::Loss::kCrossEntropy, &grads);

    std::vector<std::pair<std::vector<double>*, std::vector<double>*>> tensors = {
        {&model.conv1_w, &grads.conv1_w}, {&model.conv1_b, &grads.conv1_b},
        {&model.conv2_w, &grads.conv2_w}, {&model.conv2_b, &grads.conv2_b},
        {&model.d1_w, &grads.d1_w},       {&model.d1_b, &grads.d1_b},
        {&model.d2_w, &grads.d2_w},       {&model.d2_b, &grads.d2_b},
        {&model.d3_w, &grads.d3_w},       {&model.d3_b, &grads.d3_b}};
    const double h = 1e-5;
    int checked = 0, ok = 0;
    for (auto& [w, g] : tensors)
      for (std::size_t i = 0; i < w->size(); ++i) {
        const double keep = (*w)[i];
        (*w)[i] = keep + h;
        const double up = cnn::example_loss(model, img.data(), 2, cnn::Loss::kCrossEntropy);
        (*w)[i] = keep - h;
        const double dn = cnn::example_loss(model, img.data(), 2, cnn::Loss::kCrossEntropy);
        (*w)[i] = keep;
        const double fd = (up - dn) / (2.0 * h);
        ++checked;
        if (std::abs((*g)[i] - fd) <= 1e-3 * std::max({std::abs((*g)[i]), std::abs(fd), 1e-6}))
          ++ok;
      }
    c.require(ok >= checked * 95 / 100, "conv net: " + std::to_string(ok) + "/" +
                                            std::to_string(checked) +
                                            " params within 1e-3 of finite differences");
  }

  const double dt = now_seconds() - t0;
  c.require(dt < 60.0, "runtime " + io::fmt_double(dt) + " s < 1 min");
  return verdict("9", c);
}

int criterion_10() {
  const double t0 = now_seconds();
  Check c;
  const fs::path work = cache_dir() / "accounting";
  fs::create_directories(work);

  // spiking side: run one forward pass, dump every raster to disk, reload and
  // recount synops = sum over emitting layers of spikes * fan-out
  const snn::LayeredSnn net = snn::make_network({15, 11, 9, 5}, snn::NeuronParams{}, 3);
  encoding::SpikeRaster input;
  input.resize(15, 12);
  Rng rng(99);
  for (int n = 0; n < 15; ++n)
    for (int t = 0; t < 12; ++t)
      if (rng.bernoulli(0.4)) input.set(n, t);

  snn::RunStats stats;
  std::vector<encoding::SpikeRaster> layers;
  snn::forward(net, input, &stats, &layers);

  encoding::save_raster(work / "layer0.blob", input, {{"layer", 0}});
  for (std::size_t l = 0; l < layers.size(); ++l)
    encoding::save_raster(work / ("layer" + std::to_string(l + 1) + ".blob"), layers[l],
                          {{"layer", l + 1}});

  std::uint64_t recount = 0;
  for (int l = 0; l + 1 < static_cast<int>(net.sizes.size()); ++l) {
    const encoding::SpikeRaster r =
        encoding::load_raster(work / ("layer" + std::to_string(l) + ".blob"));
    recount += r.count() * static_cast<std::uint64_t>(net.sizes[static_cast<std::size_t>(l) + 1]);
  }
  c.require(recount == stats.synops, "synops recount from dumped rasters: " +
                                         std::to_string(recount) + " == " +
                                         std::to_string(stats.synops));
  std::uint64_t updates = 0;
  for (std::size_t l = 1; l < net.sizes.size(); ++l)
    updates += static_cast<std::uint64_t>(net.sizes[l]) * 12u;
  c.require(updates == stats.neuron_updates, "neuron updates recount");

  // conv side: mac_count against a per-layer spreadsheet recount
  auto spreadsheet = [](const cnn::CnnSpec& s) {
    const std::uint64_t conv1 = static_cast<std::uint64_t>(s.c1_rows()) * s.c1_cols() *
                                s.conv1_filters * s.kernel * s.kernel;
    const std::uint64_t conv2 = static_cast<std::uint64_t>(s.c2_rows()) * s.c2_cols() *
                                s.conv2_filters * s.kernel * s.kernel * s.conv1_filters;
    const std::uint64_t dense = static_cast<std::uint64_t>(s.dense1) * s.flat() +
                                static_cast<std::uint64_t>(s.dense2) * s.dense1 +
                                static_cast<std::uint64_t>(s.n_classes) * s.dense2;
    return conv1 + conv2 + dense;
  };
  bool macs_ok = true;
  for (std::pair<int, int> shape : {std::pair<int, int>{213, 120}, {17, 10}, {64, 48}}) {
    cnn::CnnSpec s;
    s.in_rows = shape.first;
    s.in_cols = shape.second;
    s.n_classes = 6;
    s.validate();
    if (cnn::mac_count(s) != spreadsheet(s)) macs_ok = false;
  }
  // the default ds=3 input shape, recounted with explicit numbers
  cnn::CnnSpec ds3;
  ds3.in_rows = 213;
  ds3.in_cols = 120;
  ds3.n_classes = 6;
  c.require(cnn::mac_count(ds3) ==
                211ull * 118 * 8 * 9 + 103ull * 57 * 4 * 72 + 512ull * 5712 + 256ull * 512 +
                    6ull * 256,
            "ds=3 MACs equal the hand total");
  c.require(macs_ok, "mac_count matches the per-layer recount on all shapes");

  fs::remove_all(work);
  const double dt = now_seconds() - t0;
  c.require(dt < 60.0, "runtime " + io::fmt_double(dt) + " s < 1 min");
  return verdict("10", c);
}

int criterion_11() {
  const double t0 = now_seconds();
  Check c;

  // trapezoid vs pairwise AUC on 200-sample score sets with heavy ties
  Rng rng(321);
  const int n = 200, classes = 4;
  std::vector<std::vector<double>> scores;
  std::vector<int> truth;
  for (int i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.below(classes));
    std::vector<double> s(classes);
    for (int k = 0; k < classes; ++k) {
      const double raw = 0.4 * rng.uniform01() + (k == label ? 0.2 : 0.0);
      s[k] = std::round(raw * 10.0) / 10.0;
    }
    scores.push_back(std::move(s));
    truth.push_back(label);
  }
  double worst = 0.0;
  for (int k = 0; k < classes; ++k)
    worst = std::max(worst, std::abs(metrics::roc_one_vs_rest(scores, truth, k).auc -
                                     metrics::auc_pairwise(scores, truth, k)));
  c.require(worst <= 1e-9, "max |trapezoid - pairwise| = " + io::fmt_double(worst) +
                               " <= 1e-9");

  // confusion trace ratio is exactly the accuracy
  std::vector<int> pred;
  for (int i = 0; i < n; ++i)
    pred.push_back(rng.bernoulli(0.7) ? truth[static_cast<std::size_t>(i)]
                                      : static_cast<int>(rng.below(classes)));
  const metrics::Confusion cm = metrics::confusion_matrix(truth, pred, classes);
  c.require(cm.accuracy() ==
                static_cast<double>(cm.trace()) / static_cast<double>(cm.total()),
            "accuracy == trace/total exactly");

  // the two-beam hand example
  const linkbudget::CapacityTable table = linkbudget::reference_capacity_table();
  configspace::ClassCatalog cat;
  cat.classes.push_back(configspace::make_config({0, 0}, table));
  cat.support = {1};
  const double gap = metrics::capacity_gap_bps({0}, {{400e6, 400e6}}, cat);
  c.require(std::abs(gap - 71631200.0) <= 1e-6 * 71631200.0,
            "capacity gap hand example: " + io::fmt_double(gap) + " bps");

  const double dt = now_seconds() - t0;
  c.require(dt < 10.0, "runtime " + io::fmt_double(dt) + " s < 10 s");
  return verdict("11", c);
}

int criterion_compare() {
  Check c;
  const PreparedData prep = ensure_dataset();
  const TrainedModel snn_ref = ensure_snn("snn_tem8", base_config(), prep);
  const TrainedModel cnn_ref = ensure_cnn("cnn_ds3", base_config(), prep);

  const config::RunConfig cfg = base_config();
  const dataset::LoadedData data = dataset::load(cfg, prep.dir, true);

  const snn::LayeredSnn net = checkpoint::load_snn(snn_ref.checkpoint);
  const cnn::CnnModel model = checkpoint::load_cnn(cnn_ref.checkpoint);

  const fs::path out = cache_dir() / "compare";
  const report::EvalResult rs =
      report::evaluate_snn(net, cfg.encoder, data, data.test_idx, "test", cfg.threads);
  const report::EvalResult rc =
      report::evaluate_cnn(model, cfg.cnn.preprocess, data, data.test_idx, "test", cfg.threads);
  report::write_report(out / "snn", rs);
  report::write_report(out / "cnn", rc);
  const report::Comparison cmp = report::compare_models(out / "snn", out / "cnn", out);

  c.detail << "accuracy delta " << io::fmt_double(cmp.accuracy_delta) << ", latency ratio "
           << io::fmt_double(cmp.latency_ratio) << ", ops ratio "
           << io::fmt_double(cmp.ops_ratio) << "; ";
  c.require(cmp.ops_ratio > 1.0,
            "conv MACs exceed spiking synops per example (operations ratio > 1)");
  return verdict("compare", c);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: satrrm_acceptance <1..11|compare>\n";
    return 2;
  }
  const std::string which = argv[1];
  try {
    if (which == "1") return criterion_1();
    if (which == "2") return criterion_2();
    if (which == "3") return criterion_3();
    if (which == "4") return criterion_4();
    if (which == "5") return criterion_5();
    if (which == "6") return criterion_6();
    if (which == "7") return criterion_7();
    if (which == "8") return criterion_8();
    if (which == "9") return criterion_9();
    if (which == "10") return criterion_10();
    if (which == "11") return criterion_11();
    if (which == "compare") return criterion_compare();
  } catch (const std::exception& e) {
    std::cout << "criterion " << which << ": FAIL — exception: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "unknown criterion '" << which << "'\n";
  return 2;
}
