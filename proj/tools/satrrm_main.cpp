#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satrrm/checkpoint.hpp"
#include "satrrm/common.hpp"
#include "satrrm/config.hpp"
#include "satrrm/dataset.hpp"
#include "satrrm/io.hpp"
#include "satrrm/report.hpp"
#include "satrrm/svg.hpp"
#include "satrrm/sweep.hpp"
#include "satrrm/version.hpp"

// Pipeline CLI. Exit codes: 0 success, 1 usage error, 2 runtime failure.

namespace {

using satrrm::config::RunConfig;

RunConfig load_config(const std::string& path) {
  return path.empty() ? satrrm::config::default_config() : satrrm::config::load(path);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void write_history_csv(const std::string& path, const satrrm::snn::TrainHistory& hist) {
  satrrm::io::Csv csv;
  csv.header = {"epoch", "train_loss", "val_accuracy"};
  for (std::size_t e = 0; e < hist.epochs.size(); ++e)
    csv.rows.push_back({std::to_string(e), satrrm::io::fmt_double(hist.epochs[e].train_loss),
                        satrrm::io::fmt_double(hist.epochs[e].val_accuracy)});
  satrrm::io::write_csv(path, csv);
}

void write_history_csv(const std::string& path, const satrrm::cnn::TrainHistory& hist) {
  satrrm::io::Csv csv;
  csv.header = {"epoch", "train_loss", "val_loss", "val_accuracy"};
  for (std::size_t e = 0; e < hist.epochs.size(); ++e)
    csv.rows.push_back({std::to_string(e), satrrm::io::fmt_double(hist.epochs[e].train_loss),
                        satrrm::io::fmt_double(hist.epochs[e].val_loss),
                        satrrm::io::fmt_double(hist.epochs[e].val_accuracy)});
  satrrm::io::write_csv(path, csv);
}

const std::vector<std::size_t>& pick_split(const satrrm::dataset::LoadedData& data,
                                           const std::string& split) {
  if (split == "train") return data.train_idx;
  if (split == "val") return data.val_idx;
  if (split == "test") return data.test_idx;
  throw satrrm::ConfigError("split must be train, val, or test");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satellite RRM lab: traffic synthesis, optimal allocation, spiking/conv "
               "classifiers, evaluation"};
  app.set_version_flag("--version", std::string(satrrm::kVersion));
  app.require_subcommand(1);

  std::string config_path, data_dir, out_path, model_path;
  std::string encoder_kind, split = "test", axis, values_csv;
  std::string snn_report, cnn_report;
  int samples = -1, steps = -1, pool_stride = -1, epochs = -1, threads = -1;
  std::int64_t seed = -1;
  double pmax = -1, wmax = -1, beta0 = -1, beta1 = -1, beta2 = -1, min_support = -1;
  double rho = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run-config JSON (defaults when omitted)");
    cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate traffic samples and demands");
  add_common(gen);
  gen->add_option("--out", data_dir, "dataset directory")->required();
  gen->add_option("--samples", samples, "sample count");
  gen->add_option("--seed", seed, "master seed");

  CLI::App* lab = app.add_subcommand("label", "solve every sample and build the class catalog");
  add_common(lab);
  lab->add_option("--data", data_dir, "dataset directory")->required();
  lab->add_option("--pmax", pmax, "total power cap, W");
  lab->add_option("--wmax", wmax, "total bandwidth cap, Hz");
  lab->add_option("--beta0", beta0, "mismatch weight, 1/bps");
  lab->add_option("--beta1", beta1, "power weight, 1/W");
  lab->add_option("--beta2", beta2, "bandwidth weight, 1/Hz");
  lab->add_option("--min-support", min_support, "class support threshold (fraction)");

  CLI::App* tsnn = app.add_subcommand("train-snn", "train the spiking classifier");
  add_common(tsnn);
  tsnn->add_option("--data", data_dir, "dataset directory")->required();
  tsnn->add_option("--out", out_path, "checkpoint path")->required();
  tsnn->add_option("--encoder", encoder_kind, "tem or rate");
  tsnn->add_option("--steps", steps, "encoder time steps");
  tsnn->add_option("--pool-stride", pool_stride, "input downsampling factor");
  tsnn->add_option("--rho", rho, "target spike rate of the labeled class");
  tsnn->add_option("--epochs", epochs, "training epochs");
  tsnn->add_option("--seed", seed, "training seed");

  CLI::App* tcnn = app.add_subcommand("train-cnn", "train the convolutional classifier");
  add_common(tcnn);
  tcnn->add_option("--data", data_dir, "dataset directory")->required();
  tcnn->add_option("--out", out_path, "checkpoint path")->required();
  tcnn->add_option("--pool-stride", pool_stride, "input downsampling factor");
  tcnn->add_option("--epochs", epochs, "training epochs");
  tcnn->add_option("--seed", seed, "training seed");

  CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
  add_common(ev);
  ev->add_option("--data", data_dir, "dataset directory")->required();
  ev->add_option("--model", model_path, "checkpoint path")->required();
  ev->add_option("--split", split, "train, val, or test");
  ev->add_option("--out", out_path, "report directory")->required();
  ev->add_option("--encoder", encoder_kind, "tem or rate (spiking models)");
  ev->add_option("--steps", steps, "encoder time steps (spiking models)");
  ev->add_option("--pool-stride", pool_stride, "input downsampling factor");

  CLI::App* sw = app.add_subcommand("sweep", "train/evaluate along one hyperparameter axis");
  add_common(sw);
  sw->add_option("--data", data_dir, "dataset directory")->required();
  sw->add_option("--axis", axis, "encoder, steps, pool_stride, rho, or tem_threshold")
      ->required();
  sw->add_option("--values", values_csv, "comma-separated axis values")->required();
  sw->add_option("--out", out_path, "output directory")->required();

  CLI::App* cmp = app.add_subcommand("compare", "compare a spiking and a conv report");
  cmp->add_option("--snn", snn_report, "spiking report directory")->required();
  cmp->add_option("--cnn", cnn_report, "conv report directory")->required();
  cmp->add_option("--out", out_path, "output directory")->required();

  CLI::App* rep = app.add_subcommand("report", "summarize a labeled dataset directory");
  add_common(rep);
  rep->add_option("--data", data_dir, "dataset directory")->required();
  rep->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (threads >= 0) cfg.threads = threads;

    if (gen->parsed()) {
      if (samples > 0) cfg.dataset.samples = samples;
      if (seed >= 0) cfg.dataset.seed = static_cast<std::uint64_t>(seed);
      const auto summary = satrrm::dataset::generate(cfg, data_dir);
      satrrm::config::save(std::filesystem::path(data_dir) / "config.json", cfg);
      std::cout << "generated " << summary.n << " samples, feature hash "
                << summary.feature_hash << "\n";
    } else if (lab->parsed()) {
      if (pmax > 0) cfg.label.p_max_w = pmax;
      if (wmax > 0) cfg.label.w_max_hz = wmax;
      if (beta0 >= 0) cfg.label.weights.beta0_per_bps = beta0;
      if (beta1 >= 0) cfg.label.weights.beta1_per_w = beta1;
      if (beta2 >= 0) cfg.label.weights.beta2_per_hz = beta2;
      if (min_support >= 0) cfg.label.min_support = min_support;
      const auto summary = satrrm::dataset::label(cfg, data_dir);
      std::cout << "catalog has " << summary.n_classes << " classes; " << summary.relabeled
                << " samples relabeled to their best in-catalog class\n";
    } else if (tsnn->parsed()) {
      if (!encoder_kind.empty()) cfg.encoder.kind = encoder_kind;
      if (steps > 0) cfg.encoder.steps = steps;
      if (pool_stride > 0) cfg.encoder.preprocess.pool_stride = pool_stride;
      if (rho > 0) cfg.snn.hyper.rho = rho;
      if (epochs > 0) cfg.snn.hyper.epochs = epochs;
      if (seed >= 0) cfg.snn.hyper.seed = static_cast<std::uint64_t>(seed);
      cfg.validate();
      const auto data = satrrm::dataset::load(cfg, data_dir, true);
      auto train_data = satrrm::dataset::snn_train_dataset(cfg.encoder, data, cfg.threads);
      std::vector<int> sizes{train_data.rasters.front().neurons};
      for (int h : cfg.snn.hidden) sizes.push_back(h);
      sizes.push_back(data.n_classes);
      auto net = satrrm::snn::make_network(sizes, cfg.snn.neuron, cfg.snn.hyper.seed);
      auto hyper = cfg.snn.hyper;
      hyper.threads = cfg.threads;
      const auto hist = satrrm::snn::train(net, train_data, hyper);
      satrrm::checkpoint::save_snn(out_path, net);
      write_history_csv(out_path + ".history.csv", hist);
      std::cout << "final val accuracy " << hist.epochs.back().val_accuracy << " after "
                << hist.epochs.size() << " epochs\n";
    } else if (tcnn->parsed()) {
      if (pool_stride > 0) cfg.cnn.preprocess.pool_stride = pool_stride;
      if (epochs > 0) cfg.cnn.hyper.epochs = epochs;
      if (seed >= 0) cfg.cnn.hyper.seed = static_cast<std::uint64_t>(seed);
      cfg.validate();
      const auto data = satrrm::dataset::load(cfg, data_dir, true);
      auto train_data = satrrm::dataset::cnn_train_dataset(cfg.cnn, data, cfg.threads);
      satrrm::cnn::CnnSpec spec;
      spec.in_rows = train_data.rows;
      spec.in_cols = train_data.cols;
      spec.conv1_filters = cfg.cnn.conv1_filters;
      spec.conv2_filters = cfg.cnn.conv2_filters;
      spec.kernel = cfg.cnn.kernel;
      spec.pool = cfg.cnn.pool;
      spec.dense1 = cfg.cnn.dense1;
      spec.dense2 = cfg.cnn.dense2;
      spec.n_classes = data.n_classes;
      auto model = satrrm::cnn::make_model(spec, cfg.cnn.hyper.seed);
      auto hyper = cfg.cnn.hyper;
      hyper.threads = cfg.threads;
      const auto hist = satrrm::cnn::train(model, train_data, hyper);
      satrrm::checkpoint::save_cnn(out_path, model);
      write_history_csv(out_path + ".history.csv", hist);
      // the checkpoint holds the best-validation-loss epoch, not the last one
      const auto& best = hist.epochs[static_cast<std::size_t>(hist.best_epoch)];
      std::cout << "saved epoch " << hist.best_epoch << " weights, val accuracy "
                << best.val_accuracy << " (" << hist.epochs.size() << " epochs run)\n";
    } else if (ev->parsed()) {
      if (!encoder_kind.empty()) cfg.encoder.kind = encoder_kind;
      if (steps > 0) cfg.encoder.steps = steps;
      cfg.validate();
      const auto data = satrrm::dataset::load(cfg, data_dir, true);
      const auto& indices = pick_split(data, split);
      const std::string kind = satrrm::checkpoint::model_kind(model_path);
      satrrm::report::EvalResult result;
      if (kind == "snn") {
        if (pool_stride > 0) cfg.encoder.preprocess.pool_stride = pool_stride;
        const auto net = satrrm::checkpoint::load_snn(model_path);
        result = satrrm::report::evaluate_snn(net, cfg.encoder, data, indices, split,
                                              cfg.threads);
      } else {
        if (pool_stride > 0) cfg.cnn.preprocess.pool_stride = pool_stride;
        const auto model = satrrm::checkpoint::load_cnn(model_path);
        result = satrrm::report::evaluate_cnn(model, cfg.cnn.preprocess, data, indices, split,
                                              cfg.threads);
      }
      satrrm::report::write_report(out_path, result);
      std::cout << "accuracy " << result.accuracy << ", macro F1 " << result.macro_f1
                << ", capacity gap " << result.capacity_gap_bps / 1e6 << " Mbps\n";
    } else if (sw->parsed()) {
      const auto data = satrrm::dataset::load(cfg, data_dir, true);
      satrrm::sweep::SweepSpec spec;
      spec.axis = axis;
      spec.values = split_csv(values_csv);
      const auto points = satrrm::sweep::run_sweep(spec, cfg, data, out_path);
      for (const auto& pt : points)
        std::cout << axis << "=" << pt.value << ": accuracy " << pt.accuracy << ", synops "
                  << pt.synops_per_example << "\n";
    } else if (cmp->parsed()) {
      const auto c = satrrm::report::compare_models(snn_report, cnn_report, out_path);
      std::cout << "accuracy delta (snn-cnn) " << c.accuracy_delta << ", ops ratio "
                << c.ops_ratio << ", latency ratio " << c.latency_ratio << "\n";
    } else if (rep->parsed()) {
      const auto data = satrrm::dataset::load(cfg, data_dir, true);
      std::filesystem::create_directories(out_path);
      // class support histogram + per-hour demand profile
      std::vector<std::string> class_labels;
      std::vector<double> supports;
      for (std::size_t k = 0; k < data.catalog.classes.size(); ++k) {
        class_labels.push_back(std::to_string(k));
        supports.push_back(static_cast<double>(data.catalog.support[k]));
      }
      satrrm::io::write_text_file(std::filesystem::path(out_path) / "class_support.svg",
                                  satrrm::svg::bar_chart("class support", "samples",
                                                         class_labels, supports));
      std::vector<double> hour_sum(24, 0.0);
      std::vector<int> hour_count(24, 0);
      for (int i = 0; i < data.n; ++i) {
        double total = 0.0;
        for (double d : data.demands[i].bps) total += d;
        hour_sum[data.hours[i]] += total / 1e6;
        ++hour_count[data.hours[i]];
      }
      satrrm::svg::Series demand{"mean total demand (Mbps)", {}};
      for (int h = 0; h < 24; ++h)
        if (hour_count[h] > 0) demand.points.emplace_back(h, hour_sum[h] / hour_count[h]);
      satrrm::io::write_text_file(std::filesystem::path(out_path) / "demand_by_hour.svg",
                                  satrrm::svg::line_chart("demand by hour", "hour",
                                                          "Mbps", {demand}));
      std::cout << "dataset: " << data.n << " samples, " << data.n_classes << " classes\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
