#include "satrrm/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <system_error>

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"
#include "satrrm/parallel.hpp"
#include "satrrm/svg.hpp"
#include "satrrm/version.hpp"

namespace satrrm::report {

namespace {

void finish_metrics(EvalResult& r, const dataset::LoadedData& data,
                    const std::vector<std::size_t>& indices) {
  r.confusion = metrics::confusion_matrix(r.truth, r.pred, data.n_classes);
  r.per_class = metrics::per_class_stats(r.confusion);
  r.accuracy = r.confusion.accuracy();
  r.macro_f1 = metrics::macro_f1(r.confusion);
  r.roc.clear();
  for (int k = 0; k < data.n_classes; ++k)
    r.roc.push_back(metrics::roc_one_vs_rest(r.scores, r.truth, k));
  r.macro_auc = metrics::macro_auc(r.scores, r.truth, data.n_classes);
  std::vector<std::vector<double>> demands;
  demands.reserve(indices.size());
  for (std::size_t i : indices) demands.push_back(data.demands[i].bps);
  r.capacity_gap_bps = metrics::capacity_gap_bps(r.pred, demands, data.catalog);
}

}  // namespace

std::uint64_t split_hash(const std::vector<std::size_t>& indices) {
  std::vector<std::uint64_t> ids(indices.begin(), indices.end());
  return fnv1a64(ids.data(), ids.size() * sizeof(std::uint64_t));
}

EvalResult evaluate_snn(const snn::LayeredSnn& net, const config::EncoderParams& enc,
                        const dataset::LoadedData& data,
                        const std::vector<std::size_t>& indices,
                        const std::string& split_name, int threads) {
  if (data.labels.empty()) throw ConfigError("dataset has no labels");
  const auto rasters = dataset::encode_rasters(enc, data, indices, threads);
  EvalResult r;
  r.model_kind = "snn";
  r.split_name = split_name;
  r.split_hash = split_hash(indices);
  r.ops_kind = "synops";
  const std::size_t n = indices.size();
  r.truth.resize(n);
  r.pred.resize(n);
  r.scores.resize(n);
  std::vector<double> seconds(n, 0.0);
  std::vector<std::uint64_t> synops(n, 0), spikes(n, 0);
  parallel_for(static_cast<std::int64_t>(n), threads, [&](std::int64_t k) {
    snn::RunStats stats;
    const auto out = snn::forward(net, rasters[k], &stats);
    r.truth[k] = data.labels[indices[k]];
    r.pred[k] = snn::predict(out);
    auto& sc = r.scores[k];
    sc.resize(out.neurons);
    for (int c = 0; c < out.neurons; ++c)
      sc[c] = static_cast<double>(out.row_count(c)) / out.steps;
    seconds[k] = stats.seconds;
    synops[k] = stats.synops;
    for (const auto& layer : stats.spikes)
      for (auto v : layer) spikes[k] += v;
  });
  double sec = 0.0, ops = 0.0, spk = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sec += seconds[k];
    ops += static_cast<double>(synops[k]);
    spk += static_cast<double>(spikes[k]);
  }
  r.latency_seconds = sec / static_cast<double>(n);
  r.ops_per_example = ops / static_cast<double>(n);
  r.spikes_per_example = spk / static_cast<double>(n);
  finish_metrics(r, data, indices);
  return r;
}

EvalResult evaluate_cnn(const cnn::CnnModel& model, const encoding::PreprocessParams& pp,
                        const dataset::LoadedData& data,
                        const std::vector<std::size_t>& indices,
                        const std::string& split_name, int threads) {
  if (data.labels.empty()) throw ConfigError("dataset has no labels");
  const auto feats = dataset::cnn_features(pp, data, indices, threads);
  EvalResult r;
  r.model_kind = "cnn";
  r.split_name = split_name;
  r.split_hash = split_hash(indices);
  r.ops_kind = "macs";
  r.ops_per_example = static_cast<double>(cnn::mac_count(model.spec));
  const std::size_t n = indices.size();
  r.truth.resize(n);
  r.pred.resize(n);
  r.scores.resize(n);
  std::vector<double> seconds(n, 0.0);
  parallel_for(static_cast<std::int64_t>(n), threads, [&](std::int64_t k) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto probs = cnn::forward(model, feats.sample(k));
    seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.truth[k] = data.labels[indices[k]];
    r.pred[k] = cnn::predict(probs);
    r.scores[k] = probs;
  });
  double sec = 0.0;
  for (double s : seconds) sec += s;
  r.latency_seconds = sec / static_cast<double>(n);
  finish_metrics(r, data, indices);
  return r;
}

void write_report(const std::filesystem::path& dir, const EvalResult& r) {
  std::filesystem::create_directories(dir);
  const int z = r.confusion.n_classes;

  io::Csv rep;
  rep.header = {"metric", "value"};
  auto add = [&](const std::string& k, const std::string& v) { rep.rows.push_back({k, v}); };
  add("model", r.model_kind);
  add("split", r.split_name);
  add("split_hash", std::to_string(r.split_hash));
  add("samples", std::to_string(r.truth.size()));
  add("classes", std::to_string(z));
  add("accuracy", io::fmt_double(r.accuracy));
  add("macro_f1", io::fmt_double(r.macro_f1));
  add("macro_auc", io::fmt_double(r.macro_auc));
  add("capacity_gap_bps", io::fmt_double(r.capacity_gap_bps));
  add("latency_seconds", io::fmt_double(r.latency_seconds));
  add("ops_kind", r.ops_kind);
  add("ops_per_example", io::fmt_double(r.ops_per_example));
  if (r.model_kind == "snn") add("spikes_per_example", io::fmt_double(r.spikes_per_example));
  for (int k = 0; k < z; ++k) {
    const auto& s = r.per_class[k];
    add("class_" + std::to_string(k) + "_precision", io::fmt_double(s.precision));
    add("class_" + std::to_string(k) + "_recall", io::fmt_double(s.recall));
    add("class_" + std::to_string(k) + "_f1", io::fmt_double(s.f1));
    add("class_" + std::to_string(k) + "_auc", io::fmt_double(r.roc[k].auc));
    add("class_" + std::to_string(k) + "_support", std::to_string(s.support));
  }
  io::write_csv(dir / "report.csv", rep);

  io::Csv conf;
  conf.header = {"truth"};
  for (int k = 0; k < z; ++k) conf.header.push_back("pred_" + std::to_string(k));
  for (int t = 0; t < z; ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (int p = 0; p < z; ++p) row.push_back(std::to_string(r.confusion.at(t, p)));
    conf.rows.push_back(std::move(row));
  }
  io::write_csv(dir / "confusion.csv", conf);

  std::vector<svg::Series> roc_series;
  for (int k = 0; k < z; ++k) {
    io::Csv roc;
    roc.header = {"fpr", "tpr", "threshold"};
    svg::Series series;
    series.label = "class " + std::to_string(k) +
                   (std::isnan(r.roc[k].auc) ? "" : " (auc " + io::fmt_double(r.roc[k].auc) + ")");
    for (const auto& pt : r.roc[k].points) {
      roc.rows.push_back(
          {io::fmt_double(pt.fpr), io::fmt_double(pt.tpr), io::fmt_double(pt.threshold)});
      series.points.emplace_back(pt.fpr, pt.tpr);
    }
    io::write_csv(dir / ("roc_" + std::to_string(k) + ".csv"), roc);
    roc_series.push_back(std::move(series));
  }
  io::write_text_file(dir / "roc.svg",
                      svg::line_chart("one-vs-rest ROC (" + r.model_kind + ")",
                                      "false positive rate", "true positive rate", roc_series));

  std::vector<std::string> class_labels;
  std::vector<double> f1_values;
  for (int k = 0; k < z; ++k) {
    class_labels.push_back(std::to_string(k));
    f1_values.push_back(r.per_class[k].f1);
  }
  io::write_text_file(dir / "f1.svg",
                      svg::bar_chart("per-class F1 (" + r.model_kind + ")", "F1",
                                     class_labels, f1_values));

  io::json manifest;
  manifest["version"] = kVersion;
  manifest["model"] = r.model_kind;
  manifest["split"] = r.split_name;
  manifest["split_hash"] = r.split_hash;
  manifest["samples"] = r.truth.size();
  io::write_json_file(dir / "manifest.json", manifest);
}

namespace {

struct ReportSummary {
  std::string model;
  std::uint64_t split_hash = 0;
  double accuracy = 0.0, latency = 0.0, ops = 0.0;
};

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("bad unsigned integer: '" + s + "'");
  return v;
}

ReportSummary read_summary(const std::filesystem::path& dir) {
  const io::Csv rep = io::read_csv(dir / "report.csv");
  ReportSummary s;
  for (const auto& row : rep.rows) {
    if (row[0] == "model") s.model = row[1];
    if (row[0] == "split_hash") s.split_hash = parse_u64(row[1]);
    if (row[0] == "accuracy") s.accuracy = io::parse_double(row[1]);
    if (row[0] == "latency_seconds") s.latency = io::parse_double(row[1]);
    if (row[0] == "ops_per_example") s.ops = io::parse_double(row[1]);
  }
  return s;
}

}  // namespace

Comparison compare_models(const std::filesystem::path& snn_dir,
                          const std::filesystem::path& cnn_dir,
                          const std::filesystem::path& out_dir) {
  const ReportSummary a = read_summary(snn_dir);
  const ReportSummary b = read_summary(cnn_dir);
  if (a.model != "snn") throw ConfigError(snn_dir.string() + " is not a spiking-model report");
  if (b.model != "cnn")
    throw ConfigError(cnn_dir.string() + " is not a convolutional-model report");
  if (a.split_hash != b.split_hash)
    throw ConfigError("reports evaluate different splits; comparison would be meaningless");

  Comparison c;
  c.accuracy_delta = a.accuracy - b.accuracy;
  c.latency_ratio = b.latency == 0.0 ? 0.0 : a.latency / b.latency;
  c.ops_ratio = a.ops == 0.0 ? 0.0 : b.ops / a.ops;

  std::filesystem::create_directories(out_dir);
  io::Csv csv;
  csv.header = {"metric", "value"};
  csv.rows.push_back({"accuracy_delta_snn_minus_cnn", io::fmt_double(c.accuracy_delta)});
  csv.rows.push_back({"latency_ratio_snn_over_cnn", io::fmt_double(c.latency_ratio)});
  csv.rows.push_back({"ops_ratio_cnn_macs_over_snn_synops", io::fmt_double(c.ops_ratio)});
  io::write_csv(out_dir / "compare.csv", csv);
  return c;
}

}  // namespace satrrm::report
