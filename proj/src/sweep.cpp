#include "satrrm/sweep.hpp"

#include <algorithm>

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"
#include "satrrm/report.hpp"
#include "satrrm/svg.hpp"

namespace satrrm::sweep {

namespace {

const char* const kAxes[] = {"encoder", "steps", "pool_stride", "rho", "tem_threshold"};

bool is_numeric_axis(const std::string& axis) { return axis != "encoder"; }

config::RunConfig apply(const config::RunConfig& base, const std::string& axis,
                        const std::string& value) {
  config::RunConfig cfg = base;
  if (axis == "encoder") {
    cfg.encoder.kind = value;
  } else if (axis == "steps") {
    cfg.encoder.steps = static_cast<int>(io::parse_int(value));
  } else if (axis == "pool_stride") {
    cfg.encoder.preprocess.pool_stride = static_cast<int>(io::parse_int(value));
  } else if (axis == "rho") {
    cfg.snn.hyper.rho = io::parse_double(value);
  } else if (axis == "tem_threshold") {
    cfg.encoder.tem.threshold = io::parse_double(value);
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  cfg.validate();
  return cfg;
}

}  // namespace

void SweepSpec::validate() const {
  if (std::find(std::begin(kAxes), std::end(kAxes), axis) == std::end(kAxes))
    throw ConfigError("sweep axis must be one of encoder, steps, pool_stride, rho, "
                      "tem_threshold");
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (is_numeric_axis(axis)) {
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(io::parse_double(values[i - 1]) < io::parse_double(values[i])))
        throw ConfigError("sweep values must be sorted ascending");
  } else {
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i - 1] < values[i]))
        throw ConfigError("sweep values must be sorted ascending");
  }
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, const config::RunConfig& base,
                                  const dataset::LoadedData& data,
                                  const std::filesystem::path& out_dir) {
  spec.validate();
  if (data.labels.empty()) throw ConfigError("dataset has no labels");
  std::filesystem::create_directories(out_dir);

  std::vector<SweepPoint> points;
  for (const auto& value : spec.values) {
    const config::RunConfig cfg = apply(base, spec.axis, value);
    auto train_data = dataset::snn_train_dataset(cfg.encoder, data, cfg.threads);
    std::vector<int> sizes;
    sizes.push_back(train_data.rasters.front().neurons);
    for (int h : cfg.snn.hidden) sizes.push_back(h);
    sizes.push_back(data.n_classes);
    snn::LayeredSnn net = snn::make_network(sizes, cfg.snn.neuron, cfg.snn.hyper.seed);
    snn::TrainHyper hyper = cfg.snn.hyper;
    hyper.threads = cfg.threads;
    snn::train(net, train_data, hyper);

    const auto eval =
        report::evaluate_snn(net, cfg.encoder, data, data.test_idx, "test", cfg.threads);
    // input-layer spikes isolate the encoder's own sparsity
    double input_spikes = 0.0;
    {
      const auto rasters = dataset::encode_rasters(cfg.encoder, data, data.test_idx,
                                                   cfg.threads);
      for (const auto& raster : rasters) input_spikes += static_cast<double>(raster.count());
      input_spikes /= static_cast<double>(rasters.size());
    }
    SweepPoint pt;
    pt.value = value;
    pt.accuracy = eval.accuracy;
    pt.latency_seconds = eval.latency_seconds;
    pt.synops_per_example = eval.ops_per_example;
    pt.spikes_per_example = eval.spikes_per_example;
    pt.input_spikes_per_example = input_spikes;
    points.push_back(pt);
  }

  io::Csv csv;
  csv.header = {"axis", "value", "accuracy", "latency_seconds", "synops_per_example",
                "spikes_per_example", "input_spikes_per_example"};
  for (const auto& pt : points)
    csv.rows.push_back({spec.axis, pt.value, io::fmt_double(pt.accuracy),
                        io::fmt_double(pt.latency_seconds),
                        io::fmt_double(pt.synops_per_example),
                        io::fmt_double(pt.spikes_per_example),
                        io::fmt_double(pt.input_spikes_per_example)});
  io::write_csv(out_dir / "sweep.csv", csv);

  if (is_numeric_axis(spec.axis)) {
    svg::Series acc{"accuracy", {}}, ops{"synops/example", {}};
    for (const auto& pt : points) {
      const double x = io::parse_double(pt.value);
      acc.points.emplace_back(x, pt.accuracy);
      ops.points.emplace_back(x, pt.synops_per_example);
    }
    io::write_text_file(out_dir / "sweep_accuracy.svg",
                        svg::line_chart("accuracy vs " + spec.axis, spec.axis, "accuracy",
                                        {acc}));
    io::write_text_file(out_dir / "sweep_synops.svg",
                        svg::line_chart("synops vs " + spec.axis, spec.axis,
                                        "synops per example", {ops}));
  } else {
    std::vector<std::string> labels;
    std::vector<double> accs;
    for (const auto& pt : points) {
      labels.push_back(pt.value);
      accs.push_back(pt.accuracy);
    }
    io::write_text_file(out_dir / "sweep_accuracy.svg",
                        svg::bar_chart("accuracy by " + spec.axis, "accuracy", labels, accs));
  }
  return points;
}

}  // namespace satrrm::sweep
