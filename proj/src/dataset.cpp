#include "satrrm/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"
#include "satrrm/oracle.hpp"
#include "satrrm/parallel.hpp"
#include "satrrm/rng.hpp"
#include "satrrm/version.hpp"

namespace satrrm::dataset {

namespace {

constexpr std::uint64_t kHourSalt = 0x2ee7a1;
constexpr std::uint64_t kGridSalt = 0x8b44c9;
constexpr std::uint64_t kSplitSalt = 0xd105f3;
constexpr std::uint64_t kRateSalt = 0x41be70;

std::uint64_t grid_hash(const traffic::TrafficGrid& grid) {
  return fnv1a64(grid.mbps.data(), grid.mbps.size() * sizeof(float));
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

traffic::TrafficGrid sample_grid(const traffic::TrafficModel& model, std::uint64_t seed,
                                 int sample, int hour) {
  return traffic::generate_grid(model, hour, sample_seed(seed, sample, kGridSalt));
}

GenSummary generate(const config::RunConfig& cfg, const std::filesystem::path& dir) {
  cfg.validate();
  std::filesystem::create_directories(dir);
  const Paths paths{dir};
  const int n = cfg.dataset.samples;
  const std::uint64_t seed = cfg.dataset.seed;

  std::vector<int> hours(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(sample_seed(seed, i, kHourSalt));
    hours[i] = static_cast<int>(rng.below(24));
  }

  const auto assignment = traffic::assign_cells(cfg.traffic.grid, cfg.beams);
  std::vector<traffic::DemandVector> demands(n);
  std::vector<std::uint64_t> hashes(n);
  parallel_for(n, cfg.threads, [&](std::int64_t i) {
    const traffic::TrafficGrid grid = sample_grid(cfg.traffic, seed, static_cast<int>(i),
                                                  hours[i]);
    hashes[i] = grid_hash(grid);
    demands[i] = traffic::aggregate_demand(grid, assignment, cfg.beams.size());
  });
  const std::uint64_t feature_hash = fnv1a64(hashes.data(), hashes.size() * sizeof(std::uint64_t));

  // split assignment: one seeded shuffle, then contiguous cuts
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(sample_seed(seed, 0, kSplitSalt));
  split_rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(cfg.dataset.train_frac * n);
  const auto n_val = static_cast<std::size_t>(cfg.dataset.val_frac * n);
  std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> val(order.begin() + n_train, order.begin() + n_train + n_val);
  std::vector<std::size_t> test(order.begin() + n_train + n_val, order.end());
  if (test.empty()) throw ConfigError("split fractions left no test samples");

  io::Csv csv;
  csv.header = {"sample_id", "hour"};
  for (const auto& b : cfg.beams) csv.header.push_back("demand_bps_" + std::to_string(b.id));
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i), std::to_string(hours[i])};
    for (double d : demands[i].bps) row.push_back(io::fmt_double(d));
    csv.rows.push_back(std::move(row));
  }
  io::write_csv(paths.demands(), csv);

  io::json manifest;
  manifest["version"] = kVersion;
  manifest["samples"] = n;
  manifest["seed"] = seed;
  manifest["traffic_model"] = traffic::model_to_json(cfg.traffic);
  manifest["traffic_model_hash"] = cfg.traffic.hash();
  manifest["hours"] = hours;
  manifest["splits"] = {{"train", sorted(train)}, {"val", sorted(val)}, {"test", sorted(test)}};
  manifest["feature_hash"] = feature_hash;
  manifest["beams"] = io::json::array();
  for (const auto& b : cfg.beams)
    manifest["beams"].push_back({{"id", b.id}, {"lat", b.center_lat_deg}, {"lon", b.center_lon_deg}});
  manifest["labeled"] = false;
  io::write_json_file(paths.manifest(), manifest);

  return {n, feature_hash};
}

LabelSummary label(const config::RunConfig& cfg, const std::filesystem::path& dir) {
  const Paths paths{dir};
  LoadedData data = load(cfg, dir, false);
  const auto table = cfg.capacity_table();
  const auto space = configspace::build_feasible_set(
      static_cast<int>(cfg.beams.size()), table, cfg.label.p_max_w, cfg.label.w_max_hz,
      cfg.threads);

  const int n = data.n;
  std::vector<oracle::SolveResult> solutions(n);
  parallel_for(n, cfg.threads, [&](std::int64_t i) {
    solutions[i] = oracle::solve_exhaustive(data.demands[i], space, cfg.label.weights, 1);
  });

  std::vector<configspace::PayloadConfig> optima;
  optima.reserve(n);
  for (const auto& s : solutions) optima.push_back(configspace::make_config(s.rows, table));

  configspace::ClassCatalog catalog =
      configspace::reduce_classes(optima, cfg.label.min_support);
  catalog.p_max_w = cfg.label.p_max_w;
  catalog.w_max_hz = cfg.label.w_max_hz;
  catalog.validate();

  LabelSummary summary;
  summary.n_classes = static_cast<int>(catalog.classes.size());
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    int cls = catalog.find(solutions[i].rows);
    if (cls < 0) {
      cls = static_cast<int>(oracle::solve_catalog(data.demands[i], catalog,
                                                   cfg.label.weights).index);
      ++summary.relabeled;
    }
    labels[i] = cls;
  }

  io::Csv csv;
  csv.header = {"sample_id", "class_id"};
  for (int i = 0; i < n; ++i)
    csv.rows.push_back({std::to_string(i), std::to_string(labels[i])});
  io::write_csv(paths.labels(), csv);
  configspace::save_catalog(paths.catalog_csv(), paths.catalog_json(), catalog, cfg.beams);

  io::json manifest = io::read_json_file(paths.manifest());
  manifest["labeled"] = true;
  manifest["n_classes"] = summary.n_classes;
  manifest["relabeled"] = summary.relabeled;
  manifest["label_params"] = {{"p_max_w", cfg.label.p_max_w},
                              {"w_max_hz", cfg.label.w_max_hz},
                              {"beta0_per_bps", cfg.label.weights.beta0_per_bps},
                              {"beta1_per_w", cfg.label.weights.beta1_per_w},
                              {"beta2_per_hz", cfg.label.weights.beta2_per_hz},
                              {"min_support", cfg.label.min_support}};
  io::json supports = io::json::array();
  for (auto s : catalog.support) supports.push_back(s);
  manifest["class_support"] = supports;
  io::write_json_file(paths.manifest(), manifest);
  return summary;
}

LoadedData load(const config::RunConfig& cfg, const std::filesystem::path& dir,
                bool need_labels) {
  const Paths paths{dir};
  const io::json manifest = io::read_json_file(paths.manifest());
  LoadedData data;
  data.n = manifest.at("samples").get<int>();
  data.seed = manifest.at("seed").get<std::uint64_t>();
  data.model = traffic::model_from_json(manifest.at("traffic_model"));
  if (data.model.hash() != manifest.at("traffic_model_hash").get<std::uint64_t>())
    throw ConfigError("manifest traffic model does not match its recorded hash");
  data.hours = manifest.at("hours").get<std::vector<int>>();
  data.train_idx = manifest.at("splits").at("train").get<std::vector<std::size_t>>();
  data.val_idx = manifest.at("splits").at("val").get<std::vector<std::size_t>>();
  data.test_idx = manifest.at("splits").at("test").get<std::vector<std::size_t>>();
  data.feature_hash = manifest.at("feature_hash").get<std::uint64_t>();
  if (static_cast<int>(data.hours.size()) != data.n)
    throw ConfigError("manifest hour list does not match sample count");

  const io::Csv csv = io::read_csv(paths.demands());
  if (static_cast<int>(csv.rows.size()) != data.n)
    throw ConfigError("demands.csv row count does not match manifest");
  if (csv.header.size() < 3 || csv.header[0] != "sample_id" || csv.header[1] != "hour")
    throw ConfigError("demands.csv has an unexpected header");
  const std::size_t n_beams = csv.header.size() - 2;
  data.demands.resize(data.n);
  for (int i = 0; i < data.n; ++i) {
    const auto& row = csv.rows[i];
    if (io::parse_int(row[0]) != i) throw ConfigError("demands.csv rows out of order");
    if (io::parse_int(row[1]) != data.hours[i])
      throw ConfigError("demands.csv hour disagrees with manifest");
    data.demands[i].bps.resize(n_beams);
    for (std::size_t b = 0; b < n_beams; ++b)
      data.demands[i].bps[b] = io::parse_double(row[2 + b]);
  }

  const bool labeled = manifest.value("labeled", false);
  if (need_labels && !labeled)
    throw ConfigError(dir.string() + " has no labels yet; run the label step first");
  if (labeled) {
    data.n_classes = manifest.at("n_classes").get<int>();
    const io::Csv lab = io::read_csv(paths.labels());
    if (static_cast<int>(lab.rows.size()) != data.n)
      throw ConfigError("labels.csv row count does not match manifest");
    data.labels.resize(data.n);
    for (int i = 0; i < data.n; ++i) {
      if (io::parse_int(lab.rows[i][0]) != i) throw ConfigError("labels.csv rows out of order");
      data.labels[i] = static_cast<int>(io::parse_int(lab.rows[i][1]));
      if (data.labels[i] < 0 || data.labels[i] >= data.n_classes)
        throw ConfigError("labels.csv class id out of range");
    }
    data.catalog = configspace::load_catalog(paths.catalog_csv(), paths.catalog_json(),
                                             cfg.capacity_table());
  }
  return data;
}

std::vector<encoding::SpikeRaster> encode_rasters(const config::EncoderParams& enc,
                                                  const LoadedData& data,
                                                  const std::vector<std::size_t>& indices,
                                                  int threads) {
  enc.validate();
  std::vector<encoding::SpikeRaster> rasters(indices.size());
  parallel_for(static_cast<std::int64_t>(indices.size()), threads, [&](std::int64_t k) {
    const std::size_t i = indices[k];
    const auto grid = sample_grid(data.model, data.seed, static_cast<int>(i), data.hours[i]);
    const auto feat = encoding::preprocess(grid, enc.preprocess);
    if (enc.kind == "tem") {
      rasters[k] = encoding::tem_encode(feat.values, enc.steps, enc.tem);
    } else {
      rasters[k] = encoding::rate_encode(feat.values, enc.steps,
                                         sample_seed(enc.rate_seed, i, kRateSalt));
    }
  });
  return rasters;
}

snn::EncodedDataset snn_train_dataset(const config::EncoderParams& enc,
                                      const LoadedData& data, int threads) {
  if (data.labels.empty()) throw ConfigError("dataset has no labels");
  std::vector<std::size_t> indices = data.train_idx;
  indices.insert(indices.end(), data.val_idx.begin(), data.val_idx.end());
  snn::EncodedDataset out;
  out.rasters = encode_rasters(enc, data, indices, threads);
  out.labels.resize(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) out.labels[k] = data.labels[indices[k]];
  out.n_classes = data.n_classes;
  out.train_idx.resize(data.train_idx.size());
  std::iota(out.train_idx.begin(), out.train_idx.end(), std::size_t{0});
  out.val_idx.resize(data.val_idx.size());
  std::iota(out.val_idx.begin(), out.val_idx.end(), data.train_idx.size());
  out.validate();
  return out;
}

cnn::FeatureDataset cnn_features(const encoding::PreprocessParams& pp, const LoadedData& data,
                                 const std::vector<std::size_t>& indices, int threads) {
  pp.validate();
  if (data.labels.empty()) throw ConfigError("dataset has no labels");
  if (indices.empty()) throw ConfigError("empty sample index list");
  cnn::FeatureDataset out;
  out.n_classes = data.n_classes;
  out.labels.resize(indices.size());
  // one probe sample fixes the pooled dimensions
  {
    const auto grid = sample_grid(data.model, data.seed, static_cast<int>(indices.at(0)),
                                  data.hours[indices.at(0)]);
    const auto feat = encoding::preprocess(grid, pp);
    out.rows = feat.rows;
    out.cols = feat.cols;
  }
  out.features.resize(indices.size() * static_cast<std::size_t>(out.rows) * out.cols);
  parallel_for(static_cast<std::int64_t>(indices.size()), threads, [&](std::int64_t k) {
    const std::size_t i = indices[k];
    const auto grid = sample_grid(data.model, data.seed, static_cast<int>(i), data.hours[i]);
    const auto feat = encoding::preprocess(grid, pp);
    float* dst = out.features.data() + k * static_cast<std::size_t>(out.rows) * out.cols;
    for (std::size_t j = 0; j < feat.values.size(); ++j)
      dst[j] = static_cast<float>(feat.values[j]);
    out.labels[k] = data.labels[i];
  });
  return out;
}

cnn::FeatureDataset cnn_train_dataset(const config::CnnParams& par, const LoadedData& data,
                                      int threads) {
  std::vector<std::size_t> indices = data.train_idx;
  indices.insert(indices.end(), data.val_idx.begin(), data.val_idx.end());
  cnn::FeatureDataset out = cnn_features(par.preprocess, data, indices, threads);
  out.train_idx.resize(data.train_idx.size());
  std::iota(out.train_idx.begin(), out.train_idx.end(), std::size_t{0});
  out.val_idx.resize(data.val_idx.size());
  std::iota(out.val_idx.begin(), out.val_idx.end(), data.train_idx.size());
  out.validate();
  return out;
}

}  // namespace satrrm::dataset
