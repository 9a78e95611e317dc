#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "satrrm/cnn.hpp"
#include "satrrm/encoding.hpp"
#include "satrrm/io.hpp"
#include "satrrm/linkbudget.hpp"
#include "satrrm/oracle.hpp"
#include "satrrm/snn.hpp"
#include "satrrm/traffic.hpp"

// One JSON run-config capturing every hyperparameter of the pipeline.
// Missing keys fall back to the defaults below, so a config file only needs
// the fields it overrides.

namespace satrrm::config {

struct DatasetParams {
  int samples = 4000;
  double train_frac = 0.8;
  double val_frac = 0.1;  // remainder is the test split
  std::uint64_t seed = 7;
  void validate() const;
};

struct LabelParams {
  double p_max_w = 115.0;
  double w_max_hz = 4e9;
  oracle::ObjectiveWeights weights;
  double min_support = 0.005;
  int threads = 1;
  void validate() const;
};

struct EncoderParams {
  std::string kind = "tem";  // "tem" or "rate"
  int steps = 8;
  encoding::PreprocessParams preprocess;  // percentile 99, pool stride 32
  encoding::TemParams tem;
  std::uint64_t rate_seed = 99;  // stream salt for the stochastic encoder
  void validate() const;
};

struct SnnParams {
  std::vector<int> hidden = {512, 256, 512};
  snn::NeuronParams neuron;
  snn::TrainHyper hyper;
  void validate() const;
};

struct CnnParams {
  encoding::PreprocessParams preprocess{99.0, 3};  // its own downsampling
  int conv1_filters = 8, conv2_filters = 4, kernel = 3, pool = 2;
  int dense1 = 512, dense2 = 256;
  cnn::SgdHyper hyper;
  void validate() const;
};

struct RunConfig {
  int threads = 1;
  linkbudget::SystemParams system;
  std::vector<linkbudget::Beam> beams;
  std::string table_mode = "reference";  // "reference" or "analytic"
  double modcod_margin_db = 0.1;
  std::vector<double> powers_dbw = {10.0, 12.0, 14.0};
  std::vector<double> bandwidths_hz = {250e6, 500e6};
  // anchor row used to fit extra_loss_db before building an analytic table
  double calib_power_dbw = 10.0;
  double calib_bandwidth_hz = 250e6;
  traffic::TrafficModel traffic;
  DatasetParams dataset;
  LabelParams label;
  EncoderParams encoder;
  SnnParams snn;
  CnnParams cnn;

  void validate() const;
  linkbudget::ModCodTable modcod() const;
  // Builds the allocator's table in the configured mode; analytic mode first
  // calibrates extra_loss_db against the reference anchor row.
  linkbudget::CapacityTable capacity_table() const;
};

RunConfig default_config();

io::json to_json(const RunConfig& cfg);
RunConfig from_json(const io::json& j);

RunConfig load(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace satrrm::config
