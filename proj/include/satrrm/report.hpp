#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "satrrm/cnn.hpp"
#include "satrrm/config.hpp"
#include "satrrm/dataset.hpp"
#include "satrrm/metrics.hpp"
#include "satrrm/snn.hpp"

// Test-split evaluation and report emission. A report directory contains
// report.csv (metric,value rows), confusion.csv, roc_<class>.csv, SVG charts,
// and a manifest identifying the model kind and the evaluated split (hash of
// the sample ids) so that two reports can be compared safely.

namespace satrrm::report {

struct EvalResult {
  std::string model_kind;  // "snn" or "cnn"
  std::string split_name;
  std::uint64_t split_hash = 0;  // FNV over the evaluated sample ids
  std::vector<int> truth, pred;
  std::vector<std::vector<double>> scores;  // spike rates or probabilities
  metrics::Confusion confusion;
  std::vector<metrics::ClassStats> per_class;
  std::vector<metrics::RocCurve> roc;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double macro_auc = 0.0;
  double capacity_gap_bps = 0.0;
  double latency_seconds = 0.0;   // mean single-example inference time
  double ops_per_example = 0.0;   // mean synops (snn) or fixed MACs (cnn)
  std::string ops_kind;           // "synops" or "macs"
  double spikes_per_example = 0.0;  // snn only
};

EvalResult evaluate_snn(const snn::LayeredSnn& net, const config::EncoderParams& enc,
                        const dataset::LoadedData& data,
                        const std::vector<std::size_t>& indices,
                        const std::string& split_name, int threads);

EvalResult evaluate_cnn(const cnn::CnnModel& model, const encoding::PreprocessParams& pp,
                        const dataset::LoadedData& data,
                        const std::vector<std::size_t>& indices,
                        const std::string& split_name, int threads);

void write_report(const std::filesystem::path& dir, const EvalResult& result);

struct Comparison {
  double accuracy_delta = 0.0;  // snn - cnn
  double latency_ratio = 0.0;   // snn / cnn
  double ops_ratio = 0.0;       // cnn MACs / snn synops (>1: spiking advantage)
};

// Reads two report directories (one snn, one cnn); throws ConfigError when
// the splits differ. Writes compare.csv into out_dir.
Comparison compare_models(const std::filesystem::path& snn_dir,
                          const std::filesystem::path& cnn_dir,
                          const std::filesystem::path& out_dir);

std::uint64_t split_hash(const std::vector<std::size_t>& indices);

}  // namespace satrrm::report
