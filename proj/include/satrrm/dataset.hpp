#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "satrrm/cnn.hpp"
#include "satrrm/config.hpp"
#include "satrrm/configspace.hpp"
#include "satrrm/encoding.hpp"
#include "satrrm/snn.hpp"
#include "satrrm/traffic.hpp"

// Dataset pipeline. A dataset directory contains small, text-first artifacts:
//
//   manifest.json  traffic model, per-sample hours, splits, hashes, version
//   demands.csv    sample_id, hour, per-beam demand (round-trip exact doubles)
//   labels.csv     sample_id, class_id            (after labeling)
//   catalog.csv/.json  class catalog              (after labeling)
//
// Traffic grids are NOT persisted: every grid regenerates bit-exactly from
// (model, hour, per-sample seed), all recorded in the manifest. The manifest
// instead stores a feature hash — FNV-1a over the per-sample grid FNVs in
// sample order — so two runs can be compared without shipping gigabytes.

namespace satrrm::dataset {

struct Paths {
  std::filesystem::path dir;
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path demands() const { return dir / "demands.csv"; }
  std::filesystem::path labels() const { return dir / "labels.csv"; }
  std::filesystem::path catalog_csv() const { return dir / "catalog.csv"; }
  std::filesystem::path catalog_json() const { return dir / "catalog.json"; }
};

struct GenSummary {
  int n = 0;
  std::uint64_t feature_hash = 0;
};

// Draws hours, generates grids (hashing them), aggregates demands, assigns
// splits, writes manifest + demands.csv.
GenSummary generate(const config::RunConfig& cfg, const std::filesystem::path& dir);

// Regenerates sample i's grid exactly as generate() produced it.
traffic::TrafficGrid sample_grid(const traffic::TrafficModel& model, std::uint64_t seed,
                                 int sample, int hour);

struct LabelSummary {
  int n_classes = 0;
  int relabeled = 0;  // samples whose exact optimum fell below min_support
};

// Solves every sample exhaustively, reduces classes by support, maps each
// sample to its catalog class (re-solving within the catalog when the exact
// optimum was pruned), writes labels.csv + catalog + manifest update.
LabelSummary label(const config::RunConfig& cfg, const std::filesystem::path& dir);

struct LoadedData {
  int n = 0;
  std::uint64_t seed = 0;
  traffic::TrafficModel model;
  std::vector<int> hours;
  std::vector<std::size_t> train_idx, val_idx, test_idx;
  std::vector<traffic::DemandVector> demands;
  std::uint64_t feature_hash = 0;
  // present when the directory has been labeled
  std::vector<int> labels;
  configspace::ClassCatalog catalog;
  int n_classes = 0;
};

// The manifest is authoritative for sample count, seed, and traffic model
// (the directory is self-describing; grids regenerate from recorded values).
// cfg only supplies the capacity table the stored catalog is checked against.
LoadedData load(const config::RunConfig& cfg, const std::filesystem::path& dir,
                bool need_labels);

// Regenerate + preprocess + encode the given samples (parallel over samples).
std::vector<encoding::SpikeRaster> encode_rasters(const config::EncoderParams& enc,
                                                  const LoadedData& data,
                                                  const std::vector<std::size_t>& indices,
                                                  int threads);

// train_idx/val_idx of the result point into the compacted raster array.
snn::EncodedDataset snn_train_dataset(const config::EncoderParams& enc,
                                      const LoadedData& data, int threads);

// Preprocessed images for the given samples, compacted in index order.
cnn::FeatureDataset cnn_features(const encoding::PreprocessParams& pp,
                                 const LoadedData& data,
                                 const std::vector<std::size_t>& indices, int threads);

cnn::FeatureDataset cnn_train_dataset(const config::CnnParams& par, const LoadedData& data,
                                      int threads);

}  // namespace satrrm::dataset
