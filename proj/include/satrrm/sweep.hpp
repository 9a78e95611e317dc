#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "satrrm/config.hpp"
#include "satrrm/dataset.hpp"

// Hyperparameter sweeps around the reference spiking model: one axis varies,
// everything else stays at the run-config values. Each point trains a fresh
// network and evaluates it on the test split.

namespace satrrm::sweep {

// axis: encoder | steps | pool_stride | rho | tem_threshold
struct SweepSpec {
  std::string axis;
  std::vector<std::string> values;  // parsed per axis; must be sorted ascending
  void validate() const;
};

struct SweepPoint {
  std::string value;
  double accuracy = 0.0;
  double latency_seconds = 0.0;
  double synops_per_example = 0.0;
  double spikes_per_example = 0.0;
  double input_spikes_per_example = 0.0;
};

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, const config::RunConfig& cfg,
                                  const dataset::LoadedData& data,
                                  const std::filesystem::path& out_dir);

}  // namespace satrrm::sweep
