#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "satrrm/traffic.hpp"

// Grid -> feature vector -> spike raster.
//
// Preprocess: clip above the p-th percentile (nearest-rank: the value at
// index ceil(p/100 * M) - 1 of the sorted grid), divide by the clipped max,
// non-overlapping ds x ds max-pool with floor truncation, row-major flatten.
//
// Encoders produce binary rasters of shape neurons x steps:
//  - rate: spike(i,t) ~ Bernoulli(x_i), seeded, draws consumed row-major;
//  - TEM: deterministic two-stage leaky integrator driven by x_i held
//    constant for all steps:
//      u_t = (1-alpha_u) u_{t-1} + x_i
//      v_t = (1-alpha_v) v_{t-1} + u_t
//      spike iff v_t - threshold >= 0 (inclusive), then v_t resets to 0.
//    Replica r scales both decays by 2^-r (geometric spacing, slower leak,
//    longer memory); rows are replica-major (row = r*N + i).

namespace satrrm::encoding {

struct SpikeRaster {
  int neurons = 0;
  int steps = 0;
  std::vector<std::uint8_t> bits;  // packed row-major, bit index = n*steps + t

  void resize(int n, int t);
  bool get(int n, int t) const {
    const std::size_t i = static_cast<std::size_t>(n) * steps + t;
    return (bits[i >> 3] >> (i & 7)) & 1u;
  }
  void set(int n, int t) {
    const std::size_t i = static_cast<std::size_t>(n) * steps + t;
    bits[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
  }
  std::uint64_t count() const;             // total spikes
  std::uint64_t row_count(int n) const;    // spikes of one neuron
};

struct PreprocessParams {
  double percentile = 99.0;
  int pool_stride = 32;
  void validate() const;
};

struct FeatureVector {
  int rows = 0, cols = 0;          // pooled dimensions
  std::vector<double> values;      // row-major, in [0,1]
};

FeatureVector preprocess(const traffic::TrafficGrid& grid, const PreprocessParams& params);

SpikeRaster rate_encode(const std::vector<double>& x, int steps, std::uint64_t seed);

struct TemParams {
  double alpha_u = 0.25;
  double alpha_v = 0.25;
  double threshold = 1.0;
  int replicas = 1;
  void validate() const;
};

SpikeRaster tem_encode(const std::vector<double>& x, int steps, const TemParams& params);

// Packed-bitfield dump with a JSON header {N, T, encoder, ...}.
void save_raster(const std::filesystem::path& path, const SpikeRaster& raster,
                 const nlohmann::json& encoder_info);
SpikeRaster load_raster(const std::filesystem::path& path,
                        nlohmann::json* encoder_info = nullptr);

}  // namespace satrrm::encoding
