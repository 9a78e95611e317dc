#include "satrrm/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"
#include "satrrm/rng.hpp"

namespace satrrm::encoding {

void SpikeRaster::resize(int n, int t) {
  if (n < 0 || t < 1) throw std::invalid_argument("bad raster shape");
  neurons = n;
  steps = t;
  bits.assign((static_cast<std::size_t>(n) * t + 7) / 8, 0);
}

std::uint64_t SpikeRaster::count() const {
  std::uint64_t c = 0;
  for (std::uint8_t b : bits) c += static_cast<unsigned>(std::popcount(b));
  return c;
}

std::uint64_t SpikeRaster::row_count(int n) const {
  std::uint64_t c = 0;
  for (int t = 0; t < steps; ++t) c += get(n, t);
  return c;
}

void PreprocessParams::validate() const {
  if (!(percentile > 0) || percentile > 100)
    throw std::invalid_argument("percentile must be in (0, 100]");
  if (pool_stride < 1) throw std::invalid_argument("pool stride must be >= 1");
}

FeatureVector preprocess(const traffic::TrafficGrid& grid, const PreprocessParams& params) {
  params.validate();
  const int m = grid.spec.rows, n = grid.spec.cols;
  const int ds = params.pool_stride;
  if (ds > std::min(m, n)) throw std::invalid_argument("pool stride exceeds grid size");
  if (grid.mbps.size() != grid.spec.cells())
    throw std::invalid_argument("grid values do not match declared shape");

  std::vector<double> v(grid.mbps.begin(), grid.mbps.end());

  // Nearest-rank percentile of the raw grid.
  std::vector<double> sorted = v;
  const std::size_t total = sorted.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(params.percentile / 100.0 * static_cast<double>(total)));
  rank = std::min(std::max<std::size_t>(rank, 1), total);
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  const double clip = sorted[rank - 1];

  double max_v = 0.0;
  for (double& x : v) {
    x = std::min(x, clip);
    max_v = std::max(max_v, x);
  }
  if (max_v > 0.0)
    for (double& x : v) x /= max_v;

  FeatureVector f;
  f.rows = m / ds;
  f.cols = n / ds;
  f.values.resize(static_cast<std::size_t>(f.rows) * f.cols);
  for (int oi = 0; oi < f.rows; ++oi) {
    for (int oj = 0; oj < f.cols; ++oj) {
      double best = 0.0;
      for (int di = 0; di < ds; ++di) {
        const double* row = v.data() + static_cast<std::size_t>(oi * ds + di) * n + oj * ds;
        for (int dj = 0; dj < ds; ++dj) best = std::max(best, row[dj]);
      }
      f.values[static_cast<std::size_t>(oi) * f.cols + oj] = best;
    }
  }
  return f;
}

SpikeRaster rate_encode(const std::vector<double>& x, int steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("rate inputs must lie in [0,1]");
  SpikeRaster r;
  r.resize(static_cast<int>(x.size()), steps);
  Rng rng(seed);
  for (std::size_t n = 0; n < x.size(); ++n)
    for (int t = 0; t < steps; ++t)
      if (rng.bernoulli(x[n])) r.set(static_cast<int>(n), t);
  return r;
}

void TemParams::validate() const {
  if (!(alpha_u > 0 && alpha_u < 1) || !(alpha_v > 0 && alpha_v < 1))
    throw std::invalid_argument("tem decay rates must be in (0,1)");
  if (!(threshold > 0)) throw std::invalid_argument("tem threshold must be > 0");
  if (replicas < 1) throw std::invalid_argument("tem replicas must be >= 1");
}

SpikeRaster tem_encode(const std::vector<double>& x, int steps, const TemParams& params) {
  params.validate();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  const int n = static_cast<int>(x.size());
  SpikeRaster r;
  r.resize(n * params.replicas, steps);
  for (int rep = 0; rep < params.replicas; ++rep) {
    const double scale = std::pow(2.0, -rep);
    const double au = params.alpha_u * scale;
    const double av = params.alpha_v * scale;
    for (int i = 0; i < n; ++i) {
      double u = 0.0, v = 0.0;
      for (int t = 0; t < steps; ++t) {
        u = (1.0 - au) * u + x[static_cast<std::size_t>(i)];
        v = (1.0 - av) * v + u;
        if (v - params.threshold >= 0.0) {
          r.set(rep * n + i, t);
          v = 0.0;
        }
      }
    }
  }
  return r;
}

void save_raster(const std::filesystem::path& path, const SpikeRaster& raster,
                 const nlohmann::json& encoder_info) {
  nlohmann::json header;
  header["N"] = raster.neurons;
  header["T"] = raster.steps;
  header["encoder"] = encoder_info;
  io::write_blob(path, header, {{"spikes", raster.bits}});
}

SpikeRaster load_raster(const std::filesystem::path& path, nlohmann::json* encoder_info) {
  io::Blocks blocks;
  const nlohmann::json header = io::read_blob(path, &blocks);
  SpikeRaster r;
  r.resize(header.at("N").get<int>(), header.at("T").get<int>());
  if (blocks.empty() || blocks[0].second.size() != r.bits.size())
    throw ConfigError(path.string() + ": spike block size mismatch");
  r.bits = blocks[0].second;
  if (encoder_info) *encoder_info = header.at("encoder");
  return r;
}

}  // namespace satrrm::encoding
