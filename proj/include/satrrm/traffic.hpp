#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "satrrm/linkbudget.hpp"

// Synthetic spatiotemporal demand: Gaussian population hotspots plus
// aeronautical / maritime corridor kernels, each class scaled by a 24-hour
// diurnal profile, with per-cell mean-one multiplicative lognormal noise.
//
// Grid layout: row-major, row 0 at lat_min (south edge), column 0 at lon_min;
// cell centers at (min + (i+0.5)*step). Values are Mbps per cell.
//
// Determinism: generate_grid(model, hour, seed) is bit-reproducible. The
// deterministic base field is evaluated first (kernels are truncated at 4
// sigma — that truncation is part of the model definition, shared by serial
// and parallel callers); noise factors are then consumed in row-major order,
// drawing only on cells with a positive base value.

namespace satrrm::traffic {

struct GridSpec {
  int rows = 640;
  int cols = 360;
  double lat_min = 35.0, lat_max = 60.0;
  double lon_min = -10.0, lon_max = 20.0;

  double lat_step() const { return (lat_max - lat_min) / rows; }
  double lon_step() const { return (lon_max - lon_min) / cols; }
  double cell_lat(int i) const { return lat_min + (i + 0.5) * lat_step(); }
  double cell_lon(int j) const { return lon_min + (j + 0.5) * lon_step(); }
  std::size_t cells() const { return static_cast<std::size_t>(rows) * cols; }
  void validate() const;
};

struct TrafficGrid {
  GridSpec spec;
  int hour = 0;
  std::vector<float> mbps;  // rows*cols, row-major

  double total_mbps() const;
};

struct Hotspot {
  double lat_deg, lon_deg;
  double peak_mbps;   // kernel amplitude at the center cell
  double sigma_deg;   // isotropic spread (longitude scaled by cos(lat))
};

struct RouteSegment {
  double lat1, lon1, lat2, lon2;
  double intensity_mbps;  // kernel amplitude on the segment axis
  double width_deg;       // gaussian cross-section sigma
};

struct DiurnalProfile {
  std::array<double, 24> mult{};
};

struct TrafficModel {
  GridSpec grid;
  std::vector<Hotspot> population;
  std::vector<RouteSegment> aero;
  std::vector<RouteSegment> maritime;
  DiurnalProfile population_diurnal;
  DiurnalProfile aero_diurnal;
  DiurnalProfile maritime_diurnal;
  double noise_sigma = 0.2;

  void validate() const;
  std::uint64_t hash() const;  // fingerprint of the canonical JSON form
};

TrafficModel default_model();

nlohmann::json model_to_json(const TrafficModel& model);
TrafficModel model_from_json(const nlohmann::json& j);

TrafficGrid generate_grid(const TrafficModel& model, int hour, std::uint64_t seed);

struct DemandVector {
  std::vector<double> bps;
};

// Nearest beam center per cell by great-circle distance, ties to the lowest
// beam id; returns the index into `beams` for each cell (row-major).
std::vector<std::uint8_t> assign_cells(const GridSpec& spec,
                                       const std::vector<linkbudget::Beam>& beams);

DemandVector aggregate_demand(const TrafficGrid& grid,
                              const std::vector<linkbudget::Beam>& beams);
// Variant reusing a precomputed assignment (the per-dataset hot path).
DemandVector aggregate_demand(const TrafficGrid& grid,
                              const std::vector<std::uint8_t>& assignment,
                              std::size_t n_beams);

}  // namespace satrrm::traffic
