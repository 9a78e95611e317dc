#include "satrrm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "satrrm/common.hpp"
#include "satrrm/rng.hpp"

namespace satrrm::traffic {

namespace {

constexpr double kDegToRad = linkbudget::kPi / 180.0;
constexpr double kKernelCutoffSigmas = 4.0;  // part of the model definition

double clamped_cos(double lat_deg) {
  return std::max(0.05, std::cos(lat_deg * kDegToRad));
}

double point_segment_dist(double px, double py, double x1, double y1, double x2,
                          double y2) {
  const double dx = x2 - x1, dy = y2 - y1;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0) t = std::clamp(((px - x1) * dx + (py - y1) * dy) / len2, 0.0, 1.0);
  const double ex = x1 + t * dx - px;
  const double ey = y1 + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

void add_hotspot(std::vector<double>& base, const GridSpec& g, const Hotspot& h,
                 double mult) {
  const double amp = h.peak_mbps * mult;
  if (amp <= 0) return;
  const double cut = kKernelCutoffSigmas * h.sigma_deg;
  const double c = clamped_cos(h.lat_deg);
  const int i0 = std::max(0, static_cast<int>(std::floor((h.lat_deg - cut - g.lat_min) / g.lat_step())));
  const int i1 = std::min(g.rows - 1, static_cast<int>(std::ceil((h.lat_deg + cut - g.lat_min) / g.lat_step())));
  const int j0 = std::max(0, static_cast<int>(std::floor((h.lon_deg - cut / c - g.lon_min) / g.lon_step())));
  const int j1 = std::min(g.cols - 1, static_cast<int>(std::ceil((h.lon_deg + cut / c - g.lon_min) / g.lon_step())));
  if (i0 > i1 || j0 > j1) return;

  // Separable kernel: weight(i,j) = wr(i)*wc(j).
  std::vector<double> wr(static_cast<std::size_t>(i1 - i0 + 1));
  std::vector<double> wc(static_cast<std::size_t>(j1 - j0 + 1));
  for (int i = i0; i <= i1; ++i) {
    const double d = (g.cell_lat(i) - h.lat_deg) / h.sigma_deg;
    wr[static_cast<std::size_t>(i - i0)] = std::abs(d) <= kKernelCutoffSigmas ? std::exp(-0.5 * d * d) : 0.0;
  }
  for (int j = j0; j <= j1; ++j) {
    const double d = c * (g.cell_lon(j) - h.lon_deg) / h.sigma_deg;
    wc[static_cast<std::size_t>(j - j0)] = std::abs(d) <= kKernelCutoffSigmas ? std::exp(-0.5 * d * d) : 0.0;
  }
  for (int i = i0; i <= i1; ++i) {
    const double row_w = amp * wr[static_cast<std::size_t>(i - i0)];
    if (row_w == 0.0) continue;
    double* row = base.data() + static_cast<std::size_t>(i) * g.cols;
    for (int j = j0; j <= j1; ++j) row[j] += row_w * wc[static_cast<std::size_t>(j - j0)];
  }
}

void add_segment(std::vector<double>& base, const GridSpec& g, const RouteSegment& s,
                 double mult) {
  const double amp = s.intensity_mbps * mult;
  if (amp <= 0) return;
  const double cut = kKernelCutoffSigmas * s.width_deg;
  const double c = clamped_cos(0.5 * (s.lat1 + s.lat2));
  const double lat_lo = std::min(s.lat1, s.lat2) - cut;
  const double lat_hi = std::max(s.lat1, s.lat2) + cut;
  const double lon_lo = std::min(s.lon1, s.lon2) - cut / c;
  const double lon_hi = std::max(s.lon1, s.lon2) + cut / c;
  const int i0 = std::max(0, static_cast<int>(std::floor((lat_lo - g.lat_min) / g.lat_step())));
  const int i1 = std::min(g.rows - 1, static_cast<int>(std::ceil((lat_hi - g.lat_min) / g.lat_step())));
  const int j0 = std::max(0, static_cast<int>(std::floor((lon_lo - g.lon_min) / g.lon_step())));
  const int j1 = std::min(g.cols - 1, static_cast<int>(std::ceil((lon_hi - g.lon_min) / g.lon_step())));

  // Equirectangular plane scaled by cos(mid latitude): x = lon*c, y = lat.
  const double x1 = s.lon1 * c, y1 = s.lat1;
  const double x2 = s.lon2 * c, y2 = s.lat2;
  for (int i = i0; i <= i1; ++i) {
    const double py = g.cell_lat(i);
    double* row = base.data() + static_cast<std::size_t>(i) * g.cols;
    for (int j = j0; j <= j1; ++j) {
      const double px = g.cell_lon(j) * c;
      const double d = point_segment_dist(px, py, x1, y1, x2, y2) / s.width_deg;
      if (d <= kKernelCutoffSigmas) row[j] += amp * std::exp(-0.5 * d * d);
    }
  }
}

void validate_segments(const std::vector<RouteSegment>& segs, const char* what) {
  for (const RouteSegment& s : segs) {
    if (s.intensity_mbps < 0) throw std::invalid_argument(std::string(what) + " intensity must be >= 0");
    if (!(s.width_deg > 0)) throw std::invalid_argument(std::string(what) + " width must be > 0");
  }
}

}  // namespace

void GridSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (!(lat_max > lat_min) || !(lon_max > lon_min))
    throw std::invalid_argument("grid bounding box is degenerate");
  if (lat_min < -90 || lat_max > 90 || lon_min < -180 || lon_max > 180)
    throw std::invalid_argument("grid bounding box out of range");
}

double TrafficGrid::total_mbps() const {
  double sum = 0.0;
  for (float v : mbps) sum += v;
  return sum;
}

void TrafficModel::validate() const {
  grid.validate();
  for (const Hotspot& h : population) {
    if (h.peak_mbps < 0) throw std::invalid_argument("hotspot peak must be >= 0");
    if (!(h.sigma_deg > 0)) throw std::invalid_argument("hotspot sigma must be > 0");
  }
  validate_segments(aero, "aero route");
  validate_segments(maritime, "maritime lane");
  for (int h = 0; h < 24; ++h) {
    if (population_diurnal.mult[h] < 0 || aero_diurnal.mult[h] < 0 ||
        maritime_diurnal.mult[h] < 0)
      throw std::invalid_argument("diurnal multipliers must be >= 0");
  }
  if (noise_sigma < 0) throw std::invalid_argument("noise sigma must be >= 0");
}

std::uint64_t TrafficModel::hash() const {
  const std::string dump = model_to_json(*this).dump();
  return fnv1a64(dump.data(), dump.size());
}

TrafficGrid generate_grid(const TrafficModel& model, int hour, std::uint64_t seed) {
  model.validate();
  if (hour < 0 || hour > 23) throw std::invalid_argument("hour must be in 0..23");
  const GridSpec& g = model.grid;

  std::vector<double> base(g.cells(), 0.0);
  for (const Hotspot& h : model.population)
    add_hotspot(base, g, h, model.population_diurnal.mult[hour]);
  for (const RouteSegment& s : model.aero)
    add_segment(base, g, s, model.aero_diurnal.mult[hour]);
  for (const RouteSegment& s : model.maritime)
    add_segment(base, g, s, model.maritime_diurnal.mult[hour]);

  TrafficGrid grid;
  grid.spec = g;
  grid.hour = hour;
  grid.mbps.resize(g.cells());
  Rng rng(seed);
  for (std::size_t idx = 0; idx < base.size(); ++idx) {
    if (base[idx] > 0.0) {
      const double v = base[idx] * rng.lognormal_unit_mean(model.noise_sigma);
      grid.mbps[idx] = static_cast<float>(std::max(0.0, v));
    } else {
      grid.mbps[idx] = 0.0f;
    }
  }
  return grid;
}

std::vector<std::uint8_t> assign_cells(const GridSpec& spec,
                                       const std::vector<linkbudget::Beam>& beams) {
  spec.validate();
  linkbudget::validate_beams(beams);
  if (beams.size() > 255) throw std::invalid_argument("too many beams");

  struct BeamTrig {
    double lat_rad, cos_lat, lon_rad;
    int id;
  };
  std::vector<BeamTrig> bt;
  bt.reserve(beams.size());
  for (const auto& b : beams)
    bt.push_back({b.center_lat_deg * kDegToRad, std::cos(b.center_lat_deg * kDegToRad),
                  b.center_lon_deg * kDegToRad, b.id});

  std::vector<std::uint8_t> assign(spec.cells());
  std::size_t idx = 0;
  for (int i = 0; i < spec.rows; ++i) {
    const double lat = spec.cell_lat(i) * kDegToRad;
    const double cos_lat = std::cos(lat);
    for (int j = 0; j < spec.cols; ++j, ++idx) {
      const double lon = spec.cell_lon(j) * kDegToRad;
      double best = 2.0;  // haversine term is <= 1
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < bt.size(); ++k) {
        // haversine term sin^2(dlat/2) + cos(lat1)cos(lat2)sin^2(dlon/2) is
        // monotone in the central angle, so it compares directly.
        const double half_dlat_sin = std::sin(0.5 * (lat - bt[k].lat_rad));
        const double half_dlon_sin = std::sin(0.5 * (lon - bt[k].lon_rad));
        const double h = half_dlat_sin * half_dlat_sin +
                         cos_lat * bt[k].cos_lat * half_dlon_sin * half_dlon_sin;
        if (h < best || (h == best && bt[k].id < bt[best_k].id)) {
          best = h;
          best_k = k;
        }
      }
      assign[idx] = static_cast<std::uint8_t>(best_k);
    }
  }
  return assign;
}

DemandVector aggregate_demand(const TrafficGrid& grid,
                              const std::vector<linkbudget::Beam>& beams) {
  return aggregate_demand(grid, assign_cells(grid.spec, beams), beams.size());
}

DemandVector aggregate_demand(const TrafficGrid& grid,
                              const std::vector<std::uint8_t>& assignment,
                              std::size_t n_beams) {
  if (assignment.size() != grid.mbps.size())
    throw std::invalid_argument("cell assignment does not match grid size");
  DemandVector d;
  d.bps.assign(n_beams, 0.0);
  for (std::size_t idx = 0; idx < assignment.size(); ++idx) {
    const std::uint8_t b = assignment[idx];
    if (b >= n_beams) throw std::invalid_argument("assignment references unknown beam");
    d.bps[b] += grid.mbps[idx];
  }
  for (double& v : d.bps) v *= 1e6;  // Mbps -> bps
  return d;
}

nlohmann::json model_to_json(const TrafficModel& m) {
  nlohmann::json j;
  j["grid"] = {{"rows", m.grid.rows},       {"cols", m.grid.cols},
               {"lat_min", m.grid.lat_min}, {"lat_max", m.grid.lat_max},
               {"lon_min", m.grid.lon_min}, {"lon_max", m.grid.lon_max}};
  auto hotspots = nlohmann::json::array();
  for (const Hotspot& h : m.population)
    hotspots.push_back({h.lat_deg, h.lon_deg, h.peak_mbps, h.sigma_deg});
  j["population"] = hotspots;
  auto seg_json = [](const std::vector<RouteSegment>& segs) {
    auto arr = nlohmann::json::array();
    for (const RouteSegment& s : segs)
      arr.push_back({s.lat1, s.lon1, s.lat2, s.lon2, s.intensity_mbps, s.width_deg});
    return arr;
  };
  j["aero"] = seg_json(m.aero);
  j["maritime"] = seg_json(m.maritime);
  j["population_diurnal"] = m.population_diurnal.mult;
  j["aero_diurnal"] = m.aero_diurnal.mult;
  j["maritime_diurnal"] = m.maritime_diurnal.mult;
  j["noise_sigma"] = m.noise_sigma;
  return j;
}

TrafficModel model_from_json(const nlohmann::json& j) {
  TrafficModel m;
  const auto& g = j.at("grid");
  m.grid.rows = g.at("rows").get<int>();
  m.grid.cols = g.at("cols").get<int>();
  m.grid.lat_min = g.at("lat_min").get<double>();
  m.grid.lat_max = g.at("lat_max").get<double>();
  m.grid.lon_min = g.at("lon_min").get<double>();
  m.grid.lon_max = g.at("lon_max").get<double>();
  for (const auto& h : j.at("population"))
    m.population.push_back({h.at(0).get<double>(), h.at(1).get<double>(),
                            h.at(2).get<double>(), h.at(3).get<double>()});
  auto seg_parse = [](const nlohmann::json& arr) {
    std::vector<RouteSegment> segs;
    for (const auto& s : arr)
      segs.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>(),
                      s.at(3).get<double>(), s.at(4).get<double>(), s.at(5).get<double>()});
    return segs;
  };
  m.aero = seg_parse(j.at("aero"));
  m.maritime = seg_parse(j.at("maritime"));
  m.population_diurnal.mult = j.at("population_diurnal").get<std::array<double, 24>>();
  m.aero_diurnal.mult = j.at("aero_diurnal").get<std::array<double, 24>>();
  m.maritime_diurnal.mult = j.at("maritime_diurnal").get<std::array<double, 24>>();
  m.noise_sigma = j.at("noise_sigma").get<double>();
  m.validate();
  return m;
}

TrafficModel default_model() {
  TrafficModel m;
  // Population centers feeding the eight service beams (peak Mbps per cell,
  // isotropic sigma in degrees).
  m.population = {
      {40.42, -3.70, 0.30, 0.75},  // Madrid
      {38.72, -9.14, 0.19, 0.60},  // Lisbon
      {37.39, -5.98, 0.13, 0.55},  // Sevilla
      {41.15, -8.61, 0.11, 0.50},  // Porto
      {41.39, 2.17, 0.24, 0.65},   // Barcelona
      {39.47, -0.38, 0.16, 0.55},  // Valencia
      {41.65, -0.88, 0.09, 0.45},  // Zaragoza
      {43.60, 1.44, 0.13, 0.55},   // Toulouse
      {45.76, 4.84, 0.18, 0.60},   // Lyon
      {43.30, 5.37, 0.17, 0.60},   // Marseille
      {45.07, 7.69, 0.15, 0.55},   // Turin
      {46.20, 6.14, 0.13, 0.55},   // Geneva
      {43.70, 7.27, 0.11, 0.55},   // Nice
      {48.14, 11.58, 0.18, 0.65},  // Munich
      {45.46, 9.19, 0.18, 0.70},   // Milan
      {47.37, 8.54, 0.13, 0.55},   // Zurich
      {48.78, 9.18, 0.12, 0.55},   // Stuttgart
      {48.21, 16.37, 0.17, 0.65},  // Vienna
      {45.44, 12.34, 0.10, 0.55},  // Venice
      {50.11, 8.68, 0.17, 0.65},   // Frankfurt
      {51.51, -0.13, 0.27, 0.80},  // London
      {48.86, 2.35, 0.25, 0.75},   // Paris
      {52.49, -1.89, 0.13, 0.60},  // Birmingham
      {53.48, -2.24, 0.13, 0.60},  // Manchester
      {50.63, 3.06, 0.09, 0.50},   // Lille
      {52.37, 4.90, 0.23, 0.60},   // Amsterdam
      {51.22, 6.95, 0.27, 0.75},   // Cologne/Ruhr
      {53.55, 9.99, 0.19, 0.60},   // Hamburg
      {50.85, 4.35, 0.18, 0.55},   // Brussels
      {55.68, 12.57, 0.21, 0.60},  // Copenhagen
      {57.71, 11.97, 0.13, 0.55},  // Gothenburg
      {59.91, 10.75, 0.17, 0.60},  // Oslo
      {59.33, 18.06, 0.19, 0.65},  // Stockholm
      {52.52, 13.40, 0.25, 0.70},  // Berlin
  };
  // Flight corridors (great-circle approximated by the projected segment).
  m.aero = {
      {51.5, -0.1, 41.9, 12.5, 0.050, 0.40},  // London - Rome
      {40.4, -3.7, 50.1, 8.7, 0.045, 0.40},   // Madrid - Frankfurt
      {48.9, 2.3, 48.2, 16.4, 0.045, 0.40},   // Paris - Vienna
      {38.7, -9.1, 48.9, 2.3, 0.035, 0.40},   // Lisbon - Paris
      {51.5, -0.1, 55.7, 12.6, 0.045, 0.40},  // London - Copenhagen
      {41.4, 2.2, 45.5, 9.2, 0.035, 0.35},    // Barcelona - Milan
      {50.1, 8.7, 59.3, 18.0, 0.035, 0.40},   // Frankfurt - Stockholm
      {41.9, 12.5, 48.1, 11.6, 0.035, 0.35},  // Rome - Munich
      {40.4, -3.7, 51.5, -0.1, 0.045, 0.40},  // Madrid - London
      {52.4, 4.9, 47.4, 8.5, 0.035, 0.35},    // Amsterdam - Zurich
  };
  // Shipping lanes.
  m.maritime = {
      {35.9, -5.0, 37.3, 11.0, 0.040, 0.50},  // western Mediterranean
      {37.0, 12.0, 38.5, 19.5, 0.025, 0.50},  // eastern Mediterranean
      {43.5, -9.0, 49.3, -5.0, 0.030, 0.50},  // Biscay
      {49.8, -5.0, 51.3, 1.8, 0.040, 0.45},   // English Channel
      {52.0, 3.5, 57.5, 9.5, 0.030, 0.50},    // North Sea
      {40.5, 18.5, 44.8, 13.0, 0.022, 0.45},  // Adriatic
      {54.5, 12.0, 57.0, 19.0, 0.022, 0.50},  // Baltic approach
      {36.0, -9.5, 43.0, -9.3, 0.030, 0.50},  // Atlantic coast
  };
  // Blocky day shapes: a handful of plateaus rather than smooth curves, so
  // the induced optimal allocations cluster into a small set of regimes.
  for (int h = 0; h < 24; ++h) {
    double pop, aero;
    if (h <= 5) pop = 0.30;
    else if (h == 6) pop = 0.55;
    else if (h <= 16) pop = 0.75;
    else if (h <= 21) pop = 1.00;
    else if (h == 22) pop = 0.80;
    else pop = 0.45;
    if (h <= 5) aero = 0.15;
    else if (h == 6) aero = 0.50;
    else if (h <= 18) aero = 1.00;
    else aero = 0.15;
    m.population_diurnal.mult[h] = pop;
    m.aero_diurnal.mult[h] = aero;
    m.maritime_diurnal.mult[h] = 0.85;
  }
  m.noise_sigma = 0.2;
  return m;
}

}  // namespace satrrm::traffic
