#include "satrrm/linkbudget.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"

namespace satrrm::linkbudget {

namespace {
constexpr double kDegToRad = kPi / 180.0;
}

void SystemParams::validate() const {
  if (!(carrier_frequency_hz > 0)) throw std::invalid_argument("carrier_frequency must be > 0");
  if (!(satellite_altitude_m > 0)) throw std::invalid_argument("satellite_altitude must be > 0");
  if (!(theta_3db_deg > 0)) throw std::invalid_argument("theta_3db must be > 0");
  if (!(noise_psd_w_per_hz > 0)) throw std::invalid_argument("noise_psd must be > 0");
  if (!(boltzmann_j_per_k > 0)) throw std::invalid_argument("boltzmann must be > 0");
  if (!std::isfinite(extra_loss_db)) throw std::invalid_argument("extra_loss must be finite");
}

void validate_beams(const std::vector<Beam>& beams) {
  if (beams.empty()) throw std::invalid_argument("beam list is empty");
  std::set<int> ids;
  for (const Beam& b : beams) {
    if (std::abs(b.center_lat_deg) > 90.0) throw std::invalid_argument("beam latitude out of range");
    if (std::abs(b.center_lon_deg) > 180.0) throw std::invalid_argument("beam longitude out of range");
    if (!ids.insert(b.id).second)
      throw std::invalid_argument("duplicate beam id " + std::to_string(b.id));
  }
}

std::vector<Beam> default_beams() {
  return {
      {1, 39.3, -5.3}, {2, 42.0, 0.0},  {3, 44.7, 5.3},  {4, 47.4, 10.6},
      {5, 51.0, -0.5}, {6, 53.7, 6.0},  {7, 56.4, 12.3}, {8, 39.5, 14.4},
  };
}

void ModCodTable::validate() const {
  if (rows.empty()) throw std::invalid_argument("modcod table is empty");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].efficiency_bps_hz > 0))
      throw std::invalid_argument("modcod efficiency must be > 0");
    if (i > 0) {
      if (!(rows[i].cinr_threshold_db > rows[i - 1].cinr_threshold_db))
        throw std::invalid_argument("modcod thresholds must be strictly increasing");
      if (!(rows[i].efficiency_bps_hz > rows[i - 1].efficiency_bps_hz))
        throw std::invalid_argument("modcod efficiencies must be strictly increasing");
    }
  }
}

void CapacityTable::validate() const {
  if (rows.empty()) throw std::invalid_argument("capacity table is empty");
  for (const CapacityRow& r : rows) {
    if (!(r.bandwidth_hz > 0)) throw std::invalid_argument("bandwidth must be > 0");
    if (r.efficiency_bps_hz < 0 || r.capacity_bps < 0)
      throw std::invalid_argument("efficiency/capacity must be >= 0");
    if (std::abs(r.capacity_bps - r.bandwidth_hz * r.efficiency_bps_hz) > 5e4)
      throw std::invalid_argument("capacity inconsistent with bandwidth*efficiency");
  }
  const double gain0 = rows.front().eirp_dbw - rows.front().power_dbw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs((rows[i].eirp_dbw - rows[i].power_dbw) - gain0) > 1e-6)
      throw std::invalid_argument("eirp - power must be constant across rows");
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const CapacityRow& a = rows[i];
      const CapacityRow& b = rows[j];
      if (a.power_dbw == b.power_dbw && a.bandwidth_hz == b.bandwidth_hz)
        throw std::invalid_argument("duplicate (power, bandwidth) row");
      // Capacity monotone in power at fixed bandwidth and vice versa.
      if (a.bandwidth_hz == b.bandwidth_hz) {
        const bool order = a.power_dbw < b.power_dbw;
        if ((order ? b.capacity_bps - a.capacity_bps : a.capacity_bps - b.capacity_bps) < 0)
          throw std::invalid_argument("capacity not monotone in power");
      }
      if (a.power_dbw == b.power_dbw) {
        const bool order = a.bandwidth_hz < b.bandwidth_hz;
        if ((order ? b.capacity_bps - a.capacity_bps : a.capacity_bps - b.capacity_bps) < 0)
          throw std::invalid_argument("capacity not monotone in bandwidth");
      }
    }
  }
}

int CapacityTable::find(double power_dbw, double bandwidth_hz) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i].power_dbw - power_dbw) < 1e-9 &&
        std::abs(rows[i].bandwidth_hz - bandwidth_hz) < 1e-3)
      return static_cast<int>(i);
  }
  return -1;
}

double slant_range_m(const Beam& beam, const SystemParams& sys) {
  sys.validate();
  if (std::abs(beam.center_lat_deg) > 90.0 || std::abs(beam.center_lon_deg) > 180.0)
    throw std::invalid_argument("beam coordinates out of range");
  // Central angle between the sub-satellite point (0 deg lat) and the beam
  // center on a spherical Earth, then the law of cosines in the orbital plane.
  const double lat = beam.center_lat_deg * kDegToRad;
  const double dlon = (beam.center_lon_deg - sys.satellite_longitude_deg) * kDegToRad;
  const double cos_central = std::cos(lat) * std::cos(dlon);
  const double r_orbit = kEarthRadius + sys.satellite_altitude_m;
  const double d2 = kEarthRadius * kEarthRadius + r_orbit * r_orbit -
                    2.0 * kEarthRadius * r_orbit * cos_central;
  return std::sqrt(d2);
}

double off_boresight_deg(const Beam& beam, const SystemParams& sys) {
  const double lat = beam.center_lat_deg * kDegToRad;
  const double dlon = (beam.center_lon_deg - sys.satellite_longitude_deg) * kDegToRad;
  const double cos_central = std::cos(lat) * std::cos(dlon);
  const double sin_central = std::sqrt(std::max(0.0, 1.0 - cos_central * cos_central));
  const double r_orbit = kEarthRadius + sys.satellite_altitude_m;
  return std::atan2(kEarthRadius * sin_central, r_orbit - kEarthRadius * cos_central) / kDegToRad;
}

double antenna_gain_dbi(double theta_deg, const SystemParams& sys) {
  if (theta_deg < 0) throw std::domain_error("off-boresight angle must be >= 0");
  const double ratio = theta_deg / sys.theta_3db_deg;
  const double rolloff = std::min(12.0 * ratio * ratio, 30.0);
  return sys.sat_peak_gain_dbi - rolloff;
}

double channel_gain(const Beam& beam, const SystemParams& sys) {
  const double d = slant_range_m(beam, sys);
  const double fspl = std::pow(4.0 * kPi * d / sys.wavelength_m(), 2.0);
  const double g_tx = db_to_linear(antenna_gain_dbi(0.0, sys));
  // Receive gain recovered from G/T and the system noise temperature.
  const double t_sys = sys.noise_psd_w_per_hz / sys.boltzmann_j_per_k;
  const double g_rx = db_to_linear(sys.rx_gain_over_t_db_per_k) * t_sys;
  const double loss = db_to_linear(sys.extra_loss_db);
  return g_tx * g_rx / (fspl * loss);
}

double cinr_db(double power_dbw, double bandwidth_hz, const Beam& beam,
               const SystemParams& sys, double interference_w) {
  if (!(bandwidth_hz > 0)) throw std::invalid_argument("bandwidth must be > 0");
  if (interference_w < 0) throw std::invalid_argument("interference must be >= 0");
  const double p = db_to_linear(power_dbw);
  const double denom = interference_w + sys.noise_psd_w_per_hz * bandwidth_hz;
  return linear_to_db(p * channel_gain(beam, sys) / denom);
}

double spectral_efficiency(double cinr, const ModCodTable& table) {
  table.validate();
  double eff = 0.0;
  for (const ModCodRow& row : table.rows) {
    if (cinr >= row.cinr_threshold_db)
      eff = row.efficiency_bps_hz;
    else
      break;
  }
  return eff;
}

double fit_extra_loss_db(const SystemParams& sys, const Beam& beam,
                         double power_dbw, double bandwidth_hz,
                         double target_cinr_db) {
  SystemParams zero_loss = sys;
  zero_loss.extra_loss_db = 0.0;
  return cinr_db(power_dbw, bandwidth_hz, beam, zero_loss) - target_cinr_db;
}

CapacityTable reference_capacity_table() {
  CapacityTable t;
  t.rows = {
      {250e6, 10.0, 54.94, 6.4615, 1.8865, 471631200.0},
      {500e6, 10.0, 54.94, 3.4817, 1.3350, 667482700.0},
      {250e6, 12.0, 56.94, 8.4261, 2.2502, 562542100.0},
      {500e6, 12.0, 56.94, 5.4638, 1.7019, 850928800.0},
      {250e6, 14.0, 58.94, 10.3705, 2.6101, 652521500.0},
      {500e6, 14.0, 58.94, 7.4357, 2.0668, 1033400000.0},
  };
  return t;
}

ModCodTable modcod_from_capacity_rows(const CapacityTable& table, double margin_db) {
  ModCodTable m;
  for (const CapacityRow& r : table.rows)
    m.rows.push_back({r.cinr_db - margin_db, r.efficiency_bps_hz});
  std::sort(m.rows.begin(), m.rows.end(),
            [](const ModCodRow& a, const ModCodRow& b) {
              return a.cinr_threshold_db < b.cinr_threshold_db;
            });
  m.validate();
  return m;
}

CapacityTable build_capacity_table(const std::vector<double>& powers_dbw,
                                   const std::vector<double>& bandwidths_hz,
                                   TableMode mode, const SystemParams& sys,
                                   const Beam& ref_beam, const ModCodTable& modcod) {
  if (powers_dbw.empty() || bandwidths_hz.empty())
    throw std::invalid_argument("power/bandwidth sets must be nonempty");
  CapacityTable out;
  const CapacityTable ref = reference_capacity_table();
  for (double p : powers_dbw) {
    for (double w : bandwidths_hz) {
      if (mode == TableMode::kReference) {
        const int idx = ref.find(p, w);
        if (idx < 0)
          throw ConfigError("no reference capacity row for power " + std::to_string(p) +
                            " dBW, bandwidth " + std::to_string(w) + " Hz");
        out.rows.push_back(ref.rows[static_cast<std::size_t>(idx)]);
      } else {
        const double cinr = cinr_db(p, w, ref_beam, sys);
        const double eff = spectral_efficiency(cinr, modcod);
        out.rows.push_back({w, p, eirp_dbw(p, sys), cinr, eff, offered_capacity_bps(w, eff)});
      }
    }
  }
  out.validate();
  return out;
}

CapacityTable load_capacity_csv(const std::filesystem::path& path) {
  const io::Csv csv = io::read_csv(path);
  const std::vector<std::string> want = {"bandwidth_hz", "power_dbw",         "eirp_dbw",
                                         "cinr_db",      "efficiency_bps_hz", "capacity_bps"};
  if (csv.header != want) throw ConfigError(path.string() + ": unexpected capacity csv header");
  CapacityTable t;
  for (const auto& row : csv.rows)
    t.rows.push_back({io::parse_double(row[0]), io::parse_double(row[1]),
                      io::parse_double(row[2]), io::parse_double(row[3]),
                      io::parse_double(row[4]), io::parse_double(row[5])});
  t.validate();
  return t;
}

void save_capacity_csv(const std::filesystem::path& path, const CapacityTable& table) {
  io::Csv csv;
  csv.header = {"bandwidth_hz", "power_dbw",         "eirp_dbw",
                "cinr_db",      "efficiency_bps_hz", "capacity_bps"};
  for (const CapacityRow& r : table.rows)
    csv.rows.push_back({io::fmt_double(r.bandwidth_hz), io::fmt_double(r.power_dbw),
                        io::fmt_double(r.eirp_dbw), io::fmt_double(r.cinr_db),
                        io::fmt_double(r.efficiency_bps_hz), io::fmt_double(r.capacity_bps)});
  io::write_csv(path, csv);
}

}  // namespace satrrm::linkbudget
