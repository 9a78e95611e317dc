#pragma once

#include <cmath>
#include <filesystem>
#include <vector>

// Downlink budget for a multibeam GEO satellite: spherical-Earth geometry,
// parabolic-in-dB antenna pattern, lumped extra loss, CINR, a step-function
// ModCod map, and the per-beam capacity table the allocator consumes.
//
// Conventions:
//  - all internal arithmetic in linear units; dB only at interfaces
//  - the receive chain is specified via G/T; we split it as
//    G_RX = (G/T) * T_sys with T_sys = noise_psd / k. CINR is invariant to
//    this split (only the reported |h|^2 magnitude depends on it).
//  - each beam is evaluated at its own boresight (theta = 0), which is what
//    makes eirp = power + sat_peak_gain hold for every table row.

namespace satrrm::linkbudget {

inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kEarthRadius = 6371000.0;      // m, mean spherical
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct SystemParams {
  double carrier_frequency_hz = 19e9;
  double satellite_longitude_deg = 13.0;
  double satellite_altitude_m = 35786000.0;
  double theta_3db_deg = 1.0;
  double sat_peak_gain_dbi = 44.94;
  double rx_gain_over_t_db_per_k = 17.0;
  double noise_psd_w_per_hz = kBoltzmann * 290.0;
  double extra_loss_db = 0.0;  // lumped shadowing/atmospheric loss
  double boltzmann_j_per_k = kBoltzmann;

  double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
  void validate() const;  // throws std::invalid_argument
};

struct Beam {
  int id = 0;  // 1..B
  double center_lat_deg = 0.0;
  double center_lon_deg = 0.0;
};

void validate_beams(const std::vector<Beam>& beams);
std::vector<Beam> default_beams();  // the eight European service beams

struct ModCodRow {
  double cinr_threshold_db;
  double efficiency_bps_hz;
};

struct ModCodTable {
  std::vector<ModCodRow> rows;  // ascending thresholds
  void validate() const;
};

struct CapacityRow {
  double bandwidth_hz;
  double power_dbw;
  double eirp_dbw;
  double cinr_db;
  double efficiency_bps_hz;
  double capacity_bps;
};

struct CapacityTable {
  std::vector<CapacityRow> rows;
  void validate() const;
  // Index of the (power, bandwidth) row, or -1.
  int find(double power_dbw, double bandwidth_hz) const;
};

// Great-circle geometry to a geostationary satellite at the given longitude.
double slant_range_m(const Beam& beam, const SystemParams& sys);

// Off-boresight angle (deg) of the beam center as seen from the nadir-pointing
// satellite.
double off_boresight_deg(const Beam& beam, const SystemParams& sys);

// G(theta) = G_max - min(12*(theta/theta_3db)^2, 30) dBi.
double antenna_gain_dbi(double theta_deg, const SystemParams& sys);

// |h|^2 = G_SAT(0) * G_RX / ((4*pi*D/lambda)^2 * L), linear power gain.
double channel_gain(const Beam& beam, const SystemParams& sys);

// gamma = P*|h|^2 / (I + N0*W), returned in dB.
double cinr_db(double power_dbw, double bandwidth_hz, const Beam& beam,
               const SystemParams& sys, double interference_w = 0.0);

// Efficiency of the highest row whose threshold <= cinr; 0 below all rows.
double spectral_efficiency(double cinr_db, const ModCodTable& table);

inline double offered_capacity_bps(double bandwidth_hz, double efficiency_bps_hz) {
  return bandwidth_hz * efficiency_bps_hz;
}

inline double eirp_dbw(double power_dbw, const SystemParams& sys) {
  return power_dbw + sys.sat_peak_gain_dbi;
}

// Solves extra_loss_db such that cinr_db(power, bandwidth, beam) == target.
// Closed form: the loss enters the dB budget additively.
double fit_extra_loss_db(const SystemParams& sys, const Beam& beam,
                         double power_dbw, double bandwidth_hz,
                         double target_cinr_db);

// The six pinned reference rows shipped with the project.
CapacityTable reference_capacity_table();

// ModCod step table from capacity rows: thresholds = row CINRs minus a small
// implementation margin (keeps each anchor CINR mapped to its own efficiency
// even after sub-0.1 dB calibration residue).
ModCodTable modcod_from_capacity_rows(const CapacityTable& table, double margin_db = 0.1);

enum class TableMode { kReference, kAnalytic };

// One row per (power, bandwidth) pair, powers outer / bandwidths inner.
// kReference looks pairs up in the reference table (unknown pair ->
// ConfigError); kAnalytic runs the cinr -> efficiency -> capacity chain.
CapacityTable build_capacity_table(const std::vector<double>& powers_dbw,
                                   const std::vector<double>& bandwidths_hz,
                                   TableMode mode, const SystemParams& sys,
                                   const Beam& ref_beam, const ModCodTable& modcod);

CapacityTable load_capacity_csv(const std::filesystem::path& path);
void save_capacity_csv(const std::filesystem::path& path, const CapacityTable& table);

}  // namespace satrrm::linkbudget
