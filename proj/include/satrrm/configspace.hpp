#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "satrrm/linkbudget.hpp"

// Payload configuration space: the Cartesian product of capacity-table rows
// over beams, the total power/bandwidth feasibility filter, and the reduced
// class catalog that classifier heads predict into.
//
// Enumeration order is lexicographic in per-beam row indices with beam 0 the
// most significant digit; totals are folded in beam order (fixed FP order so
// independent recounts can match bit-exactly).

namespace satrrm::configspace {

using linkbudget::CapacityTable;

struct BeamConfig {
  double power_dbw;
  double bandwidth_hz;
  double capacity_bps;
};

struct PayloadConfig {
  std::vector<BeamConfig> beams;
  std::vector<std::uint8_t> rows;  // per-beam row index into the building table
  double total_power_w = 0.0;      // linear watts
  double total_bandwidth_hz = 0.0;
};

PayloadConfig make_config(const std::vector<std::uint8_t>& rows, const CapacityTable& table);

std::uint64_t config_count(int n_beams, const CapacityTable& table);  // |table|^B

// Visit all |table|^B row-index tuples in enumeration order.
template <class F>
void for_each_config(int n_beams, std::size_t table_rows, F&& fn) {
  std::vector<std::uint8_t> rows(static_cast<std::size_t>(n_beams), 0);
  while (true) {
    fn(static_cast<const std::uint8_t*>(rows.data()));
    int b = n_beams - 1;
    while (b >= 0 && static_cast<std::size_t>(++rows[static_cast<std::size_t>(b)]) == table_rows) {
      rows[static_cast<std::size_t>(b)] = 0;
      --b;
    }
    if (b < 0) break;
  }
}

bool is_feasible(const PayloadConfig& cfg, double p_max_w, double w_max_hz);

std::uint64_t feasible_count(int n_beams, const CapacityTable& table, double p_max_w,
                             double w_max_hz, int threads = 1);

// Pre-filtered feasible set in enumeration order; the layout the per-sample
// exhaustive solve scans.
struct FeasibleSet {
  int n_beams = 0;
  // Per table row, precomputed attributes.
  std::vector<double> row_power_w;
  std::vector<double> row_power_dbw;
  std::vector<double> row_bandwidth_hz;
  std::vector<double> row_capacity_bps;
  // Per feasible config.
  std::vector<std::uint8_t> rows;  // n() * n_beams
  std::vector<double> total_power_w;
  std::vector<double> total_bandwidth_hz;

  std::size_t n() const { return total_power_w.size(); }
  const std::uint8_t* config(std::size_t i) const {
    return rows.data() + i * static_cast<std::size_t>(n_beams);
  }
};

FeasibleSet build_feasible_set(int n_beams, const CapacityTable& table, double p_max_w,
                               double w_max_hz, int threads = 1);

struct ClassCatalog {
  std::vector<PayloadConfig> classes;     // ordered: support desc, then rows lex
  std::vector<std::uint64_t> support;     // aligned with classes
  double p_max_w = 0.0;                   // constraints in force at labeling time
  double w_max_hz = 0.0;
  double min_support = 0.0;

  int find(const std::vector<std::uint8_t>& rows) const;  // -1 if absent
  void validate() const;
};

// Distinct labels whose share is >= min_support of |labels|, ordered by
// descending support then lexicographic rows. Throws ConfigError if nothing
// survives. Constraint fields are filled in by the caller that knows them.
ClassCatalog reduce_classes(const std::vector<PayloadConfig>& labels, double min_support);

// catalog.csv: one row per (class, beam): class_id,beam_id,power_dbw,bandwidth_hz
// catalog.json: constraints, min_support, per-class support counts.
void save_catalog(const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path, const ClassCatalog& catalog,
                  const std::vector<linkbudget::Beam>& beams);
ClassCatalog load_catalog(const std::filesystem::path& csv_path,
                          const std::filesystem::path& json_path,
                          const CapacityTable& table);

}  // namespace satrrm::configspace
