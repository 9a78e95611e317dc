#include "satrrm/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"
#include "satrrm/parallel.hpp"

namespace satrrm::configspace {

namespace {

void check_table_size(const CapacityTable& table) {
  if (table.rows.empty()) throw std::invalid_argument("capacity table is empty");
  if (table.rows.size() > 255) throw std::invalid_argument("capacity table too large (>255 rows)");
}

std::vector<double> row_powers_w(const CapacityTable& table) {
  std::vector<double> p;
  p.reserve(table.rows.size());
  for (const auto& r : table.rows) p.push_back(linkbudget::db_to_linear(r.power_dbw));
  return p;
}

}  // namespace

PayloadConfig make_config(const std::vector<std::uint8_t>& rows, const CapacityTable& table) {
  check_table_size(table);
  PayloadConfig cfg;
  cfg.rows = rows;
  cfg.beams.reserve(rows.size());
  double p = 0.0, w = 0.0;
  for (std::uint8_t r : rows) {
    if (r >= table.rows.size()) throw std::invalid_argument("row index out of table range");
    const auto& row = table.rows[r];
    cfg.beams.push_back({row.power_dbw, row.bandwidth_hz, row.capacity_bps});
    p += linkbudget::db_to_linear(row.power_dbw);  // folded in beam order
    w += row.bandwidth_hz;
  }
  cfg.total_power_w = p;
  cfg.total_bandwidth_hz = w;
  return cfg;
}

std::uint64_t config_count(int n_beams, const CapacityTable& table) {
  if (n_beams < 1) throw std::invalid_argument("need at least one beam");
  check_table_size(table);
  std::uint64_t c = 1;
  for (int b = 0; b < n_beams; ++b) c *= table.rows.size();
  return c;
}

bool is_feasible(const PayloadConfig& cfg, double p_max_w, double w_max_hz) {
  return cfg.total_power_w <= p_max_w && cfg.total_bandwidth_hz <= w_max_hz;
}

std::uint64_t feasible_count(int n_beams, const CapacityTable& table, double p_max_w,
                             double w_max_hz, int threads) {
  const std::uint64_t total = config_count(n_beams, table);
  const std::size_t n_rows = table.rows.size();
  const std::vector<double> pw = row_powers_w(table);
  std::vector<double> bw;
  for (const auto& r : table.rows) bw.push_back(r.bandwidth_hz);

  const int parts = resolve_threads(threads);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(parts), 0);
  parallel_chunks(static_cast<std::int64_t>(total), threads,
                  [&](int part, std::int64_t begin, std::int64_t end) {
                    std::uint64_t local = 0;
                    std::vector<std::uint8_t> rows(static_cast<std::size_t>(n_beams));
                    for (std::int64_t k = begin; k < end; ++k) {
                      // Decode index k into row digits, beam 0 most significant.
                      std::uint64_t rem = static_cast<std::uint64_t>(k);
                      for (int b = n_beams - 1; b >= 0; --b) {
                        rows[static_cast<std::size_t>(b)] =
                            static_cast<std::uint8_t>(rem % n_rows);
                        rem /= n_rows;
                      }
                      double p = 0.0, w = 0.0;
                      for (int b = 0; b < n_beams; ++b) {
                        p += pw[rows[static_cast<std::size_t>(b)]];
                        w += bw[rows[static_cast<std::size_t>(b)]];
                      }
                      if (p <= p_max_w && w <= w_max_hz) ++local;
                    }
                    counts[static_cast<std::size_t>(part)] = local;
                  });
  std::uint64_t sum = 0;
  for (std::uint64_t c : counts) sum += c;
  return sum;
}

FeasibleSet build_feasible_set(int n_beams, const CapacityTable& table, double p_max_w,
                               double w_max_hz, int threads) {
  const std::uint64_t total = config_count(n_beams, table);
  const std::size_t n_rows = table.rows.size();

  FeasibleSet set;
  set.n_beams = n_beams;
  set.row_power_w = row_powers_w(table);
  for (const auto& r : table.rows) {
    set.row_power_dbw.push_back(r.power_dbw);
    set.row_bandwidth_hz.push_back(r.bandwidth_hz);
    set.row_capacity_bps.push_back(r.capacity_bps);
  }

  // Filter in parallel chunks, then concatenate in chunk order so the set
  // stays in enumeration order regardless of thread count.
  const int parts = resolve_threads(threads);
  std::vector<std::vector<std::uint8_t>> chunk_rows(static_cast<std::size_t>(parts));
  std::vector<std::vector<double>> chunk_p(static_cast<std::size_t>(parts));
  std::vector<std::vector<double>> chunk_w(static_cast<std::size_t>(parts));
  parallel_chunks(static_cast<std::int64_t>(total), threads,
                  [&](int part, std::int64_t begin, std::int64_t end) {
                    auto& out_rows = chunk_rows[static_cast<std::size_t>(part)];
                    auto& out_p = chunk_p[static_cast<std::size_t>(part)];
                    auto& out_w = chunk_w[static_cast<std::size_t>(part)];
                    std::vector<std::uint8_t> rows(static_cast<std::size_t>(n_beams));
                    for (std::int64_t k = begin; k < end; ++k) {
                      std::uint64_t rem = static_cast<std::uint64_t>(k);
                      for (int b = n_beams - 1; b >= 0; --b) {
                        rows[static_cast<std::size_t>(b)] =
                            static_cast<std::uint8_t>(rem % n_rows);
                        rem /= n_rows;
                      }
                      double p = 0.0, w = 0.0;
                      for (int b = 0; b < n_beams; ++b) {
                        p += set.row_power_w[rows[static_cast<std::size_t>(b)]];
                        w += set.row_bandwidth_hz[rows[static_cast<std::size_t>(b)]];
                      }
                      if (p <= p_max_w && w <= w_max_hz) {
                        out_rows.insert(out_rows.end(), rows.begin(), rows.end());
                        out_p.push_back(p);
                        out_w.push_back(w);
                      }
                    }
                  });
  for (int part = 0; part < parts; ++part) {
    const auto& cr = chunk_rows[static_cast<std::size_t>(part)];
    set.rows.insert(set.rows.end(), cr.begin(), cr.end());
    const auto& cp = chunk_p[static_cast<std::size_t>(part)];
    set.total_power_w.insert(set.total_power_w.end(), cp.begin(), cp.end());
    const auto& cw = chunk_w[static_cast<std::size_t>(part)];
    set.total_bandwidth_hz.insert(set.total_bandwidth_hz.end(), cw.begin(), cw.end());
  }
  return set;
}

int ClassCatalog::find(const std::vector<std::uint8_t>& rows) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].rows == rows) return static_cast<int>(i);
  return -1;
}

void ClassCatalog::validate() const {
  if (classes.empty()) throw ConfigError("class catalog is empty");
  if (classes.size() != support.size()) throw ConfigError("catalog support size mismatch");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!is_feasible(classes[i], p_max_w, w_max_hz))
      throw ConfigError("catalog class " + std::to_string(i) + " violates constraints");
    for (std::size_t j = i + 1; j < classes.size(); ++j)
      if (classes[i].rows == classes[j].rows) throw ConfigError("duplicate catalog class");
  }
}

ClassCatalog reduce_classes(const std::vector<PayloadConfig>& labels, double min_support) {
  if (labels.empty()) throw std::invalid_argument("no labels to reduce");
  if (min_support < 0 || min_support > 1)
    throw std::invalid_argument("min_support must be in [0,1]");

  std::map<std::vector<std::uint8_t>, std::uint64_t> counts;
  for (const auto& cfg : labels) ++counts[cfg.rows];

  const double threshold = min_support * static_cast<double>(labels.size());
  struct Entry {
    const std::vector<std::uint8_t>* rows;
    std::uint64_t count;
  };
  std::vector<Entry> kept;
  for (const auto& [rows, count] : counts)
    if (static_cast<double>(count) >= threshold) kept.push_back({&rows, count});
  if (kept.empty()) throw ConfigError("no class reaches min_support");

  std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return *a.rows < *b.rows;
  });

  ClassCatalog catalog;
  catalog.min_support = min_support;
  for (const Entry& e : kept) {
    for (const auto& cfg : labels) {
      if (cfg.rows == *e.rows) {
        catalog.classes.push_back(cfg);
        break;
      }
    }
    catalog.support.push_back(e.count);
  }
  return catalog;
}

void save_catalog(const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path, const ClassCatalog& catalog,
                  const std::vector<linkbudget::Beam>& beams) {
  io::Csv csv;
  csv.header = {"class_id", "beam_id", "power_dbw", "bandwidth_hz"};
  for (std::size_t c = 0; c < catalog.classes.size(); ++c) {
    const PayloadConfig& cfg = catalog.classes[c];
    if (cfg.beams.size() != beams.size())
      throw std::invalid_argument("catalog beam count does not match beam list");
    for (std::size_t b = 0; b < cfg.beams.size(); ++b)
      csv.rows.push_back({std::to_string(c), std::to_string(beams[b].id),
                          io::fmt_double(cfg.beams[b].power_dbw),
                          io::fmt_double(cfg.beams[b].bandwidth_hz)});
  }
  io::write_csv(csv_path, csv);

  io::json j;
  j["n_classes"] = catalog.classes.size();
  j["p_max_w"] = catalog.p_max_w;
  j["w_max_hz"] = catalog.w_max_hz;
  j["min_support"] = catalog.min_support;
  j["support"] = catalog.support;
  io::write_json_file(json_path, j);
}

ClassCatalog load_catalog(const std::filesystem::path& csv_path,
                          const std::filesystem::path& json_path,
                          const CapacityTable& table) {
  const io::Csv csv = io::read_csv(csv_path);
  const std::vector<std::string> want = {"class_id", "beam_id", "power_dbw", "bandwidth_hz"};
  if (csv.header != want) throw ConfigError(csv_path.string() + ": unexpected catalog header");

  ClassCatalog catalog;
  const io::json j = io::read_json_file(json_path);
  catalog.p_max_w = j.at("p_max_w").get<double>();
  catalog.w_max_hz = j.at("w_max_hz").get<double>();
  catalog.min_support = j.at("min_support").get<double>();
  catalog.support = j.at("support").get<std::vector<std::uint64_t>>();

  std::vector<std::uint8_t> rows;
  std::int64_t current = -1;
  auto flush = [&]() {
    if (!rows.empty()) catalog.classes.push_back(make_config(rows, table));
    rows.clear();
  };
  for (const auto& line : csv.rows) {
    const std::int64_t cid = io::parse_int(line[0]);
    if (cid != current) {
      if (cid != current + 1)
        throw ConfigError(csv_path.string() + ": class ids must be consecutive");
      flush();
      current = cid;
    }
    const int row = table.find(io::parse_double(line[2]), io::parse_double(line[3]));
    if (row < 0)
      throw ConfigError(csv_path.string() + ": catalog entry not present in capacity table");
    rows.push_back(static_cast<std::uint8_t>(row));
  }
  flush();
  catalog.validate();
  return catalog;
}

}  // namespace satrrm::configspace
