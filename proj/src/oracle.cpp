#include "satrrm/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "satrrm/parallel.hpp"

namespace satrrm::oracle {

void ObjectiveWeights::validate() const {
  if (!(beta0_per_bps > 0)) throw std::invalid_argument("beta0 must be > 0");
  if (beta1_per_w < 0 || beta2_per_hz < 0)
    throw std::invalid_argument("resource weights must be >= 0");
}

double objective(const configspace::PayloadConfig& cfg, const traffic::DemandVector& demand,
                 const ObjectiveWeights& w) {
  w.validate();
  if (cfg.beams.size() != demand.bps.size())
    throw std::invalid_argument("config and demand beam counts differ");
  double score = 0.0;
  for (std::size_t b = 0; b < cfg.beams.size(); ++b) {
    const auto& bc = cfg.beams[b];
    score += w.beta0_per_bps * std::abs(bc.capacity_bps - demand.bps[b]) +
             w.beta1_per_w * linkbudget::db_to_linear(bc.power_dbw) +
             w.beta2_per_hz * bc.bandwidth_hz;
  }
  return score;
}

namespace {

struct Best {
  double score = std::numeric_limits<double>::infinity();
  double power = 0.0, bandwidth = 0.0;
  std::size_t index = 0;
  bool valid = false;

  // Strict improvement under the tie-break order; callers visit candidates in
  // ascending index so equal tuples keep the earlier one.
  bool accept(double s, double p, double w) const {
    if (!valid) return true;
    if (s != score) return s < score;
    if (p != power) return p < power;
    return w < bandwidth;
  }
};

}  // namespace

SolveResult solve_exhaustive(const traffic::DemandVector& demand,
                             const configspace::FeasibleSet& space,
                             const ObjectiveWeights& w, int threads) {
  w.validate();
  if (space.n() == 0) throw std::invalid_argument("feasible space is empty");
  const std::size_t n_beams = static_cast<std::size_t>(space.n_beams);
  if (demand.bps.size() != n_beams)
    throw std::invalid_argument("demand beam count does not match space");

  // Per-beam per-row cost lookup; each entry is exactly the per-beam term of
  // objective(), so scanned scores match objective() bit-for-bit.
  const std::size_t n_rows = space.row_capacity_bps.size();
  std::vector<double> cost(n_beams * n_rows);
  for (std::size_t b = 0; b < n_beams; ++b)
    for (std::size_t r = 0; r < n_rows; ++r)
      cost[b * n_rows + r] =
          w.beta0_per_bps * std::abs(space.row_capacity_bps[r] - demand.bps[b]) +
          w.beta1_per_w * space.row_power_w[r] + w.beta2_per_hz * space.row_bandwidth_hz[r];

  const int parts = resolve_threads(threads);
  std::vector<Best> bests(static_cast<std::size_t>(parts));
  parallel_chunks(static_cast<std::int64_t>(space.n()), threads,
                  [&](int part, std::int64_t begin, std::int64_t end) {
                    Best local;
                    for (std::int64_t i = begin; i < end; ++i) {
                      const std::uint8_t* rows = space.config(static_cast<std::size_t>(i));
                      double s = 0.0;
                      for (std::size_t b = 0; b < n_beams; ++b)
                        s += cost[b * n_rows + rows[b]];
                      const std::size_t idx = static_cast<std::size_t>(i);
                      if (local.accept(s, space.total_power_w[idx],
                                       space.total_bandwidth_hz[idx])) {
                        local = {s, space.total_power_w[idx], space.total_bandwidth_hz[idx],
                                 idx, true};
                      }
                    }
                    bests[static_cast<std::size_t>(part)] = local;
                  });

  Best final;
  for (const Best& b : bests) {  // merged in chunk (= index) order
    if (!b.valid) continue;
    if (final.accept(b.score, b.power, b.bandwidth)) final = b;
  }

  SolveResult res;
  res.index = final.index;
  res.score = final.score;
  const std::uint8_t* rows = space.config(final.index);
  res.rows.assign(rows, rows + n_beams);
  return res;
}

SolveResult solve_catalog(const traffic::DemandVector& demand,
                          const configspace::ClassCatalog& catalog,
                          const ObjectiveWeights& w) {
  if (catalog.classes.empty()) throw std::invalid_argument("catalog is empty");
  Best best;
  for (std::size_t c = 0; c < catalog.classes.size(); ++c) {
    const auto& cfg = catalog.classes[c];
    const double s = objective(cfg, demand, w);
    if (best.accept(s, cfg.total_power_w, cfg.total_bandwidth_hz))
      best = {s, cfg.total_power_w, cfg.total_bandwidth_hz, c, true};
  }
  SolveResult res;
  res.index = best.index;
  res.score = best.score;
  res.rows = catalog.classes[best.index].rows;
  return res;
}

}  // namespace satrrm::oracle
