#pragma once

#include <cstdint>
#include <vector>

#include "satrrm/configspace.hpp"
#include "satrrm/traffic.hpp"

// Ground-truth allocator: a weighted cost of capacity mismatch plus resource
// use, minimized by exhaustive scan over the pre-filtered feasible set.
//
// Cost of a config given per-beam demand R (bps):
//   score = sum_b [ beta0*|C_b - R_b| + beta1*P_b + beta2*W_b ]
// with P_b in linear watts, summed in beam order (fixed FP fold so that
// independent recomputation reproduces scores bit-exactly).
//
// Tie-breaks, in order: lower score, lower total power, lower total
// bandwidth, earliest in enumeration order.

namespace satrrm::oracle {

struct ObjectiveWeights {
  double beta0_per_bps = 1e-6;  // == 1 per Mbps: mismatch dominates
  double beta1_per_w = 1e-2;
  double beta2_per_hz = 1e-10;  // == 1e-2 per 100 MHz
  void validate() const;
};

double objective(const configspace::PayloadConfig& cfg, const traffic::DemandVector& demand,
                 const ObjectiveWeights& w);

struct SolveResult {
  std::vector<std::uint8_t> rows;  // per-beam row index
  double score = 0.0;
  std::size_t index = 0;  // position in the scanned space (enumeration order)
};

SolveResult solve_exhaustive(const traffic::DemandVector& demand,
                             const configspace::FeasibleSet& space,
                             const ObjectiveWeights& w, int threads = 1);

// Same objective restricted to catalog classes; ties to the lowest class id.
// Returned index is the class id.
SolveResult solve_catalog(const traffic::DemandVector& demand,
                          const configspace::ClassCatalog& catalog,
                          const ObjectiveWeights& w);

}  // namespace satrrm::oracle
