#include <chrono>
#include <cstdio>
#include <vector>

#include "satrrm/common.hpp"
#include "satrrm/config.hpp"
#include "satrrm/configspace.hpp"
#include "satrrm/oracle.hpp"
#include "satrrm/parallel.hpp"
#include "satrrm/traffic.hpp"

// Times the OpenMP kernels against their serial reference paths and checks
// that both produce the same answers.

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial_s, double parallel_s, bool equal) {
  std::printf("%-24s %10.3fs %10.3fs %8.2fx  %s\n", name, serial_s, parallel_s,
              parallel_s > 0 ? serial_s / parallel_s : 0.0, equal ? "match" : "MISMATCH");
}

}  // namespace

int main() {
  using namespace satrrm;
  const auto cfg = config::default_config();
  const auto table = cfg.capacity_table();
  const int n_beams = static_cast<int>(cfg.beams.size());

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", resolve_threads(0));
#else
  std::printf("OpenMP not available; both columns run the serial path\n");
#endif
  std::printf("%-24s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  // feasibility count over the full 6^8 space
  auto t0 = std::chrono::steady_clock::now();
  const auto count1 = configspace::feasible_count(n_beams, table, cfg.label.p_max_w,
                                                  cfg.label.w_max_hz, 1);
  const double fc_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto countN = configspace::feasible_count(n_beams, table, cfg.label.p_max_w,
                                                  cfg.label.w_max_hz, 0);
  row("feasible_count", fc_serial, seconds_since(t0), count1 == countN);

  const auto space = configspace::build_feasible_set(n_beams, table, cfg.label.p_max_w,
                                                     cfg.label.w_max_hz, 0);

  // exhaustive solves over a few realistic demand vectors
  std::vector<traffic::DemandVector> demands;
  for (int hour : {3, 9, 14, 19, 22})
    demands.push_back(traffic::aggregate_demand(
        traffic::generate_grid(cfg.traffic, hour, 1234 + hour), cfg.beams));
  bool solve_equal = true;
  t0 = std::chrono::steady_clock::now();
  std::vector<oracle::SolveResult> serial_solutions;
  for (const auto& d : demands)
    serial_solutions.push_back(oracle::solve_exhaustive(d, space, cfg.label.weights, 1));
  const double solve_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const auto r = oracle::solve_exhaustive(demands[i], space, cfg.label.weights, 0);
    solve_equal = solve_equal && r.rows == serial_solutions[i].rows &&
                  r.score == serial_solutions[i].score;
  }
  row("solve_exhaustive x5", solve_serial, seconds_since(t0), solve_equal);

  // traffic grid batch (per-sample parallelism, grids themselves identical)
  const int n_grids = 32;
  std::vector<std::uint64_t> h1(n_grids), hN(n_grids);
  t0 = std::chrono::steady_clock::now();
  parallel_for(n_grids, 1, [&](std::int64_t i) {
    const auto g = traffic::generate_grid(cfg.traffic, static_cast<int>(i % 24), 77 + i);
    h1[i] = fnv1a64(g.mbps.data(), g.mbps.size() * sizeof(float));
  });
  const double grid_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  parallel_for(n_grids, 0, [&](std::int64_t i) {
    const auto g = traffic::generate_grid(cfg.traffic, static_cast<int>(i % 24), 77 + i);
    hN[i] = fnv1a64(g.mbps.data(), g.mbps.size() * sizeof(float));
  });
  row("traffic grids x32", grid_serial, seconds_since(t0), h1 == hN);
  return 0;
}
