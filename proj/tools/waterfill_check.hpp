#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adastrat/rng.hpp"

namespace adastrat::check {

// Randomized validation harness for the water-filling solver. Two
// oracles, both independent of the production closed form: a greedy
// marginal allocator on a fine grid (exact for this separable convex
// objective restricted to the grid) and a dual bisection on the KKT
// multiplier.

struct WaterfillInstance {
  std::vector<double> n;
  std::vector<double> alpha;
  std::int64_t budget = 0;
};

WaterfillInstance random_instance(Rng& rng);

double objective(const WaterfillInstance& inst, std::span<const double> m);

// Best objective achievable on the grid m_i in {0, delta, 2 delta, ...}
// with delta = budget * resolution, found by greedy marginal gains.
double grid_oracle_objective(const WaterfillInstance& inst, double resolution = 1e-3);

// m_i(lambda) = max(0, alpha_i/sqrt(lambda) - n_i), with lambda bisected
// until the budget constraint binds.
std::vector<double> dual_oracle(const WaterfillInstance& inst);

// Relative stationarity defect: spread of alpha_i/(n_i+m_i) across
// funded strata, plus any unfunded stratum exceeding the common level.
double kkt_residual(const WaterfillInstance& inst, std::span<const double> m);

struct SuiteResult {
  std::int64_t instances = 0;
  double max_sum_dev = 0.0;
  double max_kkt = 0.0;
  double max_grid_excess = 0.0;   // objective - grid oracle (positive is bad)
  double max_dual_gap = 0.0;      // |objective - dual oracle objective|
  bool ok = true;
  std::string failure;
};

// Runs `instances` random problems through the production solver and both
// oracles. With inject_perturbation the solver output is deliberately
// corrupted, which the checks must flag (negative control).
SuiteResult run_waterfill_suite(std::int64_t instances, std::uint64_t seed,
                                bool inject_perturbation = false);

}  // namespace adastrat::check
