#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "adastrat/allocation.hpp"
#include "adastrat/stats.hpp"

namespace adastrat {

enum class AllocationRule { A, B };

// Macro-step schedule: cumulative drawing counts N^1 < N^2 < ... < N^K.
// Every increment must cover one forced drawing per stratum, which is
// checked against the stratification before any drawing happens.
class Schedule {
 public:
  explicit Schedule(std::vector<std::int64_t> checkpoints);

  void validate_for(std::int64_t strata) const;

  std::size_t steps() const { return checkpoints_.size(); }
  std::int64_t total(std::size_t k) const { return checkpoints_.at(k); }
  std::int64_t final_total() const { return checkpoints_.back(); }
  const std::vector<std::int64_t>& checkpoints() const { return checkpoints_; }

 private:
  std::vector<std::int64_t> checkpoints_;
};

// Mutable state of one adaptive run: cumulative per-stratum counts and
// moments, one RNG stream per stratum so allocation decisions never
// desynchronize the draws of unrelated strata.
struct AdaptiveState {
  std::size_t step = 0;
  std::vector<std::int64_t> counts;
  std::vector<StratumMoments> moments;
  std::vector<Rng> streams;
  AllocationRule rule = AllocationRule::A;

  static AdaptiveState begin(std::size_t strata, AllocationRule rule, std::uint64_t seed);
};

inline constexpr double kDefaultCiLevel = 0.95;

// Snapshot of the estimator after a checkpoint.
struct EstimateReport {
  double c_hat = 0.0;
  double sigma_star_hat = 0.0;
  std::vector<std::int64_t> counts;
  double ci_halfwidth = 0.0;  // at kDefaultCiLevel
  std::vector<double> stratum_mean;
  std::vector<double> stratum_sigma;

  std::int64_t total() const;
};

// The adaptive loop: at each checkpoint re-estimate per-stratum sigmas
// (taken as 1 before any data), allocate the step's free budget by the
// chosen rule, draw one forced sample per stratum plus the allocation,
// and report. Deterministic in (seed, rule, schedule).
std::vector<EstimateReport> run_adaptive(const Stratification& strat,
                                         const Schedule& schedule, AllocationRule rule,
                                         std::uint64_t seed);

// Non-adaptive baseline: a single pass with fixed proportions q.
EstimateReport run_fixed(const Stratification& strat, const Proportions& q,
                         std::int64_t n_total, std::uint64_t seed);

// Central interval c_hat +/- z * sigma_star_hat / sqrt(N) with z the
// normal quantile at (1+level)/2.
std::pair<double, double> confidence_interval(const EstimateReport& report, double level);

using Experiment = std::function<EstimateReport(std::uint64_t)>;

// Replication diagnostics: v_hat is the population variance of the
// estimates over the runs, scaled_std = sqrt(N * v_hat) which should sit
// near the optimal sigma* when the allocation has converged.
struct ReplicationSummary {
  double mean = 0.0;
  double variance = 0.0;
  double scaled_std = 0.0;
  double mean_wall_ns = 0.0;
  std::int64_t runs = 0;
  std::int64_t drawings_per_run = 0;
};

ReplicationSummary replicate(const Experiment& experiment, std::int64_t n_runs,
                             std::uint64_t base_seed);

}  // namespace adastrat
