#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "adastrat/stats.hpp"

namespace adastrat {

// Drawing budget of one adaptive step: total_new = N^k - N^{k-1} draws,
// of which one per stratum is forced and free_budget = total_new - I is
// allocated by rule.
struct StepBudget {
  std::int64_t total_new = 0;
  std::int64_t free_budget = 0;

  static StepBudget for_step(std::int64_t total_new, std::int64_t strata);
};

// Minimize sum_i alpha_i^2 / (n_i + m_i) subject to sum m_i = budget,
// m_i >= 0. Strata with zero weight must be stripped before building the
// problem; n_i counts drawings already committed (including the forced
// one of the current step).
struct WaterfillProblem {
  std::vector<double> n;
  std::vector<double> alpha;
  std::int64_t budget = 0;
};

// Integer rounding by systematic sampling: floor the running sums, then
// difference. Keeps the total exact and each component within one unit
// of its real-valued target.
std::vector<std::int64_t> systematic_round(std::span<const double> m);

// Closed-form solution of WaterfillProblem: sort the ratios n_i/alpha_i
// in decreasing order, locate the largest prefix that stays dry, and
// level the rest to a common value of alpha_i^2/(n_i+m_i)^2.
std::vector<double> waterfill_allocate(const WaterfillProblem& prob);

// Allocation proportional to the estimated optimal proportions
// p_i sigma_hat_i / sum_j p_j sigma_hat_j; proportional to p_i alone when
// every sigma_hat vanishes. One further forced drawing per stratum is
// accounted by the caller.
AllocationVector allocate_rule_a(std::span<const double> p,
                                 std::span<const double> sigma_hat,
                                 const StepBudget& budget);

// Exact per-step variance minimization: zero-dispersion strata get
// nothing, the rest are water-filled against their committed counts.
AllocationVector allocate_rule_b(std::span<const double> p,
                                 std::span<const double> sigma_hat,
                                 std::span<const std::int64_t> prev_counts,
                                 const StepBudget& budget);

// Micro-ordering of the draws inside one macro-step: nu[i] counts draws
// given to stratum i among the first n of the step. The selection rule
// keeps every stratum's running share within an explicit band around its
// target rate r_i = (new_counts[i]-prev_counts[i]) / (new_total-prev_total).
struct InterleaveState {
  std::vector<std::int64_t> nu;
  std::int64_t n = 0;
  std::vector<std::int64_t> prev_counts;
  std::vector<std::int64_t> new_counts;
  std::int64_t prev_total = 0;
  std::int64_t new_total = 0;

  static InterleaveState begin(std::vector<std::int64_t> prev_counts,
                               std::vector<std::int64_t> new_counts);

  double rate(std::size_t i) const;
  bool done() const { return n == new_total; }
};

// One micro-step: pick the stratum whose running share lags its target
// most (ties broken by larger rate, then larger index) and advance it.
std::pair<std::size_t, InterleaveState> interleave_step(const InterleaveState& state);

}  // namespace adastrat
