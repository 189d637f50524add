#include "adastrat/estimator.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adastrat/normal_strata.hpp"

namespace adastrat {

namespace {

EstimateReport make_report(const Stratification& strat,
                           const std::vector<StratumMoments>& moments,
                           const std::vector<std::int64_t>& counts) {
  const std::size_t strata = strat.strata_count();
  EstimateReport rep;
  rep.counts = counts;
  rep.stratum_mean.resize(strata);
  rep.stratum_sigma.resize(strata);
  double c_hat = 0.0, sigma_star = 0.0;
  for (std::size_t i = 0; i < strata; ++i) {
    rep.stratum_mean[i] = moments[i].mean();
    rep.stratum_sigma[i] = moments[i].sigma();
    c_hat += strat.probability(i) * rep.stratum_mean[i];
    sigma_star += strat.probability(i) * rep.stratum_sigma[i];
  }
  rep.c_hat = c_hat;
  rep.sigma_star_hat = sigma_star;
  const double n = static_cast<double>(rep.total());
  rep.ci_halfwidth =
      normal_quantile(0.5 * (1.0 + kDefaultCiLevel)) * sigma_star / std::sqrt(n);
  return rep;
}

}  // namespace

Schedule::Schedule(std::vector<std::int64_t> checkpoints)
    : checkpoints_(std::move(checkpoints)) {
  if (checkpoints_.empty()) throw std::invalid_argument("Schedule: empty");
  if (checkpoints_.front() < 1)
    throw std::invalid_argument("Schedule: first checkpoint must be positive");
  for (std::size_t k = 1; k < checkpoints_.size(); ++k)
    if (checkpoints_[k] <= checkpoints_[k - 1])
      throw std::invalid_argument("Schedule: checkpoints must be strictly increasing");
}

void Schedule::validate_for(std::int64_t strata) const {
  std::int64_t prev = 0;
  for (std::int64_t n : checkpoints_) {
    if (n - prev < strata)
      throw std::invalid_argument("Schedule: step increment below stratum count");
    prev = n;
  }
}

AdaptiveState AdaptiveState::begin(std::size_t strata, AllocationRule rule,
                                   std::uint64_t seed) {
  AdaptiveState st;
  st.rule = rule;
  st.counts.assign(strata, 0);
  st.moments.assign(strata, StratumMoments{});
  st.streams.reserve(strata);
  for (std::size_t i = 0; i < strata; ++i) st.streams.emplace_back(seed, i);
  return st;
}

std::int64_t EstimateReport::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::vector<EstimateReport> run_adaptive(const Stratification& strat,
                                         const Schedule& schedule, AllocationRule rule,
                                         std::uint64_t seed) {
  const std::size_t strata = strat.strata_count();
  schedule.validate_for(static_cast<std::int64_t>(strata));

  auto state = AdaptiveState::begin(strata, rule, seed);
  const auto& p = strat.probabilities();
  std::vector<double> sigma(strata, 1.0);  // sigma_hat before any drawing

  std::vector<EstimateReport> reports;
  reports.reserve(schedule.steps());
  std::int64_t prev_total = 0;
  for (std::size_t k = 0; k < schedule.steps(); ++k) {
    if (k > 0)
      for (std::size_t i = 0; i < strata; ++i) sigma[i] = state.moments[i].sigma();

    const auto budget =
        StepBudget::for_step(schedule.total(k) - prev_total, static_cast<std::int64_t>(strata));
    const AllocationVector alloc =
        rule == AllocationRule::A
            ? allocate_rule_a(p, sigma, budget)
            : allocate_rule_b(p, sigma, state.counts, budget);

    for (std::size_t i = 0; i < strata; ++i) {
      const std::int64_t draws = 1 + alloc.int_alloc[i];
      for (std::int64_t j = 0; j < draws; ++j)
        state.moments[i].add(strat.draw(i, state.streams[i]));
      state.counts[i] += draws;
    }
    prev_total = schedule.total(k);
    ++state.step;
    reports.push_back(make_report(strat, state.moments, state.counts));
  }
  return reports;
}

EstimateReport run_fixed(const Stratification& strat, const Proportions& q,
                         std::int64_t n_total, std::uint64_t seed) {
  const std::size_t strata = strat.strata_count();
  if (q.size() != strata) throw std::invalid_argument("run_fixed: proportions size mismatch");
  if (n_total < 1) throw std::invalid_argument("run_fixed: n_total must be positive");

  std::vector<double> target(strata);
  for (std::size_t i = 0; i < strata; ++i)
    target[i] = q[i] * static_cast<double>(n_total);
  const auto counts_int = systematic_round(target);
  for (std::int64_t c : counts_int)
    if (c < 1) throw std::domain_error("run_fixed: allocation leaves a stratum empty");

  std::vector<StratumMoments> moments(strata);
  std::vector<std::int64_t> counts(strata);
  for (std::size_t i = 0; i < strata; ++i) {
    Rng stream(seed, i);
    for (std::int64_t j = 0; j < counts_int[i]; ++j)
      moments[i].add(strat.draw(i, stream));
    counts[i] = counts_int[i];
  }
  return make_report(strat, moments, counts);
}

std::pair<double, double> confidence_interval(const EstimateReport& report, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence_interval: level outside (0,1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half =
      z * report.sigma_star_hat / std::sqrt(static_cast<double>(report.total()));
  return {report.c_hat - half, report.c_hat + half};
}

ReplicationSummary replicate(const Experiment& experiment, std::int64_t n_runs,
                             std::uint64_t base_seed) {
  if (n_runs < 2) throw std::invalid_argument("replicate: need at least two runs");
  StratumMoments acc;
  double wall_ns = 0.0;
  std::int64_t drawings = 0;
  for (std::int64_t l = 0; l < n_runs; ++l) {
    const auto t0 = std::chrono::steady_clock::now();
    const EstimateReport rep = experiment(derive_seed(base_seed, static_cast<std::uint64_t>(l)));
    const auto t1 = std::chrono::steady_clock::now();
    wall_ns += static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    if (l == 0) drawings = rep.total();
    acc.add(rep.c_hat);
  }
  ReplicationSummary s;
  s.runs = n_runs;
  s.drawings_per_run = drawings;
  s.mean = acc.mean();
  const double sd = acc.sigma();
  s.variance = sd * sd;
  s.scaled_std = sd * std::sqrt(static_cast<double>(drawings));
  s.mean_wall_ns = wall_ns / static_cast<double>(n_runs);
  return s;
}

}  // namespace adastrat
