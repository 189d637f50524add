#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "adastrat/rng.hpp"

namespace adastrat {

// Running first and second moments of the draws landed in one stratum.
// Sums are compensated so long accumulation streams keep full precision.
class StratumMoments {
 public:
  void add(double value);
  void reset();

  std::int64_t count() const { return count_; }
  double sum() const { return sum_; }
  double sum_sq() const { return sum_sq_; }

  // Throw std::logic_error when no draw has been recorded.
  double mean() const;

  // Empirical standard deviation with divisor n, clamped at zero.
  double sigma() const;

 private:
  std::int64_t count_ = 0;
  double sum_ = 0.0;
  double sum_c_ = 0.0;
  double sum_sq_ = 0.0;
  double sum_sq_c_ = 0.0;
};

// Real-valued per-stratum allocation targets next to their integer
// rounding. Producers guarantee sum(real_alloc) ~ budget and
// sum(int_alloc) == budget.
struct AllocationVector {
  std::vector<double> real_alloc;
  std::vector<std::int64_t> int_alloc;
  std::int64_t budget = 0;
};

// Allocation proportions: nonnegative, summing to one.
class Proportions {
 public:
  explicit Proportions(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

using StratumSampler = std::function<double(std::size_t, Rng&)>;

// A partition of the sample space into strata of known probability,
// together with a conditional sampler for the integrand: draw(i, rng)
// returns one evaluation f(X) with X conditioned on stratum i.
class Stratification {
 public:
  Stratification(std::vector<double> probabilities, StratumSampler sampler);

  std::size_t strata_count() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  double probability(std::size_t i) const { return probabilities_[i]; }
  double draw(std::size_t i, Rng& rng) const { return sampler_(i, rng); }

 private:
  std::vector<double> probabilities_;
  StratumSampler sampler_;
};

// Variance of the stratified estimator with n total draws split as q:
// (1/n) * sum_i p_i^2 sigma_i^2 / q_i.
double stratified_variance(std::span<const double> probabilities,
                           std::span<const double> sigma, const Proportions& q,
                           std::int64_t n_total);

// Proportions q*_i proportional to p_i sigma_i, the minimizer of
// stratified_variance. Throws std::domain_error when every product
// p_i sigma_i vanishes.
Proportions optimal_proportions(std::span<const double> probabilities,
                                std::span<const double> sigma);

}  // namespace adastrat
