#include "adastrat/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace adastrat {

namespace {

void kahan_add(double& sum, double& comp, double value) {
  const double y = value - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

void check_sum_to_one(const std::vector<double>& v, const char* what) {
  double total = 0.0;
  for (double x : v) total += x;
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(what) + ": must sum to one");
}

}  // namespace

void StratumMoments::add(double value) {
  ++count_;
  kahan_add(sum_, sum_c_, value);
  kahan_add(sum_sq_, sum_sq_c_, value * value);
}

void StratumMoments::reset() { *this = StratumMoments{}; }

double StratumMoments::mean() const {
  if (count_ == 0) throw std::logic_error("StratumMoments::mean: no observations");
  return sum_ / static_cast<double>(count_);
}

double StratumMoments::sigma() const {
  if (count_ == 0) throw std::logic_error("StratumMoments::sigma: no observations");
  const double m = mean();
  const double var = sum_sq_ / static_cast<double>(count_) - m * m;
  return std::sqrt(std::max(var, 0.0));
}

Proportions::Proportions(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Proportions: empty vector");
  for (double q : values_)
    if (!(q >= 0.0)) throw std::invalid_argument("Proportions: entries must be nonnegative");
  check_sum_to_one(values_, "Proportions");
}

Stratification::Stratification(std::vector<double> probabilities, StratumSampler sampler)
    : probabilities_(std::move(probabilities)), sampler_(std::move(sampler)) {
  if (probabilities_.empty()) throw std::invalid_argument("Stratification: no strata");
  for (double p : probabilities_)
    if (!(p > 0.0))
      throw std::invalid_argument("Stratification: stratum probabilities must be positive");
  check_sum_to_one(probabilities_, "Stratification probabilities");
  if (!sampler_) throw std::invalid_argument("Stratification: null sampler");
}

double stratified_variance(std::span<const double> probabilities,
                           std::span<const double> sigma, const Proportions& q,
                           std::int64_t n_total) {
  if (probabilities.size() != sigma.size() || probabilities.size() != q.size())
    throw std::invalid_argument("stratified_variance: size mismatch");
  if (n_total < 1) throw std::invalid_argument("stratified_variance: n_total must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double ps = probabilities[i] * sigma[i];
    if (ps == 0.0) continue;
    if (!(q[i] > 0.0))
      throw std::domain_error("stratified_variance: infeasible allocation");
    acc += ps * ps / q[i];
  }
  return acc / static_cast<double>(n_total);
}

Proportions optimal_proportions(std::span<const double> probabilities,
                                std::span<const double> sigma) {
  if (probabilities.size() != sigma.size())
    throw std::invalid_argument("optimal_proportions: size mismatch");
  double denom = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i)
    denom += probabilities[i] * sigma[i];
  if (!(denom > 0.0))
    throw std::domain_error("optimal_proportions: every stratum has zero dispersion");
  std::vector<double> q(probabilities.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = probabilities[i] * sigma[i] / denom;
  return Proportions(std::move(q));
}

}  // namespace adastrat
