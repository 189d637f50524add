#include "adastrat/experiments.hpp"

#include <cmath>

namespace adastrat {

Stratification normal_identity_stratification(const QuantileStrata1D& strata) {
  auto sampler = [strata](std::size_t i, Rng& rng) { return strata.sample(i, rng); };
  return Stratification(strata.probabilities(), std::move(sampler));
}

std::vector<double> exact_sigmas(const QuantileStrata1D& strata) {
  std::vector<double> sigma(strata.strata_count());
  for (std::size_t i = 0; i < sigma.size(); ++i)
    sigma[i] = std::sqrt(strata.conditional_moments(i).variance);
  return sigma;
}

double exact_sigma_star(const QuantileStrata1D& strata) {
  double acc = 0.0;
  for (std::size_t i = 0; i < strata.strata_count(); ++i)
    acc += strata.probability(i) * std::sqrt(strata.conditional_moments(i).variance);
  return acc;
}

std::vector<std::int64_t> default_toy_schedule() { return {300, 1300, 11300, 31300}; }

AsianSpec default_asian_spec(std::int64_t monitor_dates, double strike, OptionKind kind) {
  AsianSpec spec;
  spec.s0 = 50.0;
  spec.vol = 0.1;
  spec.rate = 0.05;
  spec.maturity = 1.0;
  spec.monitor_dates = monitor_dates;
  spec.strike = strike;
  spec.kind = kind;
  return spec;
}

}  // namespace adastrat
