#pragma once

#include <cstdint>
#include <vector>

#include "adastrat/estimator.hpp"
#include "adastrat/finance.hpp"
#include "adastrat/normal_strata.hpp"
#include "adastrat/stats.hpp"

namespace adastrat {

// The benchmark toy problem: estimate E[X] = 0 for X standard normal,
// stratified over quantile cells, integrand the identity.
Stratification normal_identity_stratification(const QuantileStrata1D& strata);

// Exact per-stratum standard deviations of the identity integrand.
std::vector<double> exact_sigmas(const QuantileStrata1D& strata);

// sum_i p_i sigma_i, the optimal-allocation standard deviation scale.
double exact_sigma_star(const QuantileStrata1D& strata);

// Checkpoints used throughout the toy experiment.
std::vector<std::int64_t> default_toy_schedule();

AsianSpec default_asian_spec(std::int64_t monitor_dates, double strike, OptionKind kind);

}  // namespace adastrat
