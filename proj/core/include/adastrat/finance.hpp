#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adastrat/estimator.hpp"
#include "adastrat/normal_strata.hpp"

namespace adastrat {

enum class OptionKind { Call, Put };

// Discretely monitored arithmetic-average option under Black-Scholes:
// d monitoring dates at m*T/d, average of the exact lognormal path.
struct AsianSpec {
  double s0 = 50.0;
  double vol = 0.1;
  double rate = 0.05;
  double maturity = 1.0;
  std::int64_t monitor_dates = 16;
  double strike = 45.0;
  OptionKind kind = OptionKind::Call;

  void validate() const;
};

// Average of the monitoring-date prices driven by the standard normal
// increments x: (s0/d) * sum_m exp(sum_{p<=m} (r - V^2/2)T/d + V sqrt(T/d) x_p).
double average_price(std::span<const double> x, const AsianSpec& spec);

// Discounted payoff of the average against the strike.
double payoff(std::span<const double> x, const AsianSpec& spec);

struct ShiftOptions {
  int max_iterations = 5000;
  double grad_tolerance = 1e-8;
};

// Thrown when the shift search fails; carries the last iterate for
// diagnostics.
class ShiftError : public std::runtime_error {
 public:
  ShiftError(const std::string& what, std::vector<double> last);
  const std::vector<double>& last_iterate() const { return last_; }

 private:
  std::vector<double> last_;
};

// Mean shift mu maximizing log(call payoff) - |x|^2/2, located by
// gradient ascent from the origin (pushed into the positive-payoff
// region first when the origin is out of the money). The call surface
// defines the shift regardless of spec.kind.
std::vector<double> find_is_shift(const AsianSpec& spec, const ShiftOptions& opt = {});

// Importance-sampled integrand f_mu(x) = payoff(x + mu) exp(-mu'x - mu'mu/2),
// whose expectation under N(0, I_d) equals the plain price. Also owns the
// normalized direction u = mu/|mu| used to stratify.
class ShiftedIntegrand {
 public:
  ShiftedIntegrand(AsianSpec spec, std::vector<double> mu);

  double operator()(std::span<const double> x) const;

  const AsianSpec& spec() const { return spec_; }
  const std::vector<double>& shift() const { return mu_; }

  // Unit vector mu/|mu|; only defined for a nonzero shift.
  const std::vector<double>& direction() const;

 private:
  AsianSpec spec_;
  std::vector<double> mu_;
  std::vector<double> u_;
  double mu_sq_ = 0.0;
  double drift_ = 0.0;
  double volstep_ = 0.0;
  double discount_ = 0.0;
};

// Exact infimum of the average price s(x + mu) over the hyperplane
// u'x = z at the stratum boundary, from the Lagrangian closed form.
// Requires the difference weights w (u differenced backward) to share one
// sign; mixed signs make the infimum 0 and return nullopt. A put stratum
// whose bound clears the strike has identically zero payoff.
std::optional<double> zero_variance_bound(const SlabStrata& strata, std::size_t i,
                                          const ShiftedIntegrand& integrand);

struct ComparisonConfig {
  std::size_t strata = 100;
  std::int64_t total = 1'000'000;
  std::vector<std::int64_t> schedule = {100'000, 500'000, 1'000'000};
  AllocationRule rule = AllocationRule::A;
};

// Side-by-side run of the proportional-allocation baseline (importance
// sampling + slab stratification, fixed p_i N draws per stratum) against
// the adaptive allocation on the same strata and direction.
struct ComparisonResult {
  double price_baseline = 0.0;
  double price_adaptive = 0.0;
  double var_baseline = 0.0;       // (1/N) sum p_i sigma_hat_i^2
  double var_adaptive = 0.0;  // (1/N) (sum p_i sigma_hat_i)^2
  double ratio = 0.0;

  std::vector<double> direction;
  std::vector<double> shift;
  std::vector<double> baseline_sigma;
  std::vector<double> adaptive_sigma;
  std::vector<double> adaptive_mean;
  std::vector<std::int64_t> adaptive_counts;
  std::vector<double> s_star;  // per-stratum price infimum, NaN when unbounded below
  std::size_t certified_zero_variance = 0;
};

ComparisonResult compare_with_proportional(const AsianSpec& spec,
                                           const ComparisonConfig& config,
                                           std::uint64_t seed);

// Stratification adapter: conditional slab draw piped through f_mu.
Stratification make_slab_stratification(const SlabStrata& strata,
                                        const ShiftedIntegrand& integrand);

}  // namespace adastrat
