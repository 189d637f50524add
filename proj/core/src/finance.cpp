#include "adastrat/finance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adastrat {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// log(call payoff) - |x|^2/2, the ascent objective; -inf out of the money.
double shift_objective(const std::vector<double>& x, const AsianSpec& spec) {
  const double s = average_price(x, spec);
  if (!(s > spec.strike)) return kNegInf;
  return std::log(s - spec.strike) - 0.5 * norm_sq(x);
}

// s(x) together with the suffix sums S_i = (s0/d) sum_{p>=i} exp(L_p);
// every derivative of the average is a slice of these.
double average_with_suffix(const std::vector<double>& x, const AsianSpec& spec,
                           std::vector<double>& suffix) {
  const std::size_t d = x.size();
  const double dt = spec.maturity / static_cast<double>(d);
  const double drift = (spec.rate - 0.5 * spec.vol * spec.vol) * dt;
  const double volstep = spec.vol * std::sqrt(dt);
  suffix.resize(d);
  double log_level = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    log_level += drift + volstep * x[p];
    suffix[p] = std::exp(log_level);
  }
  double acc = 0.0;
  for (std::size_t p = d; p-- > 0;) {
    acc += suffix[p];
    suffix[p] = acc;
  }
  const double scale = spec.s0 / static_cast<double>(d);
  for (auto& v : suffix) v *= scale;
  return suffix[0];
}

// In-place LL^T of a dense symmetric matrix; false when not positive
// definite.
bool cholesky_factor(std::vector<double>& a, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (!(diag > 1e-14)) return false;
    const double root = std::sqrt(diag);
    a[j * d + j] = root;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / root;
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& a, std::size_t d,
                    std::vector<double>& b) {
  for (std::size_t i = 0; i < d; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * d + k] * b[k];
    b[i] = v / a[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < d; ++k) v -= a[k * d + i] * b[k];
    b[i] = v / a[i * d + i];
  }
}

}  // namespace

void AsianSpec::validate() const {
  if (!(s0 > 0.0)) throw std::invalid_argument("AsianSpec: s0 must be positive");
  if (!(vol > 0.0)) throw std::invalid_argument("AsianSpec: vol must be positive");
  if (!(maturity > 0.0)) throw std::invalid_argument("AsianSpec: maturity must be positive");
  if (!(strike > 0.0)) throw std::invalid_argument("AsianSpec: strike must be positive");
  if (monitor_dates < 1) throw std::invalid_argument("AsianSpec: need at least one date");
  if (!std::isfinite(rate)) throw std::invalid_argument("AsianSpec: rate must be finite");
}

double average_price(std::span<const double> x, const AsianSpec& spec) {
  const std::size_t d = static_cast<std::size_t>(spec.monitor_dates);
  if (x.size() != d) throw std::invalid_argument("average_price: dimension mismatch");
  const double dt = spec.maturity / static_cast<double>(d);
  const double drift = (spec.rate - 0.5 * spec.vol * spec.vol) * dt;
  const double volstep = spec.vol * std::sqrt(dt);
  double log_level = 0.0, sum = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    log_level += drift + volstep * x[p];
    sum += std::exp(log_level);
  }
  return spec.s0 / static_cast<double>(d) * sum;
}

double payoff(std::span<const double> x, const AsianSpec& spec) {
  const double s = average_price(x, spec);
  const double intrinsic =
      spec.kind == OptionKind::Call ? s - spec.strike : spec.strike - s;
  if (intrinsic <= 0.0) return 0.0;
  return std::exp(-spec.rate * spec.maturity) * intrinsic;
}

ShiftError::ShiftError(const std::string& what, std::vector<double> last)
    : std::runtime_error(what), last_(std::move(last)) {}

std::vector<double> find_is_shift(const AsianSpec& spec, const ShiftOptions& opt) {
  AsianSpec call = spec;
  call.kind = OptionKind::Call;
  call.validate();
  const std::size_t d = static_cast<std::size_t>(call.monitor_dates);

  std::vector<double> x(d, 0.0);
  if (!(average_price(x, call) > call.strike)) {
    // Out of the money at the origin: walk up the diagonal until the
    // average clears the strike, doubling the step.
    const double e = 1.0 / std::sqrt(static_cast<double>(d));
    double t = 1.0;
    while (t < 1e9) {
      std::fill(x.begin(), x.end(), t * e);
      if (average_price(x, call) > call.strike) break;
      t *= 2.0;
    }
    if (!(average_price(x, call) > call.strike))
      throw ShiftError("find_is_shift: no positive-payoff region found", x);
  }

  const double dt = call.maturity / static_cast<double>(d);
  const double volstep = call.vol * std::sqrt(dt);

  std::vector<double> suffix, grad(d), delta(d), probe(d), a(d * d);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const double s = average_with_suffix(x, call, suffix);
    const double margin = s - call.strike;
    if (!(margin > 0.0))
      throw ShiftError("find_is_shift: iterate left the payoff region", x);

    double gsq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      grad[i] = volstep * suffix[i] / margin - x[i];
      gsq += grad[i] * grad[i];
    }
    if (std::sqrt(gsq) < opt.grad_tolerance) return x;

    // Newton direction from the exact Hessian
    //   H_ij = volstep^2 S_max(i,j)/margin - w_i w_j - delta_ij,
    // falling back to the raw gradient when -H is not positive definite.
    for (std::size_t i = 0; i < d; ++i) {
      const double wi = volstep * suffix[i] / margin;
      for (std::size_t j = 0; j <= i; ++j) {
        const double wj = volstep * suffix[j] / margin;
        const double curv =
            volstep * volstep * suffix[std::max(i, j)] / margin - wi * wj;
        a[i * d + j] = a[j * d + i] = (i == j ? 1.0 : 0.0) - curv;
      }
    }
    bool newton = cholesky_factor(a, d);
    double dir_dot_g = gsq;
    if (newton) {
      delta = grad;
      cholesky_solve(a, d, delta);
      dir_dot_g = 0.0;
      for (std::size_t i = 0; i < d; ++i) dir_dot_g += delta[i] * grad[i];
      if (!(dir_dot_g > 0.0)) newton = false;
    }
    if (!newton) {
      delta = grad;
      dir_dot_g = gsq;
    }

    // Inside the quadratic basin the full Newton step is contractive but
    // its gain sinks below double resolution, so take it unguarded.
    if (newton && std::sqrt(gsq) <= 1e-5) {
      for (std::size_t i = 0; i < d; ++i) probe[i] = x[i] + delta[i];
      if (shift_objective(probe, call) > kNegInf) {
        x = probe;
        continue;
      }
    }

    const double fx = std::log(margin) - 0.5 * norm_sq(x);
    double t = 1.0;
    bool moved = false;
    while (t >= 1e-16) {
      for (std::size_t i = 0; i < d; ++i) probe[i] = x[i] + t * delta[i];
      const double ft = shift_objective(probe, call);
      if (ft > fx + 1e-4 * t * dir_dot_g) {
        x = probe;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) throw ShiftError("find_is_shift: line search stalled", x);
  }
  throw ShiftError("find_is_shift: iteration cap reached", x);
}

ShiftedIntegrand::ShiftedIntegrand(AsianSpec spec, std::vector<double> mu)
    : spec_(spec), mu_(std::move(mu)) {
  spec_.validate();
  if (mu_.size() != static_cast<std::size_t>(spec_.monitor_dates))
    throw std::invalid_argument("ShiftedIntegrand: shift dimension mismatch");
  mu_sq_ = norm_sq(mu_);
  if (mu_sq_ > 0.0) {
    const double norm = std::sqrt(mu_sq_);
    u_.resize(mu_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) u_[i] = mu_[i] / norm;
  }
  const double dt = spec_.maturity / static_cast<double>(spec_.monitor_dates);
  drift_ = (spec_.rate - 0.5 * spec_.vol * spec_.vol) * dt;
  volstep_ = spec_.vol * std::sqrt(dt);
  discount_ = std::exp(-spec_.rate * spec_.maturity);
}

const std::vector<double>& ShiftedIntegrand::direction() const {
  if (u_.empty())
    throw std::logic_error("ShiftedIntegrand: zero shift has no direction");
  return u_;
}

double ShiftedIntegrand::operator()(std::span<const double> x) const {
  const std::size_t d = mu_.size();
  if (x.size() != d) throw std::invalid_argument("ShiftedIntegrand: dimension mismatch");
  double log_level = 0.0, sum = 0.0, dot = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    log_level += drift_ + volstep_ * (x[p] + mu_[p]);
    sum += std::exp(log_level);
    dot += mu_[p] * x[p];
  }
  const double s = spec_.s0 / static_cast<double>(d) * sum;
  const double intrinsic =
      spec_.kind == OptionKind::Call ? s - spec_.strike : spec_.strike - s;
  if (intrinsic <= 0.0) return 0.0;
  return discount_ * intrinsic * std::exp(-dot - 0.5 * mu_sq_);
}

std::optional<double> zero_variance_bound(const SlabStrata& strata, std::size_t i,
                                          const ShiftedIntegrand& integrand) {
  const auto& u = integrand.direction();
  const std::size_t d = u.size();
  if (strata.dim() != d)
    throw std::invalid_argument("zero_variance_bound: dimension mismatch");

  // Backward difference of u: the weights of the cumulated coordinates.
  std::vector<double> w(d);
  for (std::size_t m = 0; m + 1 < d; ++m) w[m] = u[m] - u[m + 1];
  w[d - 1] = u[d - 1];
  const bool positive = std::all_of(w.begin(), w.end(), [](double v) { return v > 0.0; });
  const bool negative = std::all_of(w.begin(), w.end(), [](double v) { return v < 0.0; });
  if (!positive && !negative) return std::nullopt;

  // The infimum over the slab sits at the boundary where the constrained
  // minimum is smallest: the lower one when it grows with z, else the
  // upper one.
  const double z = positive ? strata.axis().lower(i) : strata.axis().upper(i);
  if (std::isinf(z)) return 0.0;

  const AsianSpec& spec = integrand.spec();
  const double dt = spec.maturity / static_cast<double>(d);
  const double volstep = spec.vol * std::sqrt(dt);
  const double drift = (spec.rate - 0.5 * spec.vol * spec.vol) * dt;
  double u_mu = 0.0, u_sum = 0.0;
  for (std::size_t m = 0; m < d; ++m) {
    u_mu += u[m] * integrand.shift()[m];
    u_sum += u[m];
  }
  const double v = volstep * (z + u_mu) + drift * u_sum;

  const double sign = positive ? 1.0 : -1.0;
  double w_total = 0.0, w_entropy = 0.0;
  for (double wm : w) {
    const double t = sign * wm;
    w_total += t;
    w_entropy += t * std::log(t);
  }
  const double log_level = (sign * v - w_entropy) / w_total;
  return spec.s0 / static_cast<double>(d) * std::exp(log_level) * w_total;
}

Stratification make_slab_stratification(const SlabStrata& strata,
                                        const ShiftedIntegrand& integrand) {
  if (strata.dim() != integrand.shift().size())
    throw std::invalid_argument("make_slab_stratification: dimension mismatch");
  auto sampler = [strata, integrand](std::size_t i, Rng& rng) {
    thread_local std::vector<double> x;
    x.resize(strata.dim());
    strata.sample(i, rng, x);
    return integrand(x);
  };
  return Stratification(strata.axis().probabilities(), std::move(sampler));
}

ComparisonResult compare_with_proportional(const AsianSpec& spec,
                                           const ComparisonConfig& config,
                                           std::uint64_t seed) {
  spec.validate();
  if (config.strata < 1) throw std::invalid_argument("compare_with_proportional: need strata");
  if (config.total % static_cast<std::int64_t>(config.strata) != 0)
    throw std::invalid_argument(
        "compare_with_proportional: proportional baseline needs strata dividing total");
  Schedule schedule{config.schedule};
  if (schedule.final_total() != config.total)
    throw std::invalid_argument("compare_with_proportional: schedule must end at total");

  ShiftedIntegrand f(spec, find_is_shift(spec));
  SlabStrata slabs(f.direction(), config.strata);
  Stratification strat = make_slab_stratification(slabs, f);

  const EstimateReport fixed =
      run_fixed(strat, Proportions(strat.probabilities()), config.total, derive_seed(seed, 0));
  const EstimateReport ada =
      run_adaptive(strat, schedule, config.rule, derive_seed(seed, 1)).back();

  ComparisonResult res;
  res.direction = f.direction();
  res.shift = f.shift();
  res.price_baseline = fixed.c_hat;
  res.price_adaptive = ada.c_hat;
  res.baseline_sigma = fixed.stratum_sigma;
  res.adaptive_sigma = ada.stratum_sigma;
  res.adaptive_mean = ada.stratum_mean;
  res.adaptive_counts = ada.counts;

  const double n = static_cast<double>(config.total);
  double fixed_var = 0.0;
  for (std::size_t i = 0; i < config.strata; ++i)
    fixed_var += strat.probability(i) * fixed.stratum_sigma[i] * fixed.stratum_sigma[i];
  res.var_baseline = fixed_var / n;
  res.var_adaptive = ada.sigma_star_hat * ada.sigma_star_hat / n;
  res.ratio = res.var_adaptive > 0.0
                  ? res.var_baseline / res.var_adaptive
                  : std::numeric_limits<double>::infinity();

  res.s_star.resize(config.strata);
  for (std::size_t i = 0; i < config.strata; ++i) {
    const auto bound = zero_variance_bound(slabs, i, f);
    res.s_star[i] = bound ? *bound : std::numeric_limits<double>::quiet_NaN();
    if (spec.kind == OptionKind::Put && bound && *bound > spec.strike)
      ++res.certified_zero_variance;
  }
  return res;
}

}  // namespace adastrat
