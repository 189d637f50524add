#include "adastrat/normal_strata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adastrat {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

// Acklam's rational approximation, |relative error| < 1.2e-9 before
// polishing.
double quantile_estimate(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// y * pdf(y) with the convention that the product vanishes at +-inf.
double y_pdf(double y) { return std::isinf(y) ? 0.0 : y * normal_pdf(y); }

}  // namespace

double normal_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / kSqrt2Pi;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("normal_quantile: alpha outside (0,1)");
  double x = quantile_estimate(alpha);
  // One Halley step against erfc-based CDF values.
  const double e = normal_cdf(x) - alpha;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

QuantileStrata1D::QuantileStrata1D(std::vector<double> interior_boundaries) {
  const std::size_t cuts = interior_boundaries.size();
  for (std::size_t i = 0; i < cuts; ++i) {
    if (!std::isfinite(interior_boundaries[i]))
      throw std::invalid_argument("QuantileStrata1D: boundary not finite");
    if (i > 0 && !(interior_boundaries[i - 1] < interior_boundaries[i]))
      throw std::invalid_argument("QuantileStrata1D: boundaries not increasing");
  }
  bounds_.reserve(cuts + 2);
  bounds_.push_back(-std::numeric_limits<double>::infinity());
  bounds_.insert(bounds_.end(), interior_boundaries.begin(), interior_boundaries.end());
  bounds_.push_back(std::numeric_limits<double>::infinity());

  cdf_.resize(bounds_.size());
  cdf_.front() = 0.0;
  cdf_.back() = 1.0;
  for (std::size_t i = 1; i + 1 < bounds_.size(); ++i) cdf_[i] = normal_cdf(bounds_[i]);

  prob_.resize(bounds_.size() - 1);
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    prob_[i] = cdf_[i + 1] - cdf_[i];
    if (!(prob_[i] > 0.0))
      throw std::invalid_argument("QuantileStrata1D: stratum with zero probability");
  }
}

QuantileStrata1D QuantileStrata1D::equiprobable(std::size_t strata) {
  if (strata == 0) throw std::invalid_argument("QuantileStrata1D: need at least one stratum");
  QuantileStrata1D s;
  const double inf = std::numeric_limits<double>::infinity();
  s.bounds_.resize(strata + 1);
  s.cdf_.resize(strata + 1);
  s.prob_.assign(strata, 1.0 / static_cast<double>(strata));
  s.bounds_.front() = -inf;
  s.bounds_.back() = inf;
  s.cdf_.front() = 0.0;
  s.cdf_.back() = 1.0;
  for (std::size_t i = 1; i < strata; ++i) {
    const double alpha = static_cast<double>(i) / static_cast<double>(strata);
    s.cdf_[i] = alpha;
    s.bounds_[i] = normal_quantile(alpha);
  }
  return s;
}

QuantileStrata1D::Moments QuantileStrata1D::conditional_moments(std::size_t i) const {
  const double lo = bounds_[i];
  const double hi = bounds_[i + 1];
  const double p = prob_[i];
  const double first = normal_pdf(lo) - normal_pdf(hi);
  const double second = y_pdf(lo) - y_pdf(hi) + p;
  const double mean = first / p;
  return {mean, std::max(second / p - mean * mean, 0.0)};
}

double QuantileStrata1D::sample(std::size_t i, Rng& rng) const {
  const double lo = cdf_[i];
  const double alpha = lo + rng.uniform01() * (cdf_[i + 1] - lo);
  return normal_quantile(alpha);
}

SlabStrata::SlabStrata(std::vector<double> direction, std::size_t strata)
    : direction_(std::move(direction)), axis_(QuantileStrata1D::equiprobable(strata)) {
  if (direction_.empty()) throw std::invalid_argument("SlabStrata: empty direction");
  double norm2 = 0.0;
  for (double u : direction_) norm2 += u * u;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw std::invalid_argument("SlabStrata: direction must have unit norm");
}

void SlabStrata::sample(std::size_t i, Rng& rng, std::span<double> out) const {
  if (out.size() != direction_.size())
    throw std::invalid_argument("SlabStrata::sample: output size mismatch");
  const double z = axis_.sample(i, rng);
  double dot = 0.0;
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = standard_normal(rng);
    dot += direction_[m] * out[m];
  }
  const double shift = z - dot;
  for (std::size_t m = 0; m < out.size(); ++m) out[m] += shift * direction_[m];
}

std::vector<double> SlabStrata::sample(std::size_t i, Rng& rng) const {
  std::vector<double> x(direction_.size());
  sample(i, rng, x);
  return x;
}

}  // namespace adastrat
