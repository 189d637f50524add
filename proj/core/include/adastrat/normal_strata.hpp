#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adastrat/rng.hpp"

namespace adastrat {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse standard normal CDF. Rational approximation polished with one
// Halley step; throws std::domain_error unless alpha is in (0,1).
double normal_quantile(double alpha);

inline double standard_normal(Rng& rng) { return normal_quantile(rng.uniform01()); }

// Partition of the real line into strata (y_{i-1}, y_i] for a standard
// normal variable. Boundary CDF values are cached so conditional draws
// cost one uniform and one quantile evaluation.
class QuantileStrata1D {
 public:
  // Interior boundaries, strictly increasing and finite; the two infinite
  // end boundaries are implied.
  explicit QuantileStrata1D(std::vector<double> interior_boundaries);

  // I strata of probability 1/I each, cut at the i/I quantiles.
  static QuantileStrata1D equiprobable(std::size_t strata);

  std::size_t strata_count() const { return prob_.size(); }
  double lower(std::size_t i) const { return bounds_[i]; }
  double upper(std::size_t i) const { return bounds_[i + 1]; }
  double probability(std::size_t i) const { return prob_[i]; }
  double cdf_lower(std::size_t i) const { return cdf_[i]; }
  double cdf_upper(std::size_t i) const { return cdf_[i + 1]; }
  const std::vector<double>& probabilities() const { return prob_; }

  struct Moments {
    double mean;
    double variance;
  };

  // Exact conditional mean and variance of X given X in stratum i, from
  // the closed-form truncated moments of the standard normal.
  Moments conditional_moments(std::size_t i) const;

  // Inverse-CDF draw of X conditioned on stratum i.
  double sample(std::size_t i, Rng& rng) const;

 private:
  QuantileStrata1D() = default;

  std::vector<double> bounds_;  // size I+1, bounds_[0] = -inf, bounds_[I] = +inf
  std::vector<double> cdf_;     // CDF at bounds_, cdf_[0] = 0, cdf_[I] = 1
  std::vector<double> prob_;
};

// Strata of R^d cut by the projection on a fixed unit direction u:
// stratum i is {x : u'x in (y_{i-1}, y_i]} with equiprobable quantile
// boundaries. Under N(0, I_d) the projection and its orthogonal
// complement are independent, which is what sample() exploits.
class SlabStrata {
 public:
  SlabStrata(std::vector<double> direction, std::size_t strata);

  std::size_t dim() const { return direction_.size(); }
  std::size_t strata_count() const { return axis_.strata_count(); }
  const std::vector<double>& direction() const { return direction_; }
  const QuantileStrata1D& axis() const { return axis_; }
  double probability(std::size_t i) const { return axis_.probability(i); }

  // Draw X ~ N(0, I_d) conditioned on stratum i: X = Y + (Z - u'Y) u with
  // Y unconditioned and Z a conditional draw of the projection.
  void sample(std::size_t i, Rng& rng, std::span<double> out) const;
  std::vector<double> sample(std::size_t i, Rng& rng) const;

 private:
  std::vector<double> direction_;
  QuantileStrata1D axis_;
};

}  // namespace adastrat
