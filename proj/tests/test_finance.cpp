#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "adastrat/experiments.hpp"
#include "adastrat/finance.hpp"
#include "adastrat/normal_strata.hpp"
#include "adastrat/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace adastrat;

namespace {

std::vector<double> random_vector(std::size_t d, Rng& rng, double scale) {
  std::vector<double> x(d);
  for (auto& v : x) v = scale * (rng.uniform01() - 0.5);
  return x;
}

// Step-by-step path simulation, the long way around.
double recursion_average(std::span<const double> x, const AsianSpec& spec) {
  const double dt = spec.maturity / static_cast<double>(spec.monitor_dates);
  double level = spec.s0;
  double acc = 0.0;
  for (std::int64_t m = 0; m < spec.monitor_dates; ++m) {
    level *= std::exp((spec.rate - 0.5 * spec.vol * spec.vol) * dt +
                      spec.vol * std::sqrt(dt) * x[static_cast<std::size_t>(m)]);
    acc += level;
  }
  return acc / static_cast<double>(spec.monitor_dates);
}

double average_gradient_entry(const std::vector<double>& y,
                              const AsianSpec& spec, std::size_t q) {
  const double dt = spec.maturity / static_cast<double>(spec.monitor_dates);
  const double drift = (spec.rate - 0.5 * spec.vol * spec.vol) * dt;
  const double volstep = spec.vol * std::sqrt(dt);
  double log_level = 0.0, acc = 0.0;
  for (std::size_t m = 0; m < y.size(); ++m) {
    log_level += drift + volstep * y[m];
    if (m >= q) acc += std::exp(log_level);
  }
  return spec.s0 / static_cast<double>(y.size()) * volstep * acc;
}

}  // namespace

TEST_CASE("option specs are validated") {
  AsianSpec spec = default_asian_spec(16, 45.0, OptionKind::Call);
  CHECK_NOTHROW(spec.validate());
  spec.vol = -0.1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = default_asian_spec(0, 45.0, OptionKind::Call);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = default_asian_spec(16, -45.0, OptionKind::Call);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("the average price matches the path recursion") {
  SUBCASE("zero drift keeps the price at the start value") {
    AsianSpec spec = default_asian_spec(8, 45.0, OptionKind::Call);
    spec.vol = 0.3;
    spec.rate = 0.045;  // r = V^2/2
    const std::vector<double> x(8, 0.0);
    CHECK(average_price(x, spec) == doctest::Approx(50.0).epsilon(1e-14));
  }
  SUBCASE("single monitoring date closed form") {
    const AsianSpec spec = default_asian_spec(1, 45.0, OptionKind::Call);
    const std::vector<double> x = {0.0};
    CHECK(average_price(x, spec) ==
          doctest::Approx(50.0 * std::exp(0.045)).epsilon(1e-14));
  }
  SUBCASE("recursion agreement across dimensions") {
    Rng rng(60601, 0);
    for (std::int64_t d : {1, 16, 64}) {
      const AsianSpec spec = default_asian_spec(d, 45.0, OptionKind::Call);
      for (int rep = 0; rep < 25; ++rep) {
        const auto x = random_vector(static_cast<std::size_t>(d), rng, 4.0);
        const double direct = average_price(x, spec);
        const double stepped = recursion_average(x, spec);
        CHECK(direct == doctest::Approx(stepped).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("payoffs discount the intrinsic value") {
  AsianSpec call = default_asian_spec(8, 45.0, OptionKind::Call);
  call.vol = 0.3;
  call.rate = 0.045;
  AsianSpec put = call;
  put.kind = OptionKind::Put;

  const std::vector<double> origin(8, 0.0);  // average is exactly 50
  CHECK(payoff(origin, call) ==
        doctest::Approx(std::exp(-0.045) * 5.0).epsilon(1e-14));
  CHECK(payoff(origin, put) == 0.0);

  Rng rng(1999, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto x = random_vector(8, rng, 6.0);
    const double c = payoff(x, call);
    const double p = payoff(x, put);
    CHECK(c >= 0.0);
    CHECK(p >= 0.0);
    CHECK(c * p == 0.0);
    const double forward =
        std::exp(-call.rate * call.maturity) * (average_price(x, call) - 45.0);
    CHECK(c - p == doctest::Approx(forward).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("the importance-sampling shift is a stationary point") {
  const AsianSpec spec = default_asian_spec(16, 45.0, OptionKind::Call);
  const auto mu = find_is_shift(spec);
  REQUIRE(mu.size() == 16);

  // At the optimum the gradient of log g equals the point itself.
  for (std::size_t q = 0; q < mu.size(); ++q) {
    const double h = 1e-5;
    auto up = mu, down = mu;
    up[q] += h;
    down[q] -= h;
    const double gq = (std::log(average_price(up, spec) - spec.strike) -
                       std::log(average_price(down, spec) - spec.strike)) /
                      (2.0 * h);
    CHECK(std::abs(gq - mu[q]) <= 1e-6);
  }

  const double origin_payoff = average_price(std::vector<double>(16, 0.0), spec) -
                               spec.strike;
  REQUIRE(origin_payoff > 0.0);
  const auto value = [&](const std::vector<double>& x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    return std::log(average_price(x, spec) - spec.strike) - 0.5 * sq;
  };
  CHECK(value(mu) >= value(std::vector<double>(16, 0.0)));
}

TEST_CASE("the shift direction is positive and decreasing") {
  const AsianSpec spec = default_asian_spec(64, 45.0, OptionKind::Call);
  const auto mu = find_is_shift(spec);
  REQUIRE(mu.size() == 64);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(mu[i] > 0.0);
    if (i + 1 < mu.size()) CHECK(mu[i] > mu[i + 1]);
  }
}

TEST_CASE("a zero shift reduces the integrand to the plain payoff") {
  const AsianSpec spec = default_asian_spec(8, 45.0, OptionKind::Put);
  const ShiftedIntegrand f(spec, std::vector<double>(8, 0.0));
  Rng rng(2718, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto x = random_vector(8, rng, 5.0);
    CHECK(f(x) == doctest::Approx(payoff(x, spec)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(f.direction(), std::logic_error);
}

TEST_CASE("the integrand stays nonnegative for any shift") {
  const AsianSpec spec = default_asian_spec(8, 55.0, OptionKind::Put);
  Rng rng(4444, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const ShiftedIntegrand f(spec, random_vector(8, rng, 2.0));
    for (int draw = 0; draw < 200; ++draw) {
      CHECK(f(random_vector(8, rng, 6.0)) >= 0.0);
    }
  }
}

TEST_CASE("the change of measure leaves the integral invariant") {
  const AsianSpec spec = default_asian_spec(2, 20.0, OptionKind::Call);

  // Sanity of the tensor quadrature itself.
  CHECK(oracles::normal_expectation(
            [](const std::vector<double>& x) { return x[0] * x[0]; }, 2) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracles::normal_expectation(
            [](const std::vector<double>& x) {
              return x[0] * x[0] * x[0] * x[0] + x[1] * x[1];
            },
            2) == doctest::Approx(4.0).epsilon(1e-12));

  const double plain = oracles::normal_expectation(
      [&](const std::vector<double>& x) { return payoff(x, spec); }, 2);
  REQUIRE(plain > 0.0);

  std::vector<std::vector<double>> shifts = {
      {0.3, 0.1}, {-0.2, 0.05}, find_is_shift(spec)};
  for (const auto& mu : shifts) {
    const ShiftedIntegrand f(spec, mu);
    const double shifted = oracles::normal_expectation(
        [&](const std::vector<double>& x) { return f(x); }, 2);
    CHECK(shifted == doctest::Approx(plain).epsilon(1e-6));
  }
}

TEST_CASE("two shifts give statistically identical estimates") {
  const AsianSpec spec = default_asian_spec(4, 45.0, OptionKind::Call);
  const auto mu = find_is_shift(spec);
  const ShiftedIntegrand shifted(spec, mu);
  const ShiftedIntegrand plain(spec, std::vector<double>(4, 0.0));

  const int n = 200000;
  StratumMoments a, b;
  Rng rng_a(12, 0), rng_b(12, 1);
  std::vector<double> x(4);
  for (int i = 0; i < n; ++i) {
    for (auto& v : x) v = standard_normal(rng_a);
    a.add(shifted(x));
    for (auto& v : x) v = standard_normal(rng_b);
    b.add(plain(x));
  }
  const double se = std::sqrt((a.sigma() * a.sigma() + b.sigma() * b.sigma()) /
                              static_cast<double>(n));
  CHECK(std::abs(a.mean() - b.mean()) <= 4.0 * se);
}

TEST_CASE("price infimum over a slab") {
  SUBCASE("one dimension pins the coordinate") {
    const AsianSpec spec = default_asian_spec(1, 45.0, OptionKind::Put);
    const ShiftedIntegrand f(spec, {0.7});
    const SlabStrata slabs(f.direction(), 4);
    for (std::size_t i = 1; i < 4; ++i) {
      const auto bound = zero_variance_bound(slabs, i, f);
      REQUIRE(bound.has_value());
      const std::vector<double> at = {slabs.axis().lower(i) + 0.7};
      CHECK(*bound == doctest::Approx(average_price(at, spec)).epsilon(1e-12));
    }
    // The first stratum reaches arbitrarily low prices.
    const auto lowest = zero_variance_bound(slabs, 0, f);
    REQUIRE(lowest.has_value());
    CHECK(*lowest == 0.0);
  }

  SUBCASE("mixed difference signs have no positive bound") {
    const AsianSpec spec = default_asian_spec(2, 45.0, OptionKind::Put);
    const double norm = std::sqrt(5.0);
    const ShiftedIntegrand f(spec, {0.4 / norm, 0.8 / norm});
    const SlabStrata slabs(f.direction(), 4);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK_FALSE(zero_variance_bound(slabs, i, f).has_value());
  }

  SUBCASE("descending negative directions mirror the positive case") {
    const AsianSpec spec = default_asian_spec(3, 45.0, OptionKind::Put);
    const double norm = std::sqrt(14.0);
    const ShiftedIntegrand f(spec, {-1.2 / norm, -0.8 / norm, -0.4 / norm});
    const SlabStrata slabs(f.direction(), 4);
    const auto open_end = zero_variance_bound(slabs, 3, f);
    REQUIRE(open_end.has_value());
    CHECK(*open_end == 0.0);
    const auto interior = zero_variance_bound(slabs, 1, f);
    REQUIRE(interior.has_value());
    CHECK(*interior > 0.0);
  }

  SUBCASE("agreement with a constrained minimizer") {
    const AsianSpec spec = default_asian_spec(3, 45.0, OptionKind::Put);
    const double norm = std::sqrt(14.0);
    const std::vector<double> mu = {0.9 / norm, 0.6 / norm, 0.3 / norm};
    const ShiftedIntegrand f(spec, mu);
    const SlabStrata slabs(f.direction(), 5);
    const auto& u = f.direction();

    for (std::size_t i = 1; i < 5; ++i) {
      const auto bound = zero_variance_bound(slabs, i, f);
      REQUIRE(bound.has_value());

      const double z = slabs.axis().lower(i);
      const auto price = [&](const std::vector<double>& x) {
        std::vector<double> y(3);
        for (std::size_t k = 0; k < 3; ++k) y[k] = x[k] + mu[k];
        return average_price(y, spec);
      };
      const auto grad = [&](const std::vector<double>& x,
                            std::vector<double>& g) {
        std::vector<double> y(3);
        for (std::size_t k = 0; k < 3; ++k) y[k] = x[k] + mu[k];
        for (std::size_t q = 0; q < 3; ++q)
          g[q] = average_gradient_entry(y, spec, q);
      };
      const auto argmin = oracles::minimize_on_hyperplane(price, grad, u, z);
      CHECK(*bound == doctest::Approx(price(argmin)).epsilon(1e-6));
    }
  }
}

TEST_CASE("certified slabs never pay out") {
  const AsianSpec call = default_asian_spec(16, 45.0, OptionKind::Call);
  AsianSpec put = call;
  put.kind = OptionKind::Put;
  const auto mu = find_is_shift(call);
  const ShiftedIntegrand f(put, mu);
  const SlabStrata slabs(f.direction(), 20);

  std::size_t certified = 0;
  Rng rng(5005, 0);
  std::vector<double> x(16);
  for (std::size_t i = 0; i < slabs.strata_count(); ++i) {
    const auto bound = zero_variance_bound(slabs, i, f);
    if (!bound || !(*bound > put.strike)) continue;
    ++certified;
    for (int rep = 0; rep < 10000; ++rep) {
      slabs.sample(i, rng, x);
      REQUIRE(f(x) == 0.0);
    }
  }
  CHECK(certified >= 10);
}

TEST_CASE("baseline comparison inputs are validated") {
  const AsianSpec spec = default_asian_spec(4, 45.0, OptionKind::Call);
  ComparisonConfig config;
  config.strata = 7;
  config.total = 1000;  // not divisible by 7
  config.schedule = {100, 1000};
  CHECK_THROWS_AS(compare_with_proportional(spec, config, 1), std::invalid_argument);

  config.strata = 10;
  config.schedule = {100, 900};  // does not end at the total
  CHECK_THROWS_AS(compare_with_proportional(spec, config, 1), std::invalid_argument);
}

TEST_CASE("prices move the right way with the strike") {
  ComparisonConfig config;
  config.strata = 10;
  config.total = 20000;
  config.schedule = {2000, 10000, 20000};

  const auto price = [&](double strike, OptionKind kind) {
    const AsianSpec spec = default_asian_spec(4, strike, kind);
    return compare_with_proportional(spec, config, 31).price_adaptive;
  };
  CHECK(price(40.0, OptionKind::Call) > price(50.0, OptionKind::Call));
  CHECK(price(50.0, OptionKind::Put) > price(40.0, OptionKind::Put));
}

TEST_CASE("slab stratification pipes draws through the integrand") {
  const AsianSpec spec = default_asian_spec(4, 45.0, OptionKind::Call);
  const auto mu = find_is_shift(spec);
  const ShiftedIntegrand f(spec, mu);
  const SlabStrata slabs(f.direction(), 5);
  const Stratification strat = make_slab_stratification(slabs, f);

  CHECK(strat.strata_count() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(strat.probability(i) == slabs.probability(i));

  Rng rng(808, 0);
  for (std::size_t i = 0; i < 5; ++i) {
    for (int rep = 0; rep < 100; ++rep) {
      const double v = strat.draw(i, rng);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}
