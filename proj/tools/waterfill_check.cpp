#include "waterfill_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adastrat/allocation.hpp"

namespace adastrat::check {

WaterfillInstance random_instance(Rng& rng) {
  WaterfillInstance inst;
  const std::size_t strata = 1 + rng.next_u64() % 6;
  inst.n.resize(strata);
  inst.alpha.resize(strata);
  for (std::size_t i = 0; i < strata; ++i) {
    inst.n[i] = static_cast<double>(1 + rng.next_u64() % 50);
    inst.alpha[i] = 10.0 * rng.uniform01();
  }
  inst.budget = static_cast<std::int64_t>(rng.next_u64() % 61);
  return inst;
}

double objective(const WaterfillInstance& inst, std::span<const double> m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < inst.n.size(); ++i)
    acc += inst.alpha[i] * inst.alpha[i] / (inst.n[i] + m[i]);
  return acc;
}

double grid_oracle_objective(const WaterfillInstance& inst, double resolution) {
  const double budget = static_cast<double>(inst.budget);
  std::vector<double> m(inst.n.size(), 0.0);
  if (budget <= 0.0) return objective(inst, m);
  const double delta = budget * resolution;
  const auto steps = static_cast<std::int64_t>(std::llround(1.0 / resolution));
  for (std::int64_t s = 0; s < steps; ++s) {
    // hand the next grain to the stratum where it buys the most
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double a2 = inst.alpha[i] * inst.alpha[i];
      const double cur = inst.n[i] + m[i];
      const double gain = a2 / cur - a2 / (cur + delta);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    m[best] += delta;
  }
  return objective(inst, m);
}

std::vector<double> dual_oracle(const WaterfillInstance& inst) {
  const double budget = static_cast<double>(inst.budget);
  const std::size_t strata = inst.n.size();
  auto spent = [&](double sqrt_lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < strata; ++i)
      total += std::max(0.0, inst.alpha[i] / sqrt_lambda - inst.n[i]);
    return total;
  };
  // spent() decreases in sqrt(lambda); bracket then bisect.
  double sum_n = 0.0, sum_a = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < strata; ++i) {
    sum_n += inst.n[i];
    sum_a += inst.alpha[i];
    hi = std::max(hi, inst.alpha[i] / inst.n[i]);
  }
  double lo = sum_a / (budget + sum_n);  // every stratum funded
  hi = std::max(hi, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spent(mid) > budget)
      lo = mid;
    else
      hi = mid;
  }
  const double root = 0.5 * (lo + hi);
  std::vector<double> m(strata);
  for (std::size_t i = 0; i < strata; ++i)
    m[i] = std::max(0.0, inst.alpha[i] / root - inst.n[i]);
  return m;
}

double kkt_residual(const WaterfillInstance& inst, std::span<const double> m) {
  double wet_min = 0.0, wet_max = 0.0;
  bool any_wet = false;
  for (std::size_t i = 0; i < inst.n.size(); ++i) {
    if (m[i] > 1e-12) {
      const double r = inst.alpha[i] / (inst.n[i] + m[i]);
      if (!any_wet) {
        wet_min = wet_max = r;
        any_wet = true;
      } else {
        wet_min = std::min(wet_min, r);
        wet_max = std::max(wet_max, r);
      }
    }
  }
  if (!any_wet) return 0.0;
  double resid = (wet_max - wet_min) / wet_max;
  for (std::size_t i = 0; i < inst.n.size(); ++i) {
    if (m[i] <= 1e-12) {
      const double r = inst.alpha[i] / inst.n[i];
      resid = std::max(resid, (r - wet_max) / wet_max);
    }
  }
  return std::max(resid, 0.0);
}

SuiteResult run_waterfill_suite(std::int64_t instances, std::uint64_t seed,
                                bool inject_perturbation) {
  SuiteResult res;
  res.instances = instances;
  Rng rng(seed, 0x77617466696c6cull);
  for (std::int64_t case_id = 0; case_id < instances; ++case_id) {
    const WaterfillInstance inst = random_instance(rng);
    WaterfillProblem prob{inst.n, inst.alpha, inst.budget};
    std::vector<double> m = waterfill_allocate(prob);
    if (inject_perturbation && m.size() >= 2) {
      m[0] += 0.5;
      m[1] -= 0.5;
    }

    double sum = 0.0, min_m = 0.0;
    for (double v : m) {
      sum += v;
      min_m = std::min(min_m, v);
    }
    const double sum_dev = std::abs(sum - static_cast<double>(inst.budget));
    const double kkt = kkt_residual(inst, m);
    const double obj = objective(inst, m);
    const double grid_excess = obj - grid_oracle_objective(inst);
    const double dual_gap = std::abs(obj - objective(inst, dual_oracle(inst)));

    res.max_sum_dev = std::max(res.max_sum_dev, sum_dev);
    res.max_kkt = std::max(res.max_kkt, kkt);
    res.max_grid_excess = std::max(res.max_grid_excess, grid_excess);
    res.max_dual_gap = std::max(res.max_dual_gap, dual_gap);

    const bool bad = min_m < -1e-12 || sum_dev > 1e-9 || kkt > 1e-9 ||
                     grid_excess > 1e-6 || dual_gap > 1e-6;
    if (bad && res.ok) {
      res.ok = false;
      std::ostringstream os;
      os << "case " << case_id << ": budget=" << inst.budget << " n=";
      for (double v : inst.n) os << v << ' ';
      os << "alpha=";
      for (double v : inst.alpha) os << v << ' ';
      os << "m=";
      for (double v : m) os << v << ' ';
      os << "(sum_dev=" << sum_dev << " kkt=" << kkt << " grid_excess=" << grid_excess
         << " dual_gap=" << dual_gap << ")";
      res.failure = os.str();
    }
  }
  return res;
}

}  // namespace adastrat::check
