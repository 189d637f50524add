#include "adastrat/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adastrat {

namespace {

long double sum_ld(std::span<const double> v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s;
}

// Push the (tiny) budget residual into the largest component so the
// stored doubles sum to the budget as exactly as doubles allow.
void snap_total(std::vector<double>& m, std::int64_t budget) {
  const long double resid = static_cast<long double>(budget) - sum_ld(m);
  if (resid == 0.0L) return;
  if (std::abs(static_cast<double>(resid)) > 1e-6)
    throw std::logic_error("allocation: budget residual out of range");
  auto it = std::max_element(m.begin(), m.end());
  *it = static_cast<double>(static_cast<long double>(*it) + resid);
  if (*it < 0.0) *it = 0.0;
}

}  // namespace

StepBudget StepBudget::for_step(std::int64_t total_new, std::int64_t strata) {
  if (strata < 1) throw std::invalid_argument("StepBudget: need at least one stratum");
  if (total_new < strata)
    throw std::invalid_argument("StepBudget: step increment smaller than stratum count");
  return {total_new, total_new - strata};
}

std::vector<std::int64_t> systematic_round(std::span<const double> m) {
  for (double v : m)
    if (!(v >= 0.0)) throw std::invalid_argument("systematic_round: negative component");

  // Running sums in extended precision. Any running sum within 1e-9 of an
  // integer is snapped to it before flooring, so a partial sum that lands on
  // an integer in exact arithmetic cannot leak a unit into a later component.
  std::vector<long double> cum(m.size());
  long double run = 0.0L;
  for (std::size_t i = 0; i < m.size(); ++i) {
    run += m[i];
    const long double near = std::floor(run + 0.5L);
    if (run != near && run > near - 1e-9L && run < near + 1e-9L) run = near;
    cum[i] = run;
  }
  const long double total = m.empty() ? 0.0L : cum.back();
  const std::int64_t budget = static_cast<std::int64_t>(std::llround(static_cast<double>(total)));
  if (std::abs(static_cast<double>(total - budget)) > 1e-9)
    throw std::invalid_argument("systematic_round: sum is not an integer");
  if (!m.empty()) cum.back() = static_cast<long double>(budget);

  std::vector<std::int64_t> out(m.size());
  std::int64_t prev_floor = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::int64_t f = static_cast<std::int64_t>(std::floor(cum[i]));
    out[i] = f - prev_floor;
    prev_floor = f;
  }
  return out;
}

std::vector<double> waterfill_allocate(const WaterfillProblem& prob) {
  const std::size_t count = prob.n.size();
  if (count == 0) throw std::invalid_argument("waterfill_allocate: empty problem");
  if (prob.alpha.size() != count)
    throw std::invalid_argument("waterfill_allocate: size mismatch");
  if (prob.budget < 0) throw std::invalid_argument("waterfill_allocate: negative budget");
  for (std::size_t i = 0; i < count; ++i) {
    if (!(prob.alpha[i] > 0.0))
      throw std::invalid_argument("waterfill_allocate: weights must be positive");
    if (!(prob.n[i] >= 1.0))
      throw std::invalid_argument("waterfill_allocate: committed counts must be >= 1");
  }

  // Order by n_i/alpha_i decreasing; comparisons cross-multiplied, stable
  // on ties for determinism.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prob.n[a] * prob.alpha[b] > prob.n[b] * prob.alpha[a];
  });

  // suffix_n[t] = sum of n over sorted positions >= t, same for alpha
  std::vector<double> suffix_n(count + 1, 0.0), suffix_a(count + 1, 0.0);
  for (std::size_t t = count; t-- > 0;) {
    suffix_n[t] = suffix_n[t + 1] + prob.n[order[t]];
    suffix_a[t] = suffix_a[t + 1] + prob.alpha[order[t]];
  }

  const double budget = static_cast<double>(prob.budget);

  // Last sorted position whose ratio still clears the water level fed by
  // everything after it; all positions up to it receive nothing.
  std::size_t cut = 0;  // number of dry positions
  for (std::size_t t = 0; t + 1 < count; ++t) {
    const double lhs = prob.n[order[t]] * suffix_a[t + 1];
    const double rhs = prob.alpha[order[t]] * (budget + suffix_n[t + 1]);
    if (lhs >= rhs) cut = t + 1;
  }

  const double level = (budget + suffix_n[cut]) / suffix_a[cut];
  std::vector<double> m(count, 0.0);
  for (std::size_t t = cut; t < count; ++t) {
    const std::size_t i = order[t];
    double v = prob.alpha[i] * level - prob.n[i];
    if (v < 0.0) {
      if (v < -1e-9) throw std::logic_error("waterfill_allocate: negative allocation");
      v = 0.0;
    }
    m[i] = v;
  }
  snap_total(m, prob.budget);
  return m;
}

AllocationVector allocate_rule_a(std::span<const double> p,
                                 std::span<const double> sigma_hat,
                                 const StepBudget& budget) {
  if (p.size() != sigma_hat.size())
    throw std::invalid_argument("allocate_rule_a: size mismatch");
  const double m_total = static_cast<double>(budget.free_budget);
  std::vector<double> weight(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) weight[i] = p[i] * sigma_hat[i];
  const double denom = static_cast<double>(sum_ld(weight));

  std::vector<double> m(p.size());
  if (denom > 0.0) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = weight[i] / denom * m_total;
  } else {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = p[i] * m_total;
  }
  snap_total(m, budget.free_budget);
  auto rounded = systematic_round(m);
  return {std::move(m), std::move(rounded), budget.free_budget};
}

AllocationVector allocate_rule_b(std::span<const double> p,
                                 std::span<const double> sigma_hat,
                                 std::span<const std::int64_t> prev_counts,
                                 const StepBudget& budget) {
  if (p.size() != sigma_hat.size() || p.size() != prev_counts.size())
    throw std::invalid_argument("allocate_rule_b: size mismatch");

  bool any_positive = false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] * sigma_hat[i] > 0.0) any_positive = true;
  if (!any_positive) return allocate_rule_a(p, sigma_hat, budget);

  WaterfillProblem sub;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] * sigma_hat[i] > 0.0) {
      kept.push_back(i);
      sub.n.push_back(static_cast<double>(prev_counts[i] + 1));
      sub.alpha.push_back(p[i] * sigma_hat[i]);
    }
  }
  sub.budget = budget.free_budget;
  const auto solved = waterfill_allocate(sub);

  std::vector<double> m(p.size(), 0.0);
  for (std::size_t t = 0; t < kept.size(); ++t) m[kept[t]] = solved[t];
  auto rounded = systematic_round(m);
  return {std::move(m), std::move(rounded), budget.free_budget};
}

InterleaveState InterleaveState::begin(std::vector<std::int64_t> prev_counts,
                                       std::vector<std::int64_t> new_counts) {
  if (prev_counts.size() != new_counts.size() || prev_counts.empty())
    throw std::invalid_argument("InterleaveState: bad count vectors");
  InterleaveState st;
  st.prev_total = std::accumulate(prev_counts.begin(), prev_counts.end(), std::int64_t{0});
  st.new_total = std::accumulate(new_counts.begin(), new_counts.end(), std::int64_t{0});
  for (std::size_t i = 0; i < prev_counts.size(); ++i) {
    if (prev_counts[i] < 0 || new_counts[i] < prev_counts[i])
      throw std::invalid_argument("InterleaveState: counts must grow");
  }
  if (st.new_total <= st.prev_total)
    throw std::invalid_argument("InterleaveState: empty macro-step");
  st.nu = prev_counts;
  st.n = st.prev_total;
  st.prev_counts = std::move(prev_counts);
  st.new_counts = std::move(new_counts);
  return st;
}

double InterleaveState::rate(std::size_t i) const {
  return static_cast<double>(new_counts[i] - prev_counts[i]) /
         static_cast<double>(new_total - prev_total);
}

std::pair<std::size_t, InterleaveState> interleave_step(const InterleaveState& state) {
  if (state.n >= state.new_total)
    throw std::logic_error("interleave_step: macro-step already complete");

  const std::int64_t dn = state.n + 1 - state.prev_total;   // n - N^{k-1}
  const std::int64_t dN = state.new_total - state.prev_total;

  // The criterion r_i - (nu_i - prev_i)/dn, scaled by dn*dN > 0 so the
  // argmax and every tie are decided in exact integer arithmetic.
  std::size_t best = 0;
  std::int64_t best_score = 0, best_incr = 0;
  for (std::size_t i = 0; i < state.nu.size(); ++i) {
    const std::int64_t incr = state.new_counts[i] - state.prev_counts[i];
    const std::int64_t got = state.nu[i] - state.prev_counts[i];
    const std::int64_t score = incr * dn - got * dN;
    if (i == 0 || score > best_score ||
        (score == best_score && incr >= best_incr)) {
      best = i;
      best_score = score;
      best_incr = incr;
    }
  }

  InterleaveState next = state;
  ++next.nu[best];
  ++next.n;
  return {best, std::move(next)};
}

}  // namespace adastrat
