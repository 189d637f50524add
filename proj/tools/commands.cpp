#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include "adastrat/csv.hpp"
#include "adastrat/experiments.hpp"
#include "waterfill_check.hpp"

namespace adastrat::cli {

namespace {

constexpr std::size_t kToyStrata = 10;
constexpr std::size_t kToyWatched = 4;  // stratum whose share the trace reports

double seconds(double ns) { return ns * 1e-9; }

const char* rule_name(AllocationRule rule) {
  return rule == AllocationRule::A ? "A" : "B";
}

const char* kind_name(OptionKind kind) {
  return kind == OptionKind::Call ? "call" : "put";
}

struct TimedRun {
  std::vector<EstimateReport> reports;
  double wall_ns = 0.0;
};

TimedRun timed_adaptive(const Stratification& strat, const Schedule& sched,
                        AllocationRule rule, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto reports = run_adaptive(strat, sched, rule, seed);
  const auto t1 = std::chrono::steady_clock::now();
  return {std::move(reports),
          static_cast<double>(
              std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count())};
}

}  // namespace

int cmd_toy(const ToyConfig& config) {
  try {
    if (config.replications < 1) {
      std::fprintf(stderr, "toy: replications must be >= 1\n");
      return kExitUsage;
    }
    const auto checkpoints =
        config.schedule.empty() ? default_toy_schedule() : config.schedule;
    Schedule sched{checkpoints};
    const auto strata = QuantileStrata1D::equiprobable(kToyStrata);
    const auto strat = normal_identity_stratification(strata);
    sched.validate_for(static_cast<std::int64_t>(kToyStrata));

    std::filesystem::create_directories(config.out_dir);

    CsvTable trace;
    trace.header = {"rule", "step", "drawings", "estimate", "sigma_star", "stratum5_share"};
    for (const auto rule : {AllocationRule::A, AllocationRule::B}) {
      const auto reports = run_adaptive(strat, sched, rule, config.seed);
      std::printf("rule %s trace (seed %llu)\n", rule_name(rule),
                  static_cast<unsigned long long>(config.seed));
      std::printf("  %4s %9s %12s %10s %8s\n", "k", "N", "estimate", "sigma*", "N5/N");
      for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& rep = reports[k];
        const double share = static_cast<double>(rep.counts[kToyWatched]) /
                             static_cast<double>(rep.total());
        trace.rows.push_back({rule_name(rule), format_int(static_cast<std::int64_t>(k) + 1),
                              format_int(rep.total()), format_double(rep.c_hat),
                              format_double(rep.sigma_star_hat), format_double(share)});
        std::printf("  %4zu %9lld %+12.6f %10.6f %8.5f\n", k + 1,
                    static_cast<long long>(rep.total()), rep.c_hat, rep.sigma_star_hat,
                    share);
      }
    }
    write_csv_atomic(config.out_dir / "toy_trace.csv", trace);

    if (config.replications >= 2) {
      const std::int64_t runs = config.replications;
      const std::size_t steps = sched.steps();
      std::vector<StratumMoments> acc(steps);
      double adaptive_wall = 0.0;
      const std::uint64_t adaptive_base = derive_seed(config.seed, 1);
      for (std::int64_t l = 0; l < runs; ++l) {
        auto timed = timed_adaptive(strat, sched, config.rule,
                                    derive_seed(adaptive_base, static_cast<std::uint64_t>(l)));
        adaptive_wall += timed.wall_ns;
        for (std::size_t k = 0; k < steps; ++k) acc[k].add(timed.reports[k].c_hat);
      }
      adaptive_wall /= static_cast<double>(runs);

      CsvTable rep_table;
      rep_table.header = {"rule", "step", "drawings", "runs", "v_hat", "s_hat"};
      std::printf("\nreplications: rule %s, L=%lld\n", rule_name(config.rule),
                  static_cast<long long>(runs));
      std::printf("  %4s %9s %14s %10s\n", "k", "N", "v_hat", "s_hat");
      for (std::size_t k = 0; k < steps; ++k) {
        const double sd = acc[k].sigma();
        const double v_hat = sd * sd;
        const double n_k = static_cast<double>(sched.total(k));
        const double s_hat = std::sqrt(n_k * v_hat);
        rep_table.rows.push_back({rule_name(config.rule),
                                  format_int(static_cast<std::int64_t>(k) + 1),
                                  format_int(sched.total(k)), format_int(runs),
                                  format_double(v_hat), format_double(s_hat)});
        std::printf("  %4zu %9lld %14.6e %10.6f\n", k + 1,
                    static_cast<long long>(sched.total(k)), v_hat, s_hat);
      }
      write_csv_atomic(config.out_dir / "toy_replication.csv", rep_table);

      // proportional baseline at the final checkpoint, same replication count
      const Proportions prop(strat.probabilities());
      const std::int64_t n_final = sched.final_total();
      const std::uint64_t baseline_base = derive_seed(config.seed, 2);
      const auto t0 = std::chrono::steady_clock::now();
      StratumMoments base_acc;
      for (std::int64_t l = 0; l < runs; ++l)
        base_acc.add(run_fixed(strat, prop, n_final,
                               derive_seed(baseline_base, static_cast<std::uint64_t>(l)))
                         .c_hat);
      const auto t1 = std::chrono::steady_clock::now();
      const double baseline_wall =
          static_cast<double>(
              std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()) /
          static_cast<double>(runs);

      const double v_adaptive = acc[steps - 1].sigma() * acc[steps - 1].sigma();
      const double v_baseline = base_acc.sigma() * base_acc.sigma();
      const double n_d = static_cast<double>(n_final);

      CsvTable baseline;
      baseline.header = {"method", "drawings", "runs", "v_hat", "s_hat"};
      baseline.rows.push_back({std::string("adaptive_") + rule_name(config.rule),
                               format_int(n_final), format_int(runs),
                               format_double(v_adaptive),
                               format_double(std::sqrt(n_d * v_adaptive))});
      baseline.rows.push_back({"proportional", format_int(n_final), format_int(runs),
                               format_double(v_baseline),
                               format_double(std::sqrt(n_d * v_baseline))});
      write_csv_atomic(config.out_dir / "toy_baseline.csv", baseline);

      std::printf("\nbaseline at N=%lld (L=%lld)\n", static_cast<long long>(n_final),
                  static_cast<long long>(runs));
      std::printf("  %-14s %14s %10s %12s %14s\n", "method", "v_hat", "s_hat",
                  "mean_wall_s", "time*var");
      std::printf("  %-14s %14.6e %10.6f %12.6f %14.6e\n",
                  (std::string("adaptive_") + rule_name(config.rule)).c_str(), v_adaptive,
                  std::sqrt(n_d * v_adaptive), seconds(adaptive_wall),
                  seconds(adaptive_wall) * v_adaptive);
      std::printf("  %-14s %14.6e %10.6f %12.6f %14.6e\n", "proportional", v_baseline,
                  std::sqrt(n_d * v_baseline), seconds(baseline_wall),
                  seconds(baseline_wall) * v_baseline);
    }
    return kExitSuccess;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "toy: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "toy: %s\n", e.what());
    return kExitFailure;
  }
}

int cmd_asian(const AsianConfig& config) {
  try {
    ComparisonConfig cmp;
    cmp.strata = config.strata;
    cmp.total = config.total;
    if (config.schedule.empty())
      cmp.schedule = {config.total / 10, config.total / 2, config.total};
    else
      cmp.schedule = config.schedule;

    const AsianSpec spec =
        default_asian_spec(config.monitor_dates, config.strike, config.kind);

    ComparisonResult res;
    try {
      res = compare_with_proportional(spec, cmp, config.seed);
    } catch (const ShiftError& e) {
      std::fprintf(stderr, "asian: shift search failed: %s (|last| = %zu components)\n",
                   e.what(), e.last_iterate().size());
      return kExitFailure;
    }

    std::filesystem::create_directories(config.out_dir);

    CsvTable summary;
    summary.header = {"monitor_dates", "strike",       "kind",
                      "price_baseline", "var_baseline", "price_adaptive",
                      "var_adaptive",   "variance_ratio", "zero_variance_strata"};
    summary.rows.push_back(
        {format_int(config.monitor_dates), format_double(config.strike),
         kind_name(config.kind), format_double(res.price_baseline), format_double(res.var_baseline),
         format_double(res.price_adaptive), format_double(res.var_adaptive),
         format_double(res.ratio), format_int(static_cast<std::int64_t>(
                                       res.certified_zero_variance))});
    write_csv_atomic(config.out_dir / "asian_summary.csv", summary);

    const SlabStrata slabs(res.direction, config.strata);
    CsvTable strata_table;
    strata_table.header = {"stratum",        "z_lo",          "z_hi",
                           "sigma_baseline", "sigma_adaptive", "mean_adaptive",
                           "count_adaptive", "price_infimum"};
    for (std::size_t i = 0; i < config.strata; ++i) {
      strata_table.rows.push_back(
          {format_int(static_cast<std::int64_t>(i) + 1),
           format_double(slabs.axis().lower(i)), format_double(slabs.axis().upper(i)),
           format_double(res.baseline_sigma[i]), format_double(res.adaptive_sigma[i]),
           format_double(res.adaptive_mean[i]), format_int(res.adaptive_counts[i]),
           format_double(res.s_star[i])});
    }
    write_csv_atomic(config.out_dir / "asian_strata.csv", strata_table);

    CsvTable direction;
    direction.header = {"coordinate", "direction", "shift"};
    for (std::size_t m = 0; m < res.direction.size(); ++m)
      direction.rows.push_back({format_int(static_cast<std::int64_t>(m) + 1),
                                format_double(res.direction[m]),
                                format_double(res.shift[m])});
    write_csv_atomic(config.out_dir / "asian_direction.csv", direction);

    std::printf("d=%lld K=%g %s  I=%zu N=%lld seed=%llu\n",
                static_cast<long long>(config.monitor_dates), config.strike,
                kind_name(config.kind), config.strata,
                static_cast<long long>(config.total),
                static_cast<unsigned long long>(config.seed));
    std::printf("  price (adaptive)  %10.5f   var %.4e\n", res.price_adaptive,
                res.var_adaptive);
    std::printf("  price (baseline)  %10.5f   var %.4e\n", res.price_baseline, res.var_baseline);
    std::printf("  variance ratio baseline/adaptive: %.4g\n", res.ratio);
    std::printf("  zero-variance certified strata: %zu/%zu\n", res.certified_zero_variance,
                config.strata);
    return kExitSuccess;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "asian: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "asian: %s\n", e.what());
    return kExitFailure;
  }
}

int cmd_waterfill_check(const WaterfillCheckConfig& config) {
  try {
    if (config.instances < 0) {
      std::fprintf(stderr, "waterfill-check: instances must be >= 0\n");
      return kExitUsage;
    }
    const auto res = check::run_waterfill_suite(config.instances, config.seed,
                                                config.inject_perturbation);
    std::printf("waterfill-check: %lld instances\n", static_cast<long long>(res.instances));
    std::printf("  max |sum m - M|        %.3e\n", res.max_sum_dev);
    std::printf("  max KKT residual       %.3e\n", res.max_kkt);
    std::printf("  max excess over grid   %.3e\n", res.max_grid_excess);
    std::printf("  max gap to dual oracle %.3e\n", res.max_dual_gap);
    if (!res.ok) {
      std::fprintf(stderr, "waterfill-check: FAILED %s\n", res.failure.c_str());
      return kExitFailure;
    }
    std::printf("  all within tolerance\n");
    return kExitSuccess;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "waterfill-check: %s\n", e.what());
    return kExitFailure;
  }
}

}  // namespace adastrat::cli
