#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "adastrat/estimator.hpp"
#include "adastrat/finance.hpp"

namespace adastrat::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ToyConfig {
  AllocationRule rule = AllocationRule::B;
  std::vector<std::int64_t> schedule;  // empty -> default checkpoints
  std::int64_t replications = 1;
  std::uint64_t seed = 12345;
  std::filesystem::path out_dir = ".";
};

// Adaptive estimation of E[X] = 0 over ten equiprobable normal strata.
// Writes toy_trace.csv (single-seed trace, both rules); with L >= 2 also
// toy_replication.csv (per-checkpoint variance diagnostics for the
// selected rule) and toy_baseline.csv (adaptive vs proportional at the
// final checkpoint). Wall-times are printed, never written to files.
int cmd_toy(const ToyConfig& config);

struct AsianConfig {
  std::int64_t monitor_dates = 16;
  double strike = 45.0;
  OptionKind kind = OptionKind::Call;
  std::size_t strata = 100;
  std::int64_t total = 1'000'000;
  std::vector<std::int64_t> schedule;  // empty -> thirds of total (1/10, 1/2, 1)
  std::uint64_t seed = 12345;
  std::filesystem::path out_dir = ".";
};

// Prices the Asian option with importance sampling + slab stratification,
// proportional baseline against adaptive allocation. Writes
// asian_summary.csv, asian_strata.csv, asian_direction.csv.
int cmd_asian(const AsianConfig& config);

struct WaterfillCheckConfig {
  std::int64_t instances = 1000;
  std::uint64_t seed = 12345;
  bool inject_perturbation = false;
};

// Randomized solver-vs-oracle suite; exit 1 when any check trips.
int cmd_waterfill_check(const WaterfillCheckConfig& config);

}  // namespace adastrat::cli
