#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace adastrat;

  CLI::App app{"adaptive stratified sampling experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file (flags win)");

  cli::ToyConfig toy;
  std::string toy_rule = "B";
  std::string toy_out = ".";
  auto* toy_cmd =
      app.add_subcommand("toy", "adaptive estimation of a standard normal mean");
  toy_cmd->add_option("--rule", toy_rule, "allocation rule for replication runs")
      ->check(CLI::IsMember({"A", "B"}));
  toy_cmd->add_option("--schedule", toy.schedule, "cumulative drawing checkpoints")
      ->delimiter(',');
  toy_cmd->add_option("--replications", toy.replications,
                      "independent runs for the variance diagnostics");
  toy_cmd->add_option("--seed", toy.seed, "base RNG seed");
  toy_cmd->add_option("--out", toy_out, "output directory for CSV files");

  cli::AsianConfig asian;
  std::string asian_kind = "call";
  std::string asian_out = ".";
  auto* asian_cmd = app.add_subcommand(
      "asian", "Asian option pricing: proportional baseline vs adaptive allocation");
  asian_cmd->add_option("--d", asian.monitor_dates, "monitoring dates");
  asian_cmd->add_option("--strike", asian.strike, "strike price");
  asian_cmd->add_option("--kind", asian_kind, "option kind")
      ->check(CLI::IsMember({"call", "put"}));
  asian_cmd->add_option("--strata", asian.strata, "number of hyperplane slabs");
  asian_cmd->add_option("--total", asian.total, "total drawings per procedure");
  asian_cmd->add_option("--schedule", asian.schedule, "cumulative drawing checkpoints")
      ->delimiter(',');
  asian_cmd->add_option("--seed", asian.seed, "base RNG seed");
  asian_cmd->add_option("--out", asian_out, "output directory for CSV files");

  cli::WaterfillCheckConfig wf;
  auto* wf_cmd =
      app.add_subcommand("waterfill-check", "allocation solver vs independent oracles");
  wf_cmd->add_option("--instances", wf.instances, "random problem instances");
  wf_cmd->add_option("--seed", wf.seed, "base RNG seed");
  wf_cmd->add_flag("--inject-perturbation", wf.inject_perturbation)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitSuccess : cli::kExitUsage;
  }

  if (toy_cmd->parsed()) {
    toy.rule = toy_rule == "A" ? AllocationRule::A : AllocationRule::B;
    toy.out_dir = toy_out;
    return cli::cmd_toy(toy);
  }
  if (asian_cmd->parsed()) {
    asian.kind = asian_kind == "call" ? OptionKind::Call : OptionKind::Put;
    asian.out_dir = asian_out;
    return cli::cmd_asian(asian);
  }
  if (wf_cmd->parsed()) return cli::cmd_waterfill_check(wf);
  return cli::kExitUsage;
}
