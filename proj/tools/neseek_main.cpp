#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neseek/commands.hpp"
#include "neseek/schedule.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "neseek: Nash equilibrium seeking over networks with intermittent "
      "communication"};
  app.require_subcommand(1);

  neseek::CommandOptions opt;
  std::string mode = "from-zero";

  auto add_common = [&](CLI::App* sub, bool multi_config) {
    auto* cfg = sub->add_option("--config", opt.configs,
                                "experiment config file (JSON)");
    cfg->required();
    if (!multi_config) cfg->expected(1);
    sub->add_option("--out", opt.out_dir, "output directory")
        ->default_val(".");
    return sub;
  };

  CLI::App* solve = add_common(
      app.add_subcommand("solve-ne", "solve for the Nash equilibrium"),
      false);

  CLI::App* check_sched = add_common(
      app.add_subcommand("check-schedule",
                         "interval statistics and average-ratio audit"),
      false);
  check_sched->add_option("--theta", opt.theta,
                          "target communication ratio in (0,1)");
  check_sched
      ->add_option("--mode", mode,
                   "slack accounting: from-zero or all-pairs")
      ->check(CLI::IsMember({"from-zero", "all-pairs"}));

  CLI::App* check_cond = add_common(
      app.add_subcommand("check-conditions",
                         "certificate, constants, and condition margins"),
      false);
  check_cond->add_option("--theta", opt.theta,
                         "average-ratio target in (0,1)");
  check_cond->add_option(
      "--sweep", opt.sweep,
      "also write a CSV sweeping the average-ratio margin over N points");

  CLI::App* run = add_common(
      app.add_subcommand("run", "simulate and write trajectory + summary"),
      true);
  run->add_option("--seed", opt.seed, "override the config's RNG seed");
  run->add_option("--jobs", opt.jobs,
                  "run multiple configs concurrently")
      ->default_val(1);

  CLI11_PARSE(app, argc, argv);

  opt.mode = mode == "all-pairs" ? neseek::AcrMode::AllPairs
                                 : neseek::AcrMode::FromZero;

  if (solve->parsed()) return neseek::cmd_solve_ne(opt);
  if (check_sched->parsed()) return neseek::cmd_check_schedule(opt);
  if (check_cond->parsed()) return neseek::cmd_check_conditions(opt);
  if (run->parsed()) return neseek::cmd_run(opt);
  return 2;
}
