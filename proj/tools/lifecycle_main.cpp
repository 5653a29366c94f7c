// Command-line front end: solve, simulate, estimate, and compare policy
// variants of the household life-cycle model.

#include <CLI11.hpp>

#include "lc/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"household life-cycle time-allocation model"};
  app.require_subcommand(1);

  lc::RunConfig rc;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", rc.preset, "grid preset: paper (default) or desk");
    sub->add_option("--config", rc.config_path, "key=value settings file");
    sub->add_option("--data-dir", rc.data_dir, "directory with input tables");
    sub->add_option("--out", rc.out_dir, "output directory (default: out)");
    sub->add_option("--set", rc.sets, "override one setting, e.g. --set grids.n_assets=31");
    sub->add_option("--threads", rc.threads, "worker threads for the state loop");
  };

  add_common(app.add_subcommand("solve", "solve the model and dump policies"));
  add_common(app.add_subcommand("simulate", "solve, then push a cohort through the policies"));
  add_common(app.add_subcommand("estimate", "match preference parameters to the time-use data"));
  auto* cf = app.add_subcommand("counterfactual", "re-solve under a policy variant and compare");
  add_common(cf);
  cf->add_option("--experiment", rc.experiment,
                 "rr75 | wage10 | college_vs_highschool | nursery_vs_not");
  add_common(app.add_subcommand("validate", "run the model-invariant checks"));
  add_common(app.add_subcommand("export-defaults", "write default tables and settings"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  rc.command = app.get_subcommands().front()->get_name();
  return lc::run(rc);
}
