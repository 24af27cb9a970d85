#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "nlwave/errors.hpp"
#include "nlwave/runner.hpp"

namespace {

struct Common {
  std::string scenario;
  std::string out_dir = "out";
  int threads = 0;
  int oracle_fine = 0;
  bool no_fields = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void attach(CLI::App* cmd, Common& c, bool with_oracle) {
  cmd->add_option("scenario", c.scenario, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_dir, "output directory (default: out)");
  cmd->add_option("--threads", c.threads, "OpenMP team size (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  if (with_oracle)
    cmd->add_option("--oracle-fine", c.oracle_fine,
                    "override the oracle's fine-grid factor (>= 4)");
  cmd->add_flag("--no-fields", c.no_fields, "skip solution binary export");
  cmd->add_option("--seed", c.seed, "override the scenario's stream seed")
      ->each([&c](const std::string&) { c.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nlwave: pseudospectral solver for wave equations with "
      "integral-in-time initial conditions"};
  app.require_subcommand(1);

  Common solve_lin, solve_nl, verify, bench;
  CLI::App* c_lin = app.add_subcommand(
      "solve-linear", "solve the linear nonlocal problem and export fields");
  attach(c_lin, solve_lin, false);
  CLI::App* c_nl = app.add_subcommand(
      "solve-nonlinear", "solve with the nonlinearity via contraction iteration");
  attach(c_nl, solve_nl, false);
  CLI::App* c_ver = app.add_subcommand(
      "verify", "solve, then run identity/residual/oracle/estimate checks");
  attach(c_ver, verify, true);
  CLI::App* c_bench = app.add_subcommand(
      "bench", "time the serial reference against the parallel kernels");
  attach(c_bench, bench, false);

  CLI11_PARSE(app, argc, argv);

  nlwave::RunOptions opts;
  Common* c = nullptr;
  if (c_lin->parsed()) {
    opts.mode = nlwave::RunMode::SolveLinear;
    c = &solve_lin;
  } else if (c_nl->parsed()) {
    opts.mode = nlwave::RunMode::SolveNonlinear;
    c = &solve_nl;
  } else if (c_ver->parsed()) {
    opts.mode = nlwave::RunMode::Verify;
    c = &verify;
  } else {
    opts.mode = nlwave::RunMode::Bench;
    c = &bench;
  }
  opts.out_dir = c->out_dir;
  opts.threads = c->threads;
  opts.oracle_fine = c->oracle_fine;
  opts.export_fields = !c->no_fields;
  if (c->seed_set) opts.seed = c->seed;

  try {
    return nlwave::run_scenario(c->scenario, opts);
  } catch (const nlwave::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return nlwave::exit_config_failure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return nlwave::exit_solver_failure;
  }
}
