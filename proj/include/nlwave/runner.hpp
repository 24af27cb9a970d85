#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace nlwave {

enum class RunMode { SolveLinear, SolveNonlinear, Verify, Bench };

struct RunOptions {
  RunMode mode = RunMode::Verify;
  std::string out_dir = "out";
  int threads = 0;      // > 0 pins the OpenMP team size
  int oracle_fine = 0;  // > 0 overrides the scenario's oracle fine factor
  bool export_fields = true;
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
};

// Loads the scenario, dispatches on mode, writes report.json / report.txt
// (plus norms.csv and solution binaries for solve modes) under out_dir, and
// returns the process exit code: 0 when all enabled checks pass, 1 on solver
// failure or any failed check. Configuration problems throw ConfigError for
// the CLI to map to exit code 2.
int run_scenario(const std::string& scenario_path, const RunOptions& opts);

}  // namespace nlwave
