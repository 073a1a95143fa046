#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace chartlab {

// Options shared by every subcommand. A --seed on the command line replaces
// the config's seed list with that single seed.
struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> emit_override;  // "csv" or "json"
  std::string out_dir = ".";
  int threads = 0;  // 0 keeps the runtime default
};

// Exit codes: 0 thresholds met, 1 thresholds failed, 2 config error.
int cmd_verify_localization(const RunOptions& options);
int cmd_prop1(const RunOptions& options);
int cmd_thm_scan(const RunOptions& options);
int cmd_train_demo(const RunOptions& options);
int cmd_lk_bench(const RunOptions& options);

}  // namespace chartlab
