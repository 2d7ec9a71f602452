#pragma once
// Command implementations behind the CLI subcommands.  Each returns the
// process exit code: 0 success, 1 verification failure, 2 config error
// (thrown as ConfigError and mapped by the caller), 3 numerical escalation
// or attribution failure.

#include <cstdint>
#include <string>

#include "config.hpp"

namespace qwsi::cli {

struct RunOptions {
  std::string out_dir = ".";
  int threads = 0;  // 0 → hardware concurrency
  std::uint64_t seed = 12345;
};

int cmd_phase_diagram(const Config& cfg, const RunOptions& opt);
int cmd_edge_states(const Config& cfg, const RunOptions& opt);
int cmd_verify(const Config& cfg, const RunOptions& opt);
int cmd_schur_probe(const Config& cfg, const RunOptions& opt);

}  // namespace qwsi::cli
