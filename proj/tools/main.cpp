// Command-line driver: parameter sweeps, edge-state extraction, invariant
// verification, and Schur-function probes for one-dimensional quantum walks.
//
// Exit codes: 0 success, 1 verification failure, 2 config error,
// 3 numerical escalation / attribution / convergence failure.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "qwsi/indices.hpp"
#include "qwsi/schur.hpp"
#include "qwsi/spectral.hpp"

int main(int argc, char** argv) {
  using namespace qwsi;
  using namespace qwsi::cli;

  CLI::App app{"Symmetry indices and edge states of one-dimensional quantum walks"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions opt;
  int command = 0;

  auto add_common = [&](CLI::App* sub, int id) {
    sub->add_option("--config", config_path, "configuration file (sectioned key = value)")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory (default: current directory)");
    sub->add_option("--threads", opt.threads, "worker threads; 0 = hardware concurrency");
    sub->add_option("--seed", opt.seed, "seed for randomized property checks");
    sub->callback([&command, id] { command = id; });
  };

  add_common(app.add_subcommand("phase-diagram",
                                "sweep the angle grid; CSV with gaps, winding and si_right"),
             1);
  add_common(app.add_subcommand("edge-states",
                                "diagonalize a decoupled window; JSON report and "
                                "eigenfunction CSV dumps"),
             2);
  add_common(app.add_subcommand("verify", "run the named invariant checks; exit 0 iff all pass"),
             3);
  add_common(app.add_subcommand("schur-probe",
                                "evaluate the Schur function, detect ±1 eigenvalues, and "
                                "test the renewal identity"),
             4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad command line is a config error
  }

  try {
    const Config cfg = parse_config_file(config_path);
    switch (command) {
      case 1:
        return cmd_phase_diagram(cfg, opt);
      case 2:
        return cmd_edge_states(cfg, opt);
      case 3:
        return cmd_verify(cfg, opt);
      case 4:
        return cmd_schur_probe(cfg, opt);
    }
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ClusterAmbiguityError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const AttributionError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const EscalationError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const SchurConvergenceError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
