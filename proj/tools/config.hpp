#pragma once
// Sectioned key = value configuration for the command-line driver.
//
// Sections group keys per concern ([model], [grid], [window], [tolerances],
// [decoupler], [edge_states], [schur], [verify]); '#' and ';' start
// comments.  Unknown sections or keys are hard errors (exit code 2), as are
// out-of-range values: a config that parses is a config the commands can
// run.  Grid axes use inclusive endpoints with `count` evenly spaced
// samples; count = 1 is legal only when min == max.

#include <stdexcept>
#include <string>
#include <vector>

#include "qwsi/models.hpp"

namespace qwsi::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AxisSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  double at(int i) const {
    return count == 1 ? min : min + (max - min) * static_cast<double>(i) / (count - 1);
  }
};

struct Config {
  // [model]
  WalkModel model = WalkModel::SplitStep;
  bool garnish = false;

  // [grid] — one axis per model angle, required by phase-diagram only
  std::vector<AxisSpec> axes;

  // [window]
  int cells_per_side = 60;

  // [tolerances]
  double tol_eig = 1e-8;
  double structural = 1e-10;
  // Gap values at or below this are treated as closed.  Sized for the
  // 1025-point band sampling used by the commands: an exact closure reads
  // back as ~3e-3 (half the k-grid spacing times band slope <= 1), safely
  // below 1e-2, while genuinely gapped sweep points sit well above it.
  double gap_threshold = 1e-2;

  // [decoupler]
  DecouplingKind decoupler = DecouplingKind::Gentle;

  // [edge_states]
  std::vector<double> left;   // empty → model default point
  std::vector<double> right;  // empty → same as left
  int ramp_width = 0;
  int cut = 0;

  // [schur]
  std::vector<int> h0_cells = {-1, 0};
  int trunc = 0;  // 0 → library default (4 × window cells)
  double tol_series = 1e-8;
  int z_samples = 10;
  bool schur_do_eval = true;
  bool schur_do_eigendetect = true;
  bool schur_do_renewal = true;

  // [verify]
  std::vector<double> params;  // empty → model default point
  int sum_rule_samples = 8;
  int cut_pair_samples = 4;

  int arity() const { return model == WalkModel::FourStep ? 3 : 2; }
};

// Parses and validates; throws ConfigError on any syntax, schema, or range
// violation (the caller maps this to exit code 2).
Config parse_config_file(const std::string& path);

// Extra precondition of the phase-diagram command: the grid must be present
// with one axis per model angle.
void require_grid(const Config& cfg);

}  // namespace qwsi::cli
