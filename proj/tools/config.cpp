#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qwsi::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(int line, const std::string& v) {
  std::size_t pos = 0;
  double d = 0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, "trailing characters after number '" + v + "'");
  return d;
}

int parse_int(int line, const std::string& v) {
  std::size_t pos = 0;
  int i = 0;
  try {
    i = std::stoi(v, &pos);
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, "trailing characters after integer '" + v + "'");
  return i;
}

bool parse_bool(int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_double_list(int line, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(line, s));
  return out;
}

std::vector<int> parse_int_list(int line, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(parse_int(line, s));
  return out;
}

constexpr double kPi = 3.14159265358979323846;

void check_angle_range(const std::vector<double>& v, const std::string& what) {
  for (double a : v)
    if (!(a > -kPi && a <= kPi))
      throw ConfigError(what + ": angle " + std::to_string(a) + " outside (-pi, pi]");
}

}  // namespace

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  Config cfg;
  // grid axes keyed by index while parsing; assembled afterwards
  std::map<int, AxisSpec> axes;
  std::map<int, bool> axis_touched[3];  // min / max / count seen

  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      static const char* known[] = {"model",      "grid",        "window", "tolerances",
                                    "decoupler",  "edge_states", "schur",  "verify"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) fail(line, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (val.empty()) fail(line, "empty value for key '" + key + "'");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");

    if (section == "model") {
      if (key == "name") {
        if (val == "split_step")
          cfg.model = WalkModel::SplitStep;
        else if (val == "four_step")
          cfg.model = WalkModel::FourStep;
        else
          fail(line, "model name must be split_step or four_step");
      } else if (key == "garnish") {
        cfg.garnish = parse_bool(line, val);
      } else {
        fail(line, "unknown key '" + key + "' in [model]");
      }
    } else if (section == "grid") {
      // keys theta<N>_min / _max / _count with N in 1..3
      if (key.rfind("theta", 0) != 0 || key.size() < 7) fail(line, "unknown key '" + key + "' in [grid]");
      const char axis_ch = key[5];
      if (axis_ch < '1' || axis_ch > '3') fail(line, "grid axis must be theta1..theta3");
      const int axis = axis_ch - '1';
      const std::string field = key.substr(6);
      if (field == "_min") {
        axes[axis].min = parse_double(line, val);
        axis_touched[0][axis] = true;
      } else if (field == "_max") {
        axes[axis].max = parse_double(line, val);
        axis_touched[1][axis] = true;
      } else if (field == "_count") {
        axes[axis].count = parse_int(line, val);
        axis_touched[2][axis] = true;
      } else {
        fail(line, "unknown key '" + key + "' in [grid]");
      }
    } else if (section == "window") {
      if (key == "cells_per_side")
        cfg.cells_per_side = parse_int(line, val);
      else
        fail(line, "unknown key '" + key + "' in [window]");
    } else if (section == "tolerances") {
      if (key == "tol_eig")
        cfg.tol_eig = parse_double(line, val);
      else if (key == "structural")
        cfg.structural = parse_double(line, val);
      else if (key == "gap_threshold")
        cfg.gap_threshold = parse_double(line, val);
      else
        fail(line, "unknown key '" + key + "' in [tolerances]");
    } else if (section == "decoupler") {
      if (key == "kind") {
        if (val == "gentle")
          cfg.decoupler = DecouplingKind::Gentle;
        else if (val == "reflection")
          cfg.decoupler = DecouplingKind::Local;
        else
          fail(line, "decoupler kind must be gentle or reflection");
      } else {
        fail(line, "unknown key '" + key + "' in [decoupler]");
      }
    } else if (section == "edge_states") {
      if (key == "left")
        cfg.left = parse_double_list(line, val);
      else if (key == "right")
        cfg.right = parse_double_list(line, val);
      else if (key == "ramp_width")
        cfg.ramp_width = parse_int(line, val);
      else if (key == "cut")
        cfg.cut = parse_int(line, val);
      else
        fail(line, "unknown key '" + key + "' in [edge_states]");
    } else if (section == "schur") {
      if (key == "h0_cells")
        cfg.h0_cells = parse_int_list(line, val);
      else if (key == "trunc")
        cfg.trunc = parse_int(line, val);
      else if (key == "tol_series")
        cfg.tol_series = parse_double(line, val);
      else if (key == "z_samples")
        cfg.z_samples = parse_int(line, val);
      else if (key == "eval")
        cfg.schur_do_eval = parse_bool(line, val);
      else if (key == "eigendetect")
        cfg.schur_do_eigendetect = parse_bool(line, val);
      else if (key == "renewal")
        cfg.schur_do_renewal = parse_bool(line, val);
      else
        fail(line, "unknown key '" + key + "' in [schur]");
    } else if (section == "verify") {
      if (key == "params")
        cfg.params = parse_double_list(line, val);
      else if (key == "sum_rule_samples")
        cfg.sum_rule_samples = parse_int(line, val);
      else if (key == "cut_pair_samples")
        cfg.cut_pair_samples = parse_int(line, val);
      else
        fail(line, "unknown key '" + key + "' in [verify]");
    }
  }

  // ---- assemble and validate ------------------------------------------
  const int arity = cfg.arity();

  if (cfg.garnish && cfg.model != WalkModel::FourStep)
    throw ConfigError("garnish applies to the four_step model only");

  if (!axes.empty()) {
    for (const auto& [axis, spec] : axes) {
      if (axis >= arity)
        throw ConfigError("grid axis theta" + std::to_string(axis + 1) + " not valid for " +
                          to_string(cfg.model));
      if (!(axis_touched[0].count(axis) && axis_touched[1].count(axis) &&
            axis_touched[2].count(axis)))
        throw ConfigError("grid axis theta" + std::to_string(axis + 1) +
                          " needs min, max and count");
      (void)spec;
    }
    for (int a = 0; a < arity; ++a)
      if (!axes.count(a))
        throw ConfigError("grid is missing axis theta" + std::to_string(a + 1));
    cfg.axes.resize(arity);
    for (int a = 0; a < arity; ++a) cfg.axes[a] = axes[a];
    for (const AxisSpec& ax : cfg.axes) {
      if (ax.count < 1) throw ConfigError("grid axis count must be >= 1");
      if (ax.count == 1 && ax.min != ax.max)
        throw ConfigError("grid axis with count = 1 requires min == max");
      if (ax.count >= 2 && !(ax.min < ax.max))
        throw ConfigError("grid axis requires min < max when count >= 2");
      check_angle_range({ax.min, ax.max}, "grid axis");
    }
  }

  if (cfg.cells_per_side < 2) throw ConfigError("cells_per_side must be >= 2");
  if (!(cfg.tol_eig > 0 && cfg.structural > 0 && cfg.gap_threshold > 0))
    throw ConfigError("tolerances must be positive");
  if (cfg.ramp_width < 0) throw ConfigError("ramp_width must be >= 0");
  if (std::abs(cfg.cut) >= cfg.cells_per_side)
    throw ConfigError("cut must lie strictly inside the window");
  if (cfg.h0_cells.empty()) throw ConfigError("h0_cells must name at least one cell");
  if (cfg.trunc < 0) throw ConfigError("trunc must be >= 0");
  if (cfg.tol_series <= 0) throw ConfigError("tol_series must be positive");
  if (cfg.z_samples < 1) throw ConfigError("z_samples must be >= 1");
  if (cfg.sum_rule_samples < 1 || cfg.cut_pair_samples < 1)
    throw ConfigError("verify sample counts must be >= 1");

  const std::vector<double> default_point =
      cfg.model == WalkModel::FourStep
          ? std::vector<double>{kFourStepExampleA, kFourStepExampleB, kFourStepExampleC}
          : std::vector<double>{1.0, 0.3};
  if (cfg.left.empty()) cfg.left = default_point;
  if (cfg.params.empty()) cfg.params = default_point;
  if (cfg.right.empty()) cfg.right = cfg.left;

  auto check_params = [&](const std::vector<double>& p, const std::string& what) {
    if (static_cast<int>(p.size()) != arity)
      throw ConfigError(what + ": expected " + std::to_string(arity) + " angles for " +
                        to_string(cfg.model) + ", got " + std::to_string(p.size()));
    check_angle_range(p, what);
  };
  check_params(cfg.left, "edge_states left");
  check_params(cfg.right, "edge_states right");
  check_params(cfg.params, "verify params");

  return cfg;
}

void require_grid(const Config& cfg) {
  if (cfg.axes.empty())
    throw ConfigError("phase-diagram needs a [grid] section with one axis per model angle");
}

}  // namespace qwsi::cli
