#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qwsi/indices.hpp"
#include "qwsi/models.hpp"
#include "qwsi/schur.hpp"
#include "qwsi/spectral.hpp"

namespace qwsi::cli {

namespace {

using json = nlohmann::ordered_json;

// ---- formatting -------------------------------------------------------

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// All text outputs are written in binary mode with explicit LF line
// endings so reruns are byte-identical across platforms.
void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

// ---- model plumbing ---------------------------------------------------

CoinProfile constant_profile(WalkModel model, const std::vector<double>& p) {
  return model == WalkModel::FourStep ? four_step_profile(p[0], p[1], p[2])
                                      : split_step_profile(p[0], p[1]);
}

GapReport point_gaps(const Config& cfg, const std::vector<double>& p) {
  // 1025 k-samples keep the sampled minimum within ~3e-3 of a true closure,
  // so exact closures are not misread as small-but-open gaps.
  return essential_gap(walk_symbol(cfg.model, p, cfg.garnish), 1025, cfg.gap_threshold);
}

// deterministic work distribution: results land in index order regardless
// of the thread count
template <typename F>
void parallel_for(int n, int threads, F&& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

Mat haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

std::vector<cplx> disc_samples(int n, std::mt19937_64& rng, double max_radius = 0.9) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> zs;
  zs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = max_radius * std::sqrt(u(rng));
    const double phi = 2.0 * M_PI * u(rng);
    zs.emplace_back(r * std::cos(phi), r * std::sin(phi));
  }
  return zs;
}

json table_to_json(const IndexTable& t) {
  json j;
  j["decoupling_kind"] = to_string(t.decoupling_kind);
  j["si_plus_left"] = t.si_plus_left.value;
  j["si_plus_right"] = t.si_plus_right.value;
  j["si_minus_left"] = t.si_minus_left.value;
  j["si_minus_right"] = t.si_minus_right.value;
  j["si_plus"] = t.si_plus.value;
  j["si_minus"] = t.si_minus.value;
  j["si_left"] = t.si_left.value;
  j["si_right"] = t.si_right.value;
  j["si_total"] = t.si_total.value;
  j["index_group"] = to_string(t.si_total.group);
  return j;
}

}  // namespace

// ---- phase-diagram ----------------------------------------------------

int cmd_phase_diagram(const Config& cfg, const RunOptions& opt) {
  require_grid(cfg);
  std::filesystem::create_directories(opt.out_dir);

  const int arity = cfg.arity();
  std::vector<int> counts(arity);
  int n_rows = 1;
  for (int a = 0; a < arity; ++a) {
    counts[a] = cfg.axes[a].count;
    n_rows *= counts[a];
  }

  std::vector<std::string> rows(n_rows);
  parallel_for(n_rows, opt.threads, [&](int idx) {
    // row-major: theta1 outermost, last axis innermost
    std::vector<double> p(arity);
    int rest = idx;
    for (int a = arity - 1; a >= 0; --a) {
      p[a] = cfg.axes[a].at(rest % counts[a]);
      rest /= counts[a];
    }

    std::string row;
    for (int a = 0; a < arity; ++a) row += fmt17(p[a]) + ",";
    const GapReport gaps = point_gaps(cfg, p);
    row += fmt17(gaps.gap_at_plus) + "," + fmt17(gaps.gap_at_minus) + ",";

    std::string winding = "nan", si_right = "nan", agree = "nan", status = "ok";
    if (gaps.closed_plus || gaps.closed_minus) {
      status = "gap_closed";
    } else {
      try {
        const int w = bulk_winding(walk_symbol(cfg.model, p, cfg.garnish), sigma1()).winding;
        winding = std::to_string(w);
        try {
          auto builder = model_window_builder(cfg.model, constant_profile(cfg.model, p),
                                              cfg.garnish);
          const IndexTable table = half_line_indices(
              [&](int hw) { return builder(-hw, hw - 1, {{0, cfg.decoupler}}); },
              cfg.cells_per_side, 0, cfg.tol_eig);
          si_right = std::to_string(table.si_right.value);
          agree = table.si_right.value == w ? "1" : "0";
        } catch (const std::exception& e) {
          status = "error: " + sanitize(e.what());
        }
      } catch (const WindingUndefinedError&) {
        status = "gap_closed";
      }
    }
    rows[idx] = row + winding + "," + si_right + "," + agree + "," + status + "\n";
  });

  std::string csv = "theta1,theta2,";
  if (arity == 3) csv += "theta3,";
  csv += "gap_at_plus,gap_at_minus,winding,si_right,agree,status\n";
  for (const auto& r : rows) csv += r;
  write_file(std::filesystem::path(opt.out_dir) / "phase_diagram.csv", csv);
  return 0;
}

// ---- edge-states ------------------------------------------------------

int cmd_edge_states(const Config& cfg, const RunOptions& opt) {
  std::filesystem::create_directories(opt.out_dir);
  const int hw = cfg.cells_per_side;

  const CoinProfile profile = crossover(cfg.model, cfg.left, cfg.right, cfg.ramp_width);
  auto builder = model_window_builder(cfg.model, profile, cfg.garnish);

  int exit_code = 0;
  json j;
  j["model"] = to_string(cfg.model);
  j["garnish"] = cfg.garnish;
  j["left"] = cfg.left;
  j["right"] = cfg.right;
  j["ramp_width"] = cfg.ramp_width;
  j["cut"] = cfg.cut;
  j["decoupler"] = to_string(cfg.decoupler);
  j["window"] = {{"x_min", -hw}, {"x_max", hw - 1}};

  try {
    const WalkWindow w = builder(-hw, hw - 1, {{cfg.cut, cfg.decoupler}});
    j["bulk_gap_plus"] = w.bulk_gap_plus;
    j["bulk_gap_minus"] = w.bulk_gap_minus;
    j["table"] = table_to_json(half_line_indices(w, cfg.cut, cfg.tol_eig));

    const bool chiral = w.rep.type().has(Gen::Gamma);
    Mat gamma;
    if (chiral) gamma = w.rep.window_op(Gen::Gamma).matrix;

    struct StateRow {
      double target, center, chirality, residual, middle_mass;
      bool near_cut;
      std::string side;
      Vec amplitudes;
    };
    std::vector<StateRow> states;
    for (const double lambda : {1.0, -1.0}) {
      const double radius = spectral_ambiguity_radius(w, lambda, cfg.tol_eig);
      const EigenspaceReport rep = eigenspace_near(w.walk, lambda, cfg.tol_eig, &w.rep, radius);
      for (int i = 0; i < rep.dimension; ++i) {
        const StateVector v = rep.vector(i);
        const LocalizationProfile prof = localization_profile(v);
        StateRow s;
        s.target = lambda;
        s.center = rep.centers[i];
        s.chirality = chiral ? (v.data.adjoint() * gamma * v.data).real()(0, 0) : 0.0;
        s.residual = rep.residuals[i];
        s.middle_mass = prof.middle_mass;
        // Side relative to the configured cut.  Decoupled states carry their
        // mass strictly on one side of the cut bond, so a half-mass test is
        // unambiguous.
        double mass_left = 0.0;
        for (int x = v.structure.x_min; x < cfg.cut && x <= v.structure.x_max(); ++x)
          mass_left += v.cell_mass(x);
        s.side = mass_left >= 0.5 ? "left" : "right";
        // Distinguish states bound to the interior cut from artifacts of the
        // sealed window boundary: compare the state's center against the cut
        // bond and the two window walls.
        const double dist_cut =
            std::min(std::abs(s.center - (cfg.cut - 1)), std::abs(s.center - cfg.cut));
        const double dist_wall = std::min(std::abs(s.center - v.structure.x_min),
                                          std::abs(s.center - v.structure.x_max()));
        s.near_cut = dist_cut < dist_wall;
        s.amplitudes = v.data;
        states.push_back(std::move(s));
      }
    }
    std::sort(states.begin(), states.end(), [](const StateRow& a, const StateRow& b) {
      if (a.target != b.target) return a.target > b.target;
      if (a.center != b.center) return a.center < b.center;
      return a.chirality < b.chirality;
    });

    const CellStructure& st = w.walk.structure();
    json jstates = json::array();
    for (std::size_t i = 0; i < states.size(); ++i) {
      const StateRow& s = states[i];
      char name[64];
      std::snprintf(name, sizeof(name), "eigenfunction_%02zu.csv", i);
      jstates.push_back({{"eigenvalue_target", s.target},
                         {"center", s.center},
                         {"side", s.side},
                         {"near_cut", s.near_cut},
                         {"chirality", s.chirality},
                         {"residual", s.residual},
                         {"middle_mass", s.middle_mass},
                         {"file", name}});
      std::string csv = "x,component,re,im,chirality,eigenvalue_target\n";
      for (int x = st.x_min; x <= st.x_max(); ++x)
        for (int c = 0; c < st.dim(x); ++c) {
          const cplx amp = s.amplitudes(st.offset(x) + c);
          csv += std::to_string(x) + "," + std::to_string(c) + "," + fmt17(amp.real()) + "," +
                 fmt17(amp.imag()) + "," + fmt17(s.chirality) + "," + fmt17(s.target) + "\n";
        }
      write_file(std::filesystem::path(opt.out_dir) / name, csv);
    }
    j["states"] = jstates;
  } catch (const ClusterAmbiguityError& e) {
    j["error"] = std::string("ambiguous eigenvalue cluster: ") + e.what();
    exit_code = 3;
  } catch (const AttributionError& e) {
    j["error"] = std::string("ambiguous attribution: ") + e.what();
    exit_code = 3;
  } catch (const EscalationError& e) {
    j["error"] = std::string("escalation failed: ") + e.what();
    exit_code = 3;
  }

  write_file(std::filesystem::path(opt.out_dir) / "edge_states.json", j.dump(2) + "\n");
  return exit_code;
}

// ---- verify -----------------------------------------------------------

namespace {

struct CheckResult {
  std::string name;
  std::string status;  // PASS / FAIL / SKIP
  std::string detail;
};

class VerifyRun {
 public:
  VerifyRun(const Config& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt), rng_(opt.seed) {}

  std::vector<CheckResult> run() {
    const GapReport gaps = point_gaps(cfg_, cfg_.params);
    const bool gapped = !gaps.closed_plus && !gaps.closed_minus;
    auto builder =
        model_window_builder(cfg_.model, constant_profile(cfg_.model, cfg_.params), cfg_.garnish);

    check("admissible", [&] {
      const WalkWindow w = builder(-hw(), hw() - 1, {});
      const AdmissibilityReport rep = check_admissible(w.walk, w.rep, cfg_.structural);
      return rep.ok ? pass("worst defect " + fmt17(rep.worst()))
                    : failure("defect " + fmt17(rep.worst()) + " above " + fmt17(cfg_.structural));
    });

    check("sum_rule", [&] {
      for (int s = 0; s < cfg_.sum_rule_samples; ++s) {
        const auto [lp, rp] = random_crossover_params();
        auto b = model_window_builder(cfg_.model, crossover(cfg_.model, lp, rp, 0), cfg_.garnish);
        const IndexTable table =
            half_line_indices(b(-hw(), hw() - 1, {{0, DecouplingKind::Gentle}}), 0, cfg_.tol_eig);
        const WalkWindow uncut = b(-hw(), hw() - 1, {});
        const TaggedIndex si = si_gap_interior(uncut, 1.0, cfg_.tol_eig) +
                               si_gap_interior(uncut, -1.0, cfg_.tol_eig);
        if (!(si == table.si_total))
          return failure("sample " + std::to_string(s) + ": uncut si " + to_string(si) +
                         " vs decoupled total " + to_string(table.si_total));
      }
      return pass(std::to_string(cfg_.sum_rule_samples) + " random crossovers");
    });

    check("cut_independence", [&] {
      for (int s = 0; s < cfg_.cut_pair_samples; ++s) {
        const std::vector<double> p = random_gapped_point();
        auto b = model_window_builder(cfg_.model, constant_profile(cfg_.model, p), cfg_.garnish);
        const CutIndependenceReport rep =
            verify_cut_independence(b, -10, 10, hw(), cfg_.tol_eig);
        if (!rep.ok)
          return failure("sample " + std::to_string(s) + ": middle " + to_string(rep.si_middle) +
                         ", si_right " + to_string(rep.si_right_at_x0) + " vs " +
                         to_string(rep.si_right_at_x1));
      }
      return pass(std::to_string(cfg_.cut_pair_samples) + " cut pairs 20 cells apart");
    });

    std::optional<GentleLocalComparison> cmp;
    check_gapped("decoupler_columns", gapped, [&] {
      cmp = compare_gentle_vs_local(builder, 0, hw(), cfg_.tol_eig);
      return cmp->columns_match ? pass("columns si_left/si_right/si_total agree")
                                : failure("column marginals differ between decouplers");
    });

    check_gapped("gentle_row_sums", gapped, [&] {
      if (!cmp) return failure("comparison unavailable");
      const WalkWindow uncut = builder(-hw(), hw() - 1, {});
      const TaggedIndex sp = si_gap_interior(uncut, 1.0, cfg_.tol_eig);
      const TaggedIndex sm = si_gap_interior(uncut, -1.0, cfg_.tol_eig);
      if (!(cmp->gentle.si_plus == sp) || !(cmp->gentle.si_minus == sm))
        return failure("gentle rows (" + to_string(cmp->gentle.si_plus) + ", " +
                       to_string(cmp->gentle.si_minus) + ") vs gap indices (" + to_string(sp) +
                       ", " + to_string(sm) + ")");
      return pass("row sums match the uncut gap indices");
    });

    check_gapped("winding_agreement", gapped, [&] {
      if (!cmp) return failure("comparison unavailable");
      const WindingResult w = bulk_winding(walk_symbol(cfg_.model, cfg_.params, cfg_.garnish),
                                           sigma1());
      return w.winding == cmp->gentle.si_right.value
                 ? pass("winding " + std::to_string(w.winding))
                 : failure("winding " + std::to_string(w.winding) + " vs si_right " +
                           to_string(cmp->gentle.si_right));
    });

    check_gapped("renewal", gapped, [&] {
      const WalkWindow w = builder(-hw(), hw() - 1, {{0, DecouplingKind::Gentle}});
      SchurContext ctx =
          make_schur_context(w.walk, cfg_.h0_cells, cfg_.trunc, cfg_.tol_series);
      ctx.bulk_gap = gaps_of(cfg_.params);
      const Mat v = haar_unitary(ctx.h0_dim(), rng_);
      const RenewalReport rep = renewal_check(ctx, v, disc_samples(cfg_.z_samples, rng_));
      return rep.best_deviation < 1e-7
                 ? pass(rep.best_variant + " deviation " + fmt17(rep.best_deviation))
                 : failure("best variant " + rep.best_variant + " deviation " +
                           fmt17(rep.best_deviation));
    });

    return results_;
  }

 private:
  int hw() const { return cfg_.cells_per_side; }
  GapReport gaps_of(const std::vector<double>& p) const { return point_gaps(cfg_, p); }

  CheckResult pass(std::string detail) { return {"", "PASS", std::move(detail)}; }
  CheckResult failure(std::string detail) { return {"", "FAIL", std::move(detail)}; }

  template <typename F>
  void check(const std::string& name, F&& body) {
    CheckResult r;
    try {
      r = body();
    } catch (const std::exception& e) {
      r = failure(sanitize(e.what()));
    }
    r.name = name;
    results_.push_back(std::move(r));
  }

  template <typename F>
  void check_gapped(const std::string& name, bool gapped, F&& body) {
    if (!gapped) {
      results_.push_back({name, "SKIP", "gap closed at the configured point"});
      return;
    }
    check(name, std::forward<F>(body));
  }

  std::vector<double> random_gapped_point() {
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (int tries = 0; tries < 1000; ++tries) {
      std::vector<double> p(cfg_.arity());
      for (double& a : p) a = ang(rng_);
      const GapReport g = gaps_of(p);
      if (std::min(g.gap_at_plus, g.gap_at_minus) >= 0.3) return p;
    }
    throw std::runtime_error("could not sample a gapped parameter point");
  }

  std::pair<std::vector<double>, std::vector<double>> random_crossover_params() {
    return {random_gapped_point(), random_gapped_point()};
  }

  const Config& cfg_;
  const RunOptions& opt_;
  std::mt19937_64 rng_;
  std::vector<CheckResult> results_;
};

}  // namespace

int cmd_verify(const Config& cfg, const RunOptions& opt) {
  std::filesystem::create_directories(opt.out_dir);
  VerifyRun run(cfg, opt);
  const std::vector<CheckResult> results = run.run();

  std::string text;
  json jchecks = json::array();
  bool any_fail = false;
  for (const CheckResult& r : results) {
    text += r.status + " " + r.name + (r.detail.empty() ? "" : " — " + r.detail) + "\n";
    jchecks.push_back({{"name", r.name}, {"status", r.status}, {"detail", r.detail}});
    any_fail = any_fail || r.status == "FAIL";
  }
  std::fputs(text.c_str(), stdout);

  json j;
  j["model"] = to_string(cfg.model);
  j["params"] = cfg.params;
  j["checks"] = jchecks;
  j["ok"] = !any_fail;
  write_file(std::filesystem::path(opt.out_dir) / "verify.json", j.dump(2) + "\n");
  return any_fail ? 1 : 0;
}

// ---- schur-probe ------------------------------------------------------

int cmd_schur_probe(const Config& cfg, const RunOptions& opt) {
  std::filesystem::create_directories(opt.out_dir);
  std::mt19937_64 rng(opt.seed);
  const int hw = cfg.cells_per_side;

  json j;
  j["model"] = to_string(cfg.model);
  j["params"] = cfg.left;
  j["garnish"] = cfg.garnish;
  j["cut"] = cfg.cut;
  j["h0_cells"] = cfg.h0_cells;

  int exit_code = 0;
  try {
    auto builder =
        model_window_builder(cfg.model, constant_profile(cfg.model, cfg.left), cfg.garnish);
    const WalkWindow w = builder(-hw, hw - 1, {{cfg.cut, DecouplingKind::Gentle}});
    SchurContext ctx = make_schur_context(w.walk, cfg.h0_cells, cfg.trunc, cfg.tol_series);
    ctx.bulk_gap = point_gaps(cfg, cfg.left);
    j["h0_dim"] = ctx.h0_dim();
    j["trunc"] = ctx.effective_trunc();
    j["tol_series"] = cfg.tol_series;

    if (cfg.schur_do_eval) {
      json jevals = json::array();
      for (const cplx z : disc_samples(cfg.z_samples, rng)) {
        const Mat f = schur_eval(ctx, z);
        const double norm = f.operatorNorm();
        jevals.push_back({{"z_re", z.real()},
                          {"z_im", z.imag()},
                          {"norm", norm},
                          {"contractive", norm <= 1.0 + cfg.tol_series + 1e-9}});
      }
      j["eval"] = jevals;
    }

    if (cfg.schur_do_eigendetect) {
      json jdet = json::array();
      for (const double lambda : {1.0, -1.0}) {
        const EigendetectReport rep = eigendetect(ctx, lambda, 5e-3, &w.rep);
        json jr;
        jr["eigenvalue_target"] = lambda;
        jr["dimension"] = rep.dimension;
        jr["spectral_margin"] = rep.spectral_margin;
        if (rep.chirality_trace) jr["chirality_trace"] = *rep.chirality_trace;
        json evs = json::array();
        for (const cplx mu : rep.fixed_eigenvalues)
          evs.push_back({{"re", mu.real()}, {"im", mu.imag()}});
        jr["fixed_eigenvalues"] = evs;
        jdet.push_back(jr);
      }
      j["eigendetect"] = jdet;
    }

    if (cfg.schur_do_renewal) {
      const Mat v = haar_unitary(ctx.h0_dim(), rng);
      const RenewalReport rep = renewal_check(ctx, v, disc_samples(cfg.z_samples, rng));
      json jr;
      jr["best_variant"] = rep.best_variant;
      jr["best_deviation"] = rep.best_deviation;
      json jd;
      for (const auto& [variant, dev] : rep.deviation) jd[variant] = dev;
      jr["deviation"] = jd;
      j["renewal"] = jr;
    }
  } catch (const SchurConvergenceError& e) {
    j["error"] = std::string("series did not converge: ") + e.what();
    exit_code = 3;
  }

  write_file(std::filesystem::path(opt.out_dir) / "schur_probe.json", j.dump(2) + "\n");
  return exit_code;
}

}  // namespace qwsi::cli
