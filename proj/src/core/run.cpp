// SPDX-License-Identifier: Apache-2.0
#include "run.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>

#include "continuation.hpp"
#include "error.hpp"
#include "snapshot.hpp"
#include "studies.hpp"

namespace ltopt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* mode_name(Mode mode) noexcept {
  switch (mode) {
    case Mode::solve: return "solve";
    case Mode::branch: return "branch";
    case Mode::envelope: return "envelope";
    case Mode::convergence_study: return "convergence_study";
    case Mode::separation_study: return "separation_study";
  }
  return "unknown";
}

namespace {

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::solve, Mode::branch, Mode::envelope, Mode::convergence_study, Mode::separation_study})
    if (s == mode_name(m)) return m;
  fail(ErrorCode::invalid_parameter, "unknown mode '" + s + "'");
}

DensityRule parse_density(const std::string& s) {
  if (s == "projected") return DensityRule::projected;
  if (s == "nodal") return DensityRule::nodal;
  fail(ErrorCode::invalid_parameter, "unknown density rule '" + s + "'");
}

template <class T>
void take(const json& j, const char* key, T& value, std::set<std::string>& seen) {
  if (!j.contains(key)) return;
  seen.insert(key);
  try {
    value = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_parameter, std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& seen, const std::string& where) {
  for (const auto& [key, _] : j.items())
    require(seen.count(key) == 1, ErrorCode::invalid_parameter, "unknown config key '" + where + key + "'");
}

}  // namespace

json to_json(const RunConfig& c) {
  return json{{"mode", mode_name(c.mode)},
              {"d", c.d},
              {"gamma", c.gamma},
              {"gamma_min", c.gamma_min},
              {"gamma_max", c.gamma_max},
              {"gamma_step", c.gamma_step},
              {"N", c.N},
              {"L", c.L},
              {"grading", c.grading},
              {"tol", c.tol},
              {"max_iters", c.max_iters},
              {"seed",
               {{"width", c.seed.width},
                {"amplitude", c.seed.amplitude},
                {"center", c.seed.center},
                {"snapshot", c.seed.snapshot},
                {"library", c.seed.library},
                {"separation", c.seed.separation}}},
              {"out", c.out},
              {"workers", c.workers},
              {"density", density_rule_name(c.density)},
              {"crossing_width", c.crossing_width}};
}

RunConfig config_from_json(const json& j) {
  require(j.is_object(), ErrorCode::invalid_parameter, "config must be a JSON object");
  RunConfig c;
  std::set<std::string> seen;
  std::string mode = mode_name(c.mode), density = density_rule_name(c.density);
  take(j, "mode", mode, seen);
  take(j, "d", c.d, seen);
  take(j, "gamma", c.gamma, seen);
  take(j, "gamma_min", c.gamma_min, seen);
  take(j, "gamma_max", c.gamma_max, seen);
  take(j, "gamma_step", c.gamma_step, seen);
  take(j, "N", c.N, seen);
  take(j, "L", c.L, seen);
  take(j, "grading", c.grading, seen);
  take(j, "tol", c.tol, seen);
  take(j, "max_iters", c.max_iters, seen);
  take(j, "out", c.out, seen);
  take(j, "workers", c.workers, seen);
  take(j, "density", density, seen);
  take(j, "crossing_width", c.crossing_width, seen);
  if (j.contains("seed")) {
    seen.insert("seed");
    const json& s = j.at("seed");
    require(s.is_object(), ErrorCode::invalid_parameter, "config key 'seed' must be an object");
    std::set<std::string> seed_seen;
    take(s, "width", c.seed.width, seed_seen);
    take(s, "amplitude", c.seed.amplitude, seed_seen);
    take(s, "center", c.seed.center, seed_seen);
    take(s, "snapshot", c.seed.snapshot, seed_seen);
    take(s, "library", c.seed.library, seed_seen);
    take(s, "separation", c.seed.separation, seed_seen);
    reject_unknown(s, seed_seen, "seed.");
  }
  reject_unknown(j, seen, "");
  c.mode = parse_mode(mode);
  c.density = parse_density(density);
  return c;
}

void validate(const RunConfig& c) {
  const auto bad = ErrorCode::invalid_parameter;
  require(c.d >= 1, bad, "d must be at least 1");
  require(c.N >= kMinElements, bad, "N must be at least " + std::to_string(kMinElements));
  require(c.L > 0.0 && std::isfinite(c.L), bad, "L must be positive");
  require(c.grading >= 1.0 && std::isfinite(c.grading), bad, "grading must be >= 1");
  require(c.tol > 0.0, bad, "tol must be positive");
  require(c.max_iters >= 1, bad, "max_iters must be at least 1");
  require(c.workers >= 1, bad, "workers must be at least 1");
  require(!c.out.empty(), bad, "out directory must be set");
  require(c.seed.width > 0.0 && c.seed.amplitude > 0.0, bad, "seed width and amplitude must be positive");
  require(c.crossing_width > 0.0, bad, "crossing_width must be positive");

  switch (c.mode) {
    case Mode::solve:
      validate(LTParams{c.gamma, c.d});
      break;
    case Mode::branch:
    case Mode::envelope:
      validate(LTParams{c.gamma_min, c.d});
      validate(LTParams{c.gamma_max, c.d});
      require(c.gamma_min < c.gamma_max, bad, "gamma_min must be below gamma_max");
      require(c.gamma_step > 0.0 && c.gamma_step <= kMaxContinuationStep, bad, "gamma_step must lie in (0, 0.05]");
      if (c.mode == Mode::envelope) {
        require(!c.seed.library.empty(), bad, "envelope mode needs at least one seed width");
        for (double w : c.seed.library) require(w > 0.0, bad, "seed library widths must be positive");
      }
      break;
    case Mode::separation_study:
      require(c.d == 1, bad, "separation study runs in one dimension");
      validate(LTParams{c.gamma, c.d});
      require(c.seed.separation > 0.0, bad, "seed separation must be positive");
      require(c.max_iters >= 2, bad, "separation study needs at least two iterations");
      break;
    case Mode::convergence_study:
      break;
  }
  if (!c.seed.snapshot.empty()) {
    require(c.mode == Mode::solve || c.mode == Mode::branch || c.mode == Mode::separation_study, bad,
            "seed snapshots apply to solve, branch and separation modes");
    const PotentialField V = load_snapshot(c.seed.snapshot);
    require(V.dim == c.d, ErrorCode::mismatched_grid, "snapshot dimension does not match d");
    require(V.grid.radial() == (c.d >= 2), ErrorCode::mismatched_grid, "snapshot grid kind does not match d");
  }
}

int effective_workers(const RunConfig& config) {
  int workers = config.workers;
  if (const char* env = std::getenv("LT_OPTIM_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) workers = std::min(workers, cap);
  }
  return std::max(1, workers);
}

namespace {

class Csv {
 public:
  Csv(const fs::path& path, const RunConfig& config, const std::string& columns) : os_(path), path_(path) {
    require(static_cast<bool>(os_), ErrorCode::io_error, "cannot write " + path.string());
    os_ << "# config: " << to_json(config).dump() << '\n';
    os_ << "# columns: " << columns << '\n';
  }
  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(values), first = false), ...);
    os_ << '\n';
  }
  void header(const std::string& names) { os_ << names << '\n'; }
  ~Csv() { os_.flush(); }

 private:
  static std::string cell(double v) { return exact(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ofstream os_;
  fs::path path_;
};

Grid grid_of(const RunConfig& c) {
  return c.d == 1 ? make_grid(c.N, c.L, DomainKind::full_line) : make_grid(c.N, c.L, DomainKind::radial_halfline, c.grading);
}

PotentialField seed_of(const RunConfig& c, double gamma) {
  if (!c.seed.snapshot.empty()) {
    PotentialField V = load_snapshot(c.seed.snapshot);
    V.gamma = gamma;
    return normalized(std::move(V));
  }
  return gaussian_potential(grid_of(c), c.d, gamma, c.seed.width, c.seed.amplitude, c.seed.center);
}

FixedPointConfig solver_config(const RunConfig& c, int workers) {
  FixedPointConfig f;
  f.tol = c.tol;
  f.max_iters = c.max_iters;
  f.density = c.density;
  f.bump_detection = c.d == 1;
  f.scan.workers = workers;
  return f;
}

json spectrum_json(const Spectrum& s) {
  json channels = json::array();
  for (const auto& c : s.channels) {
    json lambdas = json::array();
    for (const auto& p : c.pairs) lambdas.push_back(p.lambda);
    channels.push_back({{"l", c.l}, {"multiplicity", c.multiplicity}, {"lambda", lambdas}, {"certificate", c.certificate}});
  }
  return channels;
}

json harmonic_json(const Spectrum& s, const PotentialField& V) {
  if (!V.grid.radial()) return {{"applicable", false}, {"note", "line potential"}};
  try {
    const HarmonicPatternReport r = harmonic_pattern_check(s, V);
    json shifted = json::array(), predictions = json::array();
    for (const auto& p : r.shifted) shifted.push_back({{"k", p.k}, {"l", p.l}, {"difference", p.difference}});
    for (const auto& p : r.predictions)
      predictions.push_back({{"k", p.k}, {"l", p.l}, {"lambda", p.lambda}, {"predicted", p.predicted}});
    return {{"applicable", true},
            {"v0", r.v0},
            {"v2", r.v2},
            {"counts", r.counts},
            {"triangular", r.triangular},
            {"shifted", shifted},
            {"predictions", predictions},
            {"max_shift_difference", r.max_shift_difference},
            {"max_prediction_residual", r.max_prediction_residual}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::insufficient_channels) throw;
    return {{"applicable", false}, {"note", e.what()}};
  }
}

void write_summary(const fs::path& dir, const json& summary) {
  std::ofstream os(dir / "summary.json");
  require(static_cast<bool>(os), ErrorCode::io_error, "cannot write summary.json");
  os << summary.dump(2) << '\n';
}

json point_json(const BranchPoint& p) {
  return {{"gamma", p.gamma}, {"ratio", p.ratio}, {"bound_states", p.bound_states}};
}

json crossing_json(const std::optional<Crossing>& c) {
  if (!c) return {{"found", false}};
  return {{"found", true},
          {"branch_label", c->branch_label},
          {"gamma_c", c->gamma_c},
          {"left", point_json(c->left)},
          {"right", point_json(c->right)},
          {"initial_bracket", {c->initial_left, c->initial_right}},
          {"solves", c->solves}};
}

json branch_json(const Branch& b) {
  json events = json::array();
  for (const auto& e : b.events)
    events.push_back({{"gamma_before", e.gamma_before},
                      {"gamma_after", e.gamma_after},
                      {"count_before", e.count_before},
                      {"count_after", e.count_after}});
  return {{"label", b.label},
          {"points", b.points.size()},
          {"gamma_first", b.points.empty() ? 0.0 : b.points.front().gamma},
          {"gamma_last", b.points.empty() ? 0.0 : b.points.back().gamma},
          {"events", events},
          {"termination", b.termination}};
}

void write_branch_rows(Csv& csv, const Branch& b) {
  for (const auto& p : b.points) csv.row(b.label, p.gamma, p.ratio, p.bound_states, p.iterations, p.snapshot_ref);
}

RunReport run_solve(const RunConfig& c, const fs::path& dir, int workers) {
  const PotentialField seed = seed_of(c, c.gamma);
  const FixedPointSolver solver(seed.grid, c.d, solver_config(c, workers));

  Csv trace(dir / "trace.csv", c, "iteration, LT energy E(V_n), ratio R(V_n), sup |V_{n+1} - V_n|, bound states, "
                                  "bump centers separated by ';'");
  trace.header("iter,energy,ratio,residual,bound_states,bump_centers");
  const FixedPointResult r = solver.run(seed, [&](const IterationStep& s) {
    std::string centers;
    for (std::size_t i = 0; i < s.bump_centers.size(); ++i) centers += (i ? ";" : "") + exact(s.bump_centers[i]);
    trace.row(s.iter, s.energy, s.ratio, s.residual_sup, s.bound_states, centers);
  });
  save_snapshot(dir / "potential.csv", r.potential);

  Csv spectrum(dir / "spectrum.csv", c, "angular momentum l, index k within the channel, eigenvalue, multiplicity");
  spectrum.header("l,k,lambda,multiplicity");
  for (const auto& ch : r.spectrum.channels)
    for (std::size_t k = 0; k < ch.pairs.size(); ++k) spectrum.row(ch.l, k, ch.pairs[k].lambda, ch.multiplicity);

  RunReport rep;
  const IterationStep& last = r.trace.steps.back();
  rep.summary = {{"mode", "solve"},
                 {"config", to_json(c)},
                 {"outcome", outcome_name(r.trace.outcome)},
                 {"iterations", r.trace.steps.size()},
                 {"energy", r.evaluation.energy},
                 {"ratio", r.evaluation.ratio},
                 {"bound_states", r.evaluation.bound_states},
                 {"norm_integral", norm_integral(r.potential, params_of(r.potential))},
                 {"residual", last.residual_sup},
                 {"monotonicity_violations", r.trace.monotonicity_violations},
                 {"spectrum", spectrum_json(r.spectrum)},
                 {"harmonic_pattern", harmonic_json(r.spectrum, r.potential)},
                 {"files", {"trace.csv", "potential.csv", "spectrum.csv"}}};
  rep.exit_status = r.trace.outcome == Outcome::converged ? 0 : r.trace.outcome == Outcome::bump_separation ? 4 : 3;
  return rep;
}

CrossingOptions crossing_options(const RunConfig& c, int workers) {
  CrossingOptions co;
  co.width = c.crossing_width;
  co.solver = solver_config(c, workers);
  return co;
}

RunReport run_branch(const RunConfig& c, const fs::path& dir, int workers) {
  BranchStore store(dir / "branches");
  ContinuationOptions opts;
  opts.dgamma = c.gamma_step;
  opts.solver = solver_config(c, workers);
  opts.snapshots = store.sink("branch");
  const Branch b = continue_branch(seed_of(c, c.gamma_min), c.gamma_max, opts);
  store.write_manifest("branch", b);

  Csv csv(dir / "ratio.csv", c, "branch label, gamma, ratio R, bound states, fixed-point iterations, snapshot file");
  csv.header("label,gamma,ratio,bound_states,iterations,snapshot");
  write_branch_rows(csv, b);

  const std::optional<Crossing> crossing =
      b.points.size() >= 2 ? find_crossing(b, crossing_options(c, workers)) : std::nullopt;
  const json cj = crossing_json(crossing);
  {
    std::ofstream os(dir / "crossing.json");
    os << cj.dump(2) << '\n';
  }
  RunReport rep;
  rep.summary = {{"mode", "branch"},
                 {"config", to_json(c)},
                 {"branch", branch_json(b)},
                 {"crossing", cj},
                 {"files", {"ratio.csv", "crossing.json", "branches/branch/manifest.json"}}};
  rep.exit_status = b.termination.empty() ? 0 : 3;
  return rep;
}

RunReport run_envelope(const RunConfig& c, const fs::path& dir, int workers) {
  const Grid grid = grid_of(c);
  const FixedPointSolver seeder(grid, c.d, solver_config(c, 1));

  // One converged seed per distinct bound-state count, in library order.
  std::vector<std::pair<int, PotentialField>> seeds;
  json seed_log = json::array();
  for (double w : c.seed.library) {
    json entry = {{"width", w}};
    try {
      const FixedPointResult r = seeder.run(gaussian_potential(grid, c.d, c.gamma_min, w, c.seed.amplitude));
      entry["outcome"] = outcome_name(r.trace.outcome);
      entry["bound_states"] = r.evaluation.bound_states;
      const bool fresh = std::none_of(seeds.begin(), seeds.end(),
                                      [&](const auto& s) { return s.first == r.evaluation.bound_states; });
      entry["kept"] = r.trace.outcome == Outcome::converged && fresh;
      if (entry["kept"]) seeds.emplace_back(r.evaluation.bound_states, r.potential);
    } catch (const Error& e) {
      entry["error"] = e.what();
      entry["kept"] = false;
    }
    seed_log.push_back(entry);
  }
  require(!seeds.empty(), ErrorCode::no_convergence, "no seed of the library converged");

  BranchStore store(dir / "branches");
  std::vector<std::string> ids;
  for (const auto& s : seeds) ids.push_back("k" + std::to_string(s.first));
  auto follow = [&](std::size_t i) {
    ContinuationOptions opts;
    opts.dgamma = c.gamma_step;
    opts.solver = solver_config(c, 1);
    opts.snapshots = store.sink(ids[i]);
    Branch b = continue_branch(seeds[i].second, c.gamma_max, opts);
    store.write_manifest(ids[i], b);
    return b;
  };
  std::vector<Branch> branches(seeds.size());
  for (std::size_t start = 0; start < seeds.size(); start += workers) {
    std::vector<std::future<Branch>> jobs;
    for (std::size_t i = start; i < std::min(seeds.size(), start + workers); ++i)
      jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, follow, i));
    for (std::size_t i = 0; i < jobs.size(); ++i) branches[start + i] = jobs[i].get();
  }

  std::vector<double> gammas;
  const int steps = static_cast<int>(std::floor((c.gamma_max - c.gamma_min) / c.gamma_step + 1e-9));
  for (int i = 0; i <= steps; ++i) gammas.push_back(c.gamma_min + i * c.gamma_step);
  if (gammas.back() < c.gamma_max - 1e-12) gammas.push_back(c.gamma_max);
  const std::vector<EnvelopePoint> env = upper_envelope(branches, gammas);

  Csv ecsv(dir / "envelope.csv", c, "gamma, largest of 1 and the branch ratios found (a lower bound), arg max label");
  ecsv.header("gamma,best_ratio,best_label");
  for (const auto& e : env) ecsv.row(e.gamma, e.best_ratio, e.best_label);
  Csv bcsv(dir / "branches.csv", c, "branch label, gamma, ratio R, bound states, fixed-point iterations, snapshot file");
  bcsv.header("label,gamma,ratio,bound_states,iterations,snapshot");
  json bj = json::array(), crossings = json::array();
  for (const auto& b : branches) {
    write_branch_rows(bcsv, b);
    bj.push_back(branch_json(b));
    std::optional<Crossing> cr;
    if (b.points.size() >= 2) {
      try {
        cr = find_crossing(b, crossing_options(c, 1));
      } catch (const Error& e) {
        crossings.push_back({{"branch_label", b.label}, {"error", e.what()}});
        continue;
      }
    }
    json cj = crossing_json(cr);
    cj["branch_label"] = b.label;
    crossings.push_back(cj);
  }
  RunReport rep;
  rep.summary = {{"mode", "envelope"},
                 {"config", to_json(c)},
                 {"note", "the envelope is a lower bound: other critical points may lie above the branches found"},
                 {"seeds", seed_log},
                 {"branches", bj},
                 {"crossings", crossings},
                 {"files", {"envelope.csv", "branches.csv"}}};
  return rep;
}

RunReport run_convergence(const RunConfig& c, const fs::path& dir) {
  ConvergenceOptions opts;
  opts.L = c.L;
  const ConvergenceStudy s = convergence_study(opts);
  Csv mesh(dir / "convergence_mesh.csv", c,
           "elements N, mesh size h, computed eigenvalue, |lambda_h + 1|, H1 error of the eigenvector");
  mesh.header("N,h,lambda,eigenvalue_error,h1_error");
  for (const auto& r : s.mesh) mesh.row(r.elements, r.h, r.lambda, r.eigenvalue_error, r.h1_error);
  Csv dom(dir / "convergence_domain.csv", c,
          "half-width L, elements N, computed eigenvalue, H1 distance to the large-domain solution, H1 error to "
          "the exact eigenvector");
  dom.header("L,N,lambda,truncation_error,exact_error");
  for (const auto& r : s.domain) dom.row(r.L, r.elements, r.lambda, r.truncation_error, r.exact_error);
  RunReport rep;
  rep.summary = {{"mode", "convergence_study"},
                 {"config", to_json(c)},
                 {"eigenvalue_slope", s.eigenvalue_slope},
                 {"h1_slope", s.h1_slope},
                 {"decay_rate", s.decay_rate},
                 {"expected_decay_rate", s.expected_decay_rate},
                 {"reference_L", s.reference_L},
                 {"plateau_level", s.plateau_level},
                 {"plateau_onset", s.plateau_onset},
                 {"files", {"convergence_mesh.csv", "convergence_domain.csv"}}};
  return rep;
}

RunReport run_separation(const RunConfig& c, const fs::path& dir) {
  SeparationOptions opts;
  opts.gamma = c.gamma;
  opts.elements = c.N;
  opts.L = c.L;
  opts.width = c.seed.width;
  opts.separation = c.seed.separation;
  opts.iterations = c.max_iters;
  std::optional<PotentialField> seed;
  if (!c.seed.snapshot.empty()) seed = seed_of(c, c.gamma);
  const SeparationStudy s = separation_study(opts, seed ? &*seed : nullptr);

  Csv csv(dir / "separation.csv", c, "iteration n, distance between the outermost wells, wells found, bound states");
  csv.header("iter,distance,bumps,bound_states");
  for (const auto& x : s.samples) csv.row(x.iter, x.distance, x.bumps, x.bound_states);
  json spacing = json::array();
  for (const auto& [n, d] : s.decade_spacing) spacing.push_back({{"n", n}, {"distance_gain_over_decade", d}});
  RunReport rep;
  rep.summary = {{"mode", "separation_study"},
                 {"config", to_json(c)},
                 {"outcome", outcome_name(s.outcome)},
                 {"separated", s.separated},
                 {"lambda", s.lambda},
                 {"lambda_single_bump_optimizer", s.lambda_single},
                 {"predicted_rate", s.predicted_rate},
                 {"decade_spacing", spacing},
                 {"files", {"separation.csv"}}};
  if (s.separated) {
    rep.summary["log_fit"] = {{"rate", s.log_fit.rate},
                              {"intercept", s.log_fit.intercept},
                              {"r_squared", s.log_fit.r_squared},
                              {"samples", s.log_fit.samples}};
    if (s.increment_fit)
      rep.summary["increment_fit"] = {{"rate", s.increment_fit->rate},
                                      {"exponent", s.increment_fit->exponent},
                                      {"power", s.increment_fit->power},
                                      {"samples", s.increment_fit->samples}};
  } else {
    rep.summary["note"] = "no separation: the iterate did not split into receding wells";
  }
  return rep;
}

}  // namespace

RunReport run(const RunConfig& config) {
  validate(config);
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::io_error, "cannot create output directory " + dir.string() + ": " + ec.message());
  const int workers = effective_workers(config);

  RunReport rep;
  switch (config.mode) {
    case Mode::solve: rep = run_solve(config, dir, workers); break;
    case Mode::branch: rep = run_branch(config, dir, workers); break;
    case Mode::envelope: rep = run_envelope(config, dir, workers); break;
    case Mode::convergence_study: rep = run_convergence(config, dir); break;
    case Mode::separation_study: rep = run_separation(config, dir); break;
  }
  write_summary(dir, rep.summary);
  return rep;
}

}  // namespace ltopt
