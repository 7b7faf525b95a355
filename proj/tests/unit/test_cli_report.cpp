#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "error.hpp"
#include "optimizer.hpp"
#include "run.hpp"
#include "snapshot.hpp"
#include "studies.hpp"

using namespace ltopt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ltopt_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("snapshot round trip is bit identical") {
  Grid r = make_grid(300, 7.3, DomainKind::radial_halfline, 2.0);
  PotentialField V = gaussian_potential(r, 3, 0.88, 1.7);
  V.values[5] = -1.0 / 3.0;
  std::stringstream ss;
  write_snapshot(ss, V);
  PotentialField W = read_snapshot(ss);
  CHECK(W == V);

  Grid line = make_grid(64, 4.0, DomainKind::full_line, 1.0);
  PotentialField U = gaussian_potential(line, 1, 1.2, 0.9);
  const fs::path p = scratch("snap.csv");
  save_snapshot(p, U);
  CHECK(load_snapshot(p) == U);
  CHECK(slurp(p).rfind("# ltopt snapshot", 0) == 0);

  std::stringstream junk("# ltopt snapshot\nnot a header\n");
  CHECK(code_of([&] { read_snapshot(junk); }) == ErrorCode::io_error);
  CHECK(code_of([] { load_snapshot("/nonexistent/file.csv"); }) == ErrorCode::io_error);
}

TEST_CASE("branch store writes manifest and snapshots") {
  const fs::path root = scratch("store");
  BranchStore store(root);
  Branch b;
  b.label = "k=1";
  b.dim = 1;
  Grid g = make_grid(32, 4.0, DomainKind::full_line, 1.0);
  auto sink = store.sink("b0");
  for (double gamma : {1.2, 1.21}) {
    BranchPoint p;
    p.gamma = gamma;
    p.ratio = 1.07;
    p.bound_states = 1;
    p.potential = gaussian_potential(g, 1, gamma, 1.0);
    p.snapshot_ref = sink(b, p);
    b.points.push_back(p);
  }
  store.write_manifest("b0", b);
  const json m = json::parse(slurp(store.branch_dir("b0") / "manifest.json"));
  CHECK(m["label"] == "k=1");
  CHECK(m["gamma"].size() == 2);
  for (const auto& p : b.points) CHECK(load_snapshot(store.branch_dir("b0") / p.snapshot_ref) == p.potential);
}

TEST_CASE("config parsing is strict") {
  RunConfig c = config_from_json(json{{"mode", "branch"}, {"d", 2}, {"gamma_min", 1.16}, {"gamma_max", 1.18}});
  CHECK(c.mode == Mode::branch);
  CHECK(c.d == 2);
  CHECK(c.N == 8000);
  CHECK(config_from_json(to_json(c)).gamma_max == c.gamma_max);
  CHECK(code_of([] { config_from_json(json{{"gama", 1.2}}); }) == ErrorCode::invalid_parameter);
  CHECK(code_of([] { config_from_json(json{{"mode", "plot"}}); }) == ErrorCode::invalid_parameter);
  CHECK(code_of([] { config_from_json(json{{"N", "many"}}); }) == ErrorCode::invalid_parameter);
}

TEST_CASE("validation runs before any compute") {
  RunConfig c;
  c.gamma = 0.4;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::invalid_parameter);
  c.gamma = 1.2;
  CHECK_NOTHROW(validate(c));
  c.N = 4;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::invalid_parameter);

  RunConfig b;
  b.mode = Mode::branch;
  b.gamma_min = 1.0;
  b.gamma_max = 1.2;
  b.gamma_step = 0.1;
  CHECK(code_of([&] { validate(b); }) == ErrorCode::invalid_parameter);
  b.gamma_step = 0.01;
  CHECK_NOTHROW(validate(b));

  RunConfig s;
  s.mode = Mode::separation_study;
  s.d = 2;
  CHECK(code_of([&] { validate(s); }) == ErrorCode::invalid_parameter);

  const fs::path snap = scratch("radial_seed.csv");
  save_snapshot(snap, gaussian_potential(make_grid(32, 4.0, DomainKind::radial_halfline), 3, 1.0, 1.0));
  RunConfig m;
  m.seed.snapshot = snap.string();
  CHECK(code_of([&] { validate(m); }) == ErrorCode::mismatched_grid);
}

TEST_CASE("worker cap from the environment") {
  RunConfig c;
  c.workers = 8;
  setenv("LT_OPTIM_WORKERS", "3", 1);
  CHECK(effective_workers(c) == 3);
  unsetenv("LT_OPTIM_WORKERS");
  CHECK(effective_workers(c) == 8);
}

TEST_CASE("solve mode writes a self-describing bundle") {
  RunConfig c;
  c.N = 2000;
  c.out = scratch("solve").string();
  RunReport rep = run(c);
  CHECK(rep.exit_status == 0);
  CHECK(rep.summary["outcome"] == "converged");
  CHECK(std::abs(rep.summary["ratio"].get<double>() - 2 * std::pow(0.7 / 1.7, 0.7)) < 1e-3);
  CHECK(std::abs(rep.summary["norm_integral"].get<double>() - 1.0) < 1e-12);

  const fs::path out(c.out);
  for (const char* f : {"trace.csv", "potential.csv", "spectrum.csv", "summary.json"}) CHECK(fs::exists(out / f));
  std::istringstream trace(slurp(out / "trace.csv"));
  std::string first, second;
  std::getline(trace, first);
  std::getline(trace, second);
  CHECK(first.rfind("# config: ", 0) == 0);
  CHECK(second.rfind("# columns: ", 0) == 0);
  CHECK(json::parse(first.substr(10)) == to_json(c));

  const std::string before = slurp(out / "trace.csv");
  RunReport again = run(config_from_json(rep.summary["config"]));
  CHECK(slurp(out / "trace.csv") == before);
  CHECK(again.summary["ratio"].get<double>() == rep.summary["ratio"].get<double>());
  CHECK(load_snapshot(out / "potential.csv").values.size() == 2001);
}

TEST_CASE("solve mode reports separation with exit status 4") {
  RunConfig c;
  c.N = 2000;
  c.L = 40;
  c.out = scratch("solve_sep").string();
  const fs::path seed = scratch("two_bumps.csv");
  save_snapshot(seed, two_bump_potential(make_grid(2000, 40.0, DomainKind::full_line, 1.0), 1.2, 1.0, 4.0));
  c.seed.snapshot = seed.string();
  c.max_iters = 2000;
  RunReport rep = run(c);
  CHECK(rep.summary["outcome"] == "bump_separation");
  CHECK(rep.exit_status == 4);
}

TEST_CASE("separation study on a single bump reports no separation") {
  Grid g = make_grid(1000, 30.0, DomainKind::full_line, 1.0);
  PotentialField one = gaussian_potential(g, 1, 1.2, 1.0);
  SeparationOptions o;
  o.iterations = 400;
  auto s = separation_study(o, &one);
  CHECK(!s.separated);
  CHECK(s.outcome != Outcome::bump_separation);
  CHECK(!s.increment_fit.has_value());
  CHECK(s.lambda == doctest::Approx(s.lambda_single).epsilon(1e-6));
}

TEST_CASE("small convergence study") {
  ConvergenceOptions o;
  o.L = 20;
  o.elements = {200, 400, 800, 1600};
  o.h = 0.01;
  o.extents = {2, 3, 4, 5, 6};
  auto s = convergence_study(o);
  CHECK(s.mesh.size() == 4);
  CHECK(s.eigenvalue_slope == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(s.h1_slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(s.decay_rate == doctest::Approx(1.0).epsilon(0.1));
}
