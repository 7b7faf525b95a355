#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "assembly.hpp"
#include "oracle.hpp"
#include "spectral.hpp"

using namespace ltopt;

namespace {

PotentialField field(const Grid& g, int d, auto&& f) {
  PotentialField V{g, {}, d, 1.0};
  for (double x : g.nodes) V.values.push_back(f(x));
  return V;
}

double m_inner(const SymTridiag& M, const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> My(y.size());
  M.multiply(y, My);
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * My[i];
  return s;
}

}  // namespace

TEST_CASE("free Laplacian has no bound states") {
  Grid g = make_grid(200, 5.0, DomainKind::full_line, 1.0);
  auto op = assemble_line(field(g, 1, [](double) { return 0.0; }));
  auto s = negative_eigenpairs(op);
  CHECK(s.pairs.empty());
  CHECK(s.certificate > 0.0);
  const double pi = 3.14159265358979324;
  CHECK(s.certificate == doctest::Approx(pi * pi / 100).epsilon(1e-3));
}

TEST_CASE("Poschl-Teller -6 sech^2 has eigenvalues -4 and -1") {
  Grid g = make_grid(6000, 25.0, DomainKind::full_line, 1.0);
  auto op = assemble_line(field(g, 1, [](double x) { return -6.0 / (std::cosh(x) * std::cosh(x)); }));
  auto s = negative_eigenpairs(op);
  REQUIRE(s.pairs.size() == 2);
  CHECK(std::abs(s.pairs[0].lambda + 4) < 1e-4);
  CHECK(std::abs(s.pairs[1].lambda + 1) < 1e-4);
  CHECK(s.certificate >= 0);

  const double anorm = op.stiffness.inf_norm();
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& x = s.pairs[i].vector;
    std::vector<double> Ax(x.size()), Mx(x.size());
    op.stiffness.multiply(x, Ax);
    op.mass.multiply(x, Mx);
    double r2 = 0, x2 = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      r2 += std::pow(Ax[k] - s.pairs[i].lambda * Mx[k], 2);
      x2 += x[k] * x[k];
    }
    CHECK(std::sqrt(r2 / x2) <= 1e-9 * anorm);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(m_inner(op.mass, x, s.pairs[j].vector) - (i == j ? 1.0 : 0.0)) <= 1e-8);
  }
}

TEST_CASE("3D oscillator: one bound state, certified") {
  Grid r = make_grid(4000, 12.0, DomainKind::radial_halfline);
  auto op = assemble_radial_transformed(field(r, 3, [](double x) { return x * x - 5; }), 0);
  auto s = negative_eigenpairs(op);
  REQUIRE(s.pairs.size() == 1);
  CHECK(std::abs(s.pairs[0].lambda + 2) < 1e-4);
  CHECK(s.certificate == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("k grows geometrically until the certificate") {
  Grid g = make_grid(300, 10.0, DomainKind::full_line, 1.0);
  auto op = assemble_line(field(g, 1, [](double x) { return std::abs(x) < 8 ? -30.0 : 0.0; }));
  EigenSolveOptions o;
  o.k_init = 1;
  auto s = negative_eigenpairs(op, o);
  auto ref = oracle::negative_part(op);
  REQUIRE(s.pairs.size() == ref.size());
  CHECK(ref.size() > 8);
  CHECK(s.requested_k >= static_cast<int>(ref.size()) + 1);
  CHECK(s.restarts > 0);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(oracle::rel_diff(s.pairs[i].lambda, ref[i]) < 1e-10);
}

TEST_CASE("agrees with the dense oracle on random problems") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const bool radial = trial % 2;
    Grid g = radial ? make_grid(120 + 20 * trial, 6.0, DomainKind::radial_halfline)
                    : make_grid(120 + 20 * trial, 6.0, DomainKind::full_line, 1.0);
    PotentialField V{g, {}, radial ? 3 : 1, 1.0};
    for (std::size_t i = 0; i < g.size(); ++i) V.values.push_back(-10.0 + 12.0 * std::abs(u(rng)));
    auto op = radial ? assemble_radial_transformed(V, trial % 3) : assemble_line(V);
    auto s = negative_eigenpairs(op);
    auto ref = oracle::negative_part(op);
    REQUIRE(s.pairs.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(oracle::rel_diff(s.pairs[i].lambda, ref[i]) < 1e-10);
    auto all = oracle::pencil_eigenvalues(op);
    if (ref.size() < all.size()) CHECK(oracle::rel_diff(s.certificate, all[ref.size()]) < 1e-8);
  }
}

TEST_CASE("shift_strategy") {
  Spectrum prev;
  prev.dim = 1;
  ChannelSpectrum c;
  c.pairs.push_back({-4.0, {}});
  prev.channels.push_back(c);
  CHECK(shift_strategy(&prev, -10.0) == doctest::Approx(-4.2));
  CHECK(shift_strategy(nullptr, -10.0) == -10.0);
  Spectrum empty;
  CHECK(shift_strategy(&empty, -10.0) == -10.0);
}

TEST_CASE("scan_radial_spectrum") {
  Grid r = make_grid(400, 8.0, DomainKind::radial_halfline);
  CHECK(scan_radial_spectrum(field(r, 3, [](double) { return 0.0; })).channels.empty());

  auto well_on = [](const Grid& g) { return field(g, 3, [](double x) { return x < 1 ? -7.5 : 0.0; }); };
  auto coarse = well_on(make_grid(400, 15.0, DomainKind::radial_halfline));
  auto sc = scan_radial_spectrum(coarse);
  REQUIRE(sc.channels.size() == 1);
  auto ref = oracle::negative_part(assemble_radial_transformed(coarse, 0));
  REQUIRE(ref.size() == 1);
  CHECK(oracle::rel_diff(sc.channels[0].pairs[0].lambda, ref[0]) < 1e-10);

  auto well = well_on(make_grid(4000, 15.0, DomainKind::radial_halfline));
  auto s = scan_radial_spectrum(well);
  REQUIRE(s.channels.size() == 1);
  REQUIRE(s.channels[0].pairs.size() == 1);
  // s-wave square well of depth 7.5 and radius 1: k cot k = -kappa
  auto match = [](double lam) { const double k = std::sqrt(7.5 + lam); return k / std::tan(k) + std::sqrt(-lam); };
  double lo = -7.4, hi = -0.1;
  for (int i = 0; i < 100; ++i) (match(0.5 * (lo + hi)) > 0 ? lo : hi) = 0.5 * (lo + hi);
  CHECK(s.channels[0].pairs[0].lambda == doctest::Approx(lo).epsilon(1e-3));
  // the first empty channel is certified but not stored
  auto next = negative_eigenpairs(assemble_radial_transformed(well, 1));
  CHECK(next.pairs.empty());
}

TEST_CASE("channel lowest eigenvalue is nondecreasing in l") {
  Grid r = make_grid(1500, 12.0, DomainKind::radial_halfline);
  for (int d : {2, 3}) {
    auto V = field(r, d, [](double x) { return -40.0 * std::exp(-x * x / 9); });
    auto s = scan_radial_spectrum(V);
    REQUIRE(s.channels.size() >= 3);
    CHECK(s.channels[0].formulation == (d == 2 ? Formulation::weighted : Formulation::transformed));
    for (std::size_t l = 1; l < s.channels.size(); ++l)
      CHECK(s.channels[l].pairs[0].lambda >= s.channels[l - 1].pairs[0].lambda);
    for (const auto& c : s.channels) CHECK(c.multiplicity == (d == 2 ? (c.l == 0 ? 1 : 2) : 2 * c.l + 1));
  }
}

TEST_CASE("concurrent channel solves match the serial scan") {
  Grid r = make_grid(1200, 12.0, DomainKind::radial_halfline);
  auto V = field(r, 3, [](double x) { return -60.0 * std::exp(-x * x / 4); });
  ScanOptions par;
  par.workers = 4;
  auto a = scan_radial_spectrum(V);
  auto b = scan_radial_spectrum(V, FormulationPolicy::automatic, par);
  REQUIRE(a.channels.size() == b.channels.size());
  for (std::size_t l = 0; l < a.channels.size(); ++l) {
    REQUIRE(a.channels[l].pairs.size() == b.channels[l].pairs.size());
    for (std::size_t i = 0; i < a.channels[l].pairs.size(); ++i)
      CHECK(a.channels[l].pairs[i].lambda == b.channels[l].pairs[i].lambda);
  }
}
