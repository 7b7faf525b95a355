// SPDX-License-Identifier: Apache-2.0
#include "assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace ltopt {

const char* formulation_name(Formulation f) noexcept {
  switch (f) {
    case Formulation::line: return "line";
    case Formulation::transformed: return "transformed";
    case Formulation::weighted: return "weighted";
  }
  return "unknown";
}

double SymTridiag::inf_norm() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i < off.size()) row += std::abs(off[i]);
    best = std::max(best, row);
  }
  return best;
}

void SymTridiag::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < n) s += off[i] * x[i + 1];
    y[i] = s;
  }
}

double transformed_centrifugal(int dim, int l) {
  return l * (l + dim - 2.0) + (dim - 1.0) * (dim - 3.0) / 4.0;
}

Formulation default_radial_formulation(int dim, int l) {
  return dim == 2 && l == 0 ? Formulation::weighted : Formulation::transformed;
}

namespace {

constexpr int kRationalOrder = 12;
constexpr double kMaxPieceRatio = 1.5;

// Integral of g over [a, b] where g may carry a negative power of r; a > 0.
// Geometric splitting keeps every piece's b/a <= 1.5 so the Gauss rule
// converges to rounding.
template <class F>
double integrate_rational(F&& g, double a, double b) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(kMaxPieceRatio))));
  const double ratio = std::pow(b / a, 1.0 / pieces);
  double sum = 0.0, lo = a;
  for (int j = 0; j < pieces; ++j) {
    const double hi = j + 1 == pieces ? b : lo * ratio;
    sum += integrate(g, lo, hi, kRationalOrder);
    lo = hi;
  }
  return sum;
}

}  // namespace

Discretization::Discretization(Grid grid, int dim, Formulation formulation)
    : grid_(std::move(grid)), dim_(dim), formulation_(formulation) {
  validate_grid(grid_);
  require(dim_ >= 1 && dim_ <= 32, ErrorCode::invalid_parameter, "dimension out of range");
  if (formulation_ == Formulation::line) {
    require(!grid_.radial(), ErrorCode::mismatched_grid, "line assembly requires a full-line grid");
    require(dim_ == 1, ErrorCode::invalid_parameter, "line assembly is the d = 1 problem");
  } else {
    require(grid_.radial(), ErrorCode::mismatched_grid, "radial assembly requires a radial grid");
    require(dim_ >= 2, ErrorCode::invalid_parameter, "radial assembly requires d >= 2");
  }

  const bool weighted = formulation_ == Formulation::weighted;
  const int wpow = weighted ? dim_ - 1 : 0;
  // Power of r multiplying chi_a chi_b in the centrifugal integral.
  const int cpow = weighted ? dim_ - 3 : -2;
  const int poly_order = std::max(4, (wpow + 5) / 2 + 1);
  auto weight = [wpow](double r) { return wpow == 0 ? 1.0 : std::pow(r, wpow); };

  elements_.resize(grid_.elements());
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const double a = grid_.nodes[e], b = grid_.nodes[e + 1], h = b - a;
    auto cl = [a, b, h](double r) { return (b - r) / h; };
    auto cr = [a, h](double r) { return (r - a) / h; };
    Element& el = elements_[e];
    el.stiff = integrate(weight, a, b, poly_order) / (h * h);
    el.mass[0] = integrate([&](double r) { return weight(r) * cl(r) * cl(r); }, a, b, poly_order);
    el.mass[1] = integrate([&](double r) { return weight(r) * cl(r) * cr(r); }, a, b, poly_order);
    el.mass[2] = integrate([&](double r) { return weight(r) * cr(r) * cr(r); }, a, b, poly_order);
    for (int i = 0; i < 4; ++i) {
      el.cubic[i] = integrate(
          [&](double r) { return weight(r) * std::pow(cl(r), 3 - i) * std::pow(cr(r), i); }, a, b, poly_order);
    }
    if (formulation_ == Formulation::line) continue;

    auto rpow = [cpow](double r) { return std::pow(r, cpow); };
    if (cpow >= 0) {
      const int order = std::max(4, (cpow + 3) / 2 + 1);
      el.centrifugal[0] = integrate([&](double r) { return rpow(r) * cl(r) * cl(r); }, a, b, order);
      el.centrifugal[1] = integrate([&](double r) { return rpow(r) * cl(r) * cr(r); }, a, b, order);
      el.centrifugal[2] = integrate([&](double r) { return rpow(r) * cr(r) * cr(r); }, a, b, order);
    } else if (a > 0.0) {
      el.centrifugal[0] = integrate_rational([&](double r) { return rpow(r) * cl(r) * cl(r); }, a, b);
      el.centrifugal[1] = integrate_rational([&](double r) { return rpow(r) * cl(r) * cr(r); }, a, b);
      el.centrifugal[2] = integrate_rational([&](double r) { return rpow(r) * cr(r) * cr(r); }, a, b);
    } else {
      // chi_R^2 r^m = r^{m+2} / h^2 is a polynomial for m >= -2.
      el.centrifugal[2] = integrate([&](double r) { return std::pow(r, cpow + 2) / (h * h); }, a, b, 4);
      el.left_singular = true;
    }
  }
}

std::size_t Discretization::first_free(int l) const noexcept {
  if (formulation_ == Formulation::weighted && l == 0) return 0;
  return 1;
}

AssembledOperator Discretization::assemble(std::span<const double> potential, int l) const {
  require(potential.size() == grid_.size(), ErrorCode::mismatched_grid, "potential does not match grid size");
  require(l >= 0, ErrorCode::invalid_parameter, "angular momentum must be nonnegative");
  require(formulation_ != Formulation::line || l == 0, ErrorCode::invalid_parameter, "line operator has no channels");
  if (formulation_ == Formulation::transformed && dim_ == 2 && l == 0)
    fail(ErrorCode::forbidden_combination, "(d = 2, l = 0) must use the weighted formulation");

  double coeff = 0.0;
  if (formulation_ == Formulation::transformed) coeff = transformed_centrifugal(dim_, l);
  if (formulation_ == Formulation::weighted) coeff = l * (l + dim_ - 2.0);

  const std::size_t first = first_free(l);
  if (coeff != 0.0 && first == 0 && !elements_.empty() && elements_.front().left_singular)
    fail(ErrorCode::singular_integral, "centrifugal integral diverges at r = 0 without a Dirichlet condition");

  const std::size_t nodes = grid_.size();
  std::vector<double> ad(nodes, 0.0), ao(nodes - 1, 0.0), md(nodes, 0.0), mo(nodes - 1, 0.0);
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Element& el = elements_[e];
    const double vl = potential[e], vr = potential[e + 1];
    const double pll = vl * el.cubic[0] + vr * el.cubic[1];
    const double plr = vl * el.cubic[1] + vr * el.cubic[2];
    const double prr = vl * el.cubic[2] + vr * el.cubic[3];
    ad[e] += el.stiff + pll + coeff * el.centrifugal[0];
    ad[e + 1] += el.stiff + prr + coeff * el.centrifugal[2];
    ao[e] += -el.stiff + plr + coeff * el.centrifugal[1];
    md[e] += el.mass[0];
    md[e + 1] += el.mass[2];
    mo[e] += el.mass[1];
  }

  AssembledOperator op;
  op.first_free = first;
  op.channel_l = l;
  op.dim_d = dim_;
  op.formulation = formulation_;
  const std::size_t last = nodes - 1;  // Dirichlet at the outer boundary
  const std::size_t n = last - first;
  op.stiffness.diag.assign(ad.begin() + first, ad.begin() + last);
  op.mass.diag.assign(md.begin() + first, md.begin() + last);
  op.stiffness.off.assign(ao.begin() + first, ao.begin() + first + (n - 1));
  op.mass.off.assign(mo.begin() + first, mo.begin() + first + (n - 1));
  return op;
}

void Discretization::accumulate_square_moments(std::span<const double> coeffs, std::size_t first_free,
                                               double scale, std::span<double> out) const {
  const std::size_t nodes = grid_.size();
  auto value = [&](std::size_t g) -> double {
    if (g < first_free || g >= first_free + coeffs.size()) return 0.0;
    return coeffs[g - first_free];
  };
  for (std::size_t e = 0; e + 1 < nodes; ++e) {
    const double fl = value(e), fr = value(e + 1);
    if (fl == 0.0 && fr == 0.0) continue;
    const auto& c = elements_[e].cubic;
    out[e] += scale * (fl * fl * c[0] + 2.0 * fl * fr * c[1] + fr * fr * c[2]);
    out[e + 1] += scale * (fl * fl * c[1] + 2.0 * fl * fr * c[2] + fr * fr * c[3]);
  }
}

namespace {

AssembledOperator assemble_with(const PotentialField& V, Formulation f, int l) {
  require(V.values.size() == V.grid.size(), ErrorCode::mismatched_grid, "potential does not match grid size");
  if (f == Formulation::line) require(!V.grid.radial(), ErrorCode::mismatched_grid, "line assembly on radial grid");
  if (f != Formulation::line) require(V.grid.radial(), ErrorCode::mismatched_grid, "radial assembly on line grid");
  if (f == Formulation::transformed && V.dim == 2 && l == 0)
    fail(ErrorCode::forbidden_combination, "(d = 2, l = 0) must use the weighted formulation");
  return Discretization(V.grid, V.dim, f).assemble(V.values, l);
}

}  // namespace

AssembledOperator assemble_line(const PotentialField& V) { return assemble_with(V, Formulation::line, 0); }

AssembledOperator assemble_radial_transformed(const PotentialField& V, int l) {
  return assemble_with(V, Formulation::transformed, l);
}

AssembledOperator assemble_radial_weighted(const PotentialField& V, int l) {
  return assemble_with(V, Formulation::weighted, l);
}

}  // namespace ltopt
