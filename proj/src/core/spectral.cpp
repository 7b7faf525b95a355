// SPDX-License-Identifier: Apache-2.0
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "error.hpp"
#include "functional.hpp"
#include "tridiag.hpp"

namespace ltopt {

namespace {

double m_dot(const SymTridiag& M, std::span<const double> x, std::span<const double> y, std::vector<double>& work) {
  M.multiply(y, work);
  return std::inner_product(x.begin(), x.end(), work.begin(), 0.0);
}

// Certified lower bound: a sigma with no eigenvalue below it.
double lower_bound(const SymTridiag& A, const SymTridiag& M, std::optional<double> shift) {
  if (shift && std::isfinite(*shift) && count_below(A, M, *shift) == 0) return *shift;
  double lo = std::min(-1.0, shift.value_or(-1.0));
  if (!std::isfinite(lo)) lo = -1.0;
  for (int it = 0; it < 2000 && count_below(A, M, lo) > 0; ++it) lo *= 2.0;
  require(count_below(A, M, lo) == 0, ErrorCode::no_convergence, "could not bracket the bottom of the spectrum");
  return lo;
}

void normalize_sign(std::vector<double>& x) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
  if (!x.empty() && x[imax] < 0.0)
    for (double& v : x) v = -v;
}

// Shift-and-invert inverse iteration at an (already accurate) eigenvalue,
// M-orthogonal to the vectors found before it.
EigenPair inverse_iteration(const SymTridiag& A, const SymTridiag& M, double lambda,
                            const std::vector<EigenPair>& previous, double a_norm, int max_iterations, int index,
                            bool* converged = nullptr) {
  const std::size_t n = A.size();
  std::vector<double> x(n), y(n), work(n), ax(n), mx(n);
  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(index));
  std::uniform_real_distribution<double> unit(0.5, 1.5);

  const double tol = 1e-10 * a_norm;
  double sigma = lambda;
  for (int attempt = 0; attempt < 4; ++attempt) {
    ShiftedTridiagLU lu(A, M, sigma);
    for (double& v : x) v = unit(rng);
    bool finite = true, done = false;
    int polish = 2;  // extra sweeps once the residual test passes
    for (int it = 0; it < max_iterations + polish; ++it) {
      M.multiply(x, y);
      lu.solve(y);
      for (int pass = 0; pass < 2; ++pass) {
        for (const EigenPair& p : previous) {
          const double c = m_dot(M, p.vector, y, work);
          for (std::size_t i = 0; i < n; ++i) y[i] -= c * p.vector[i];
        }
      }
      const double norm = std::sqrt(m_dot(M, y, y, work));
      if (!std::isfinite(norm) || norm == 0.0) {
        finite = false;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
      if (it == 0) continue;
      if (done) {
        if (--polish == 0) break;
        continue;
      }
      if (it >= max_iterations) break;
      A.multiply(x, ax);
      M.multiply(x, mx);
      const double rq = std::inner_product(x.begin(), x.end(), ax.begin(), 0.0);
      double res2 = 0.0, x2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = ax[i] - rq * mx[i];
        res2 += r * r;
        x2 += x[i] * x[i];
      }
      if (std::sqrt(res2 / x2) <= tol) done = true;
    }
    if (finite) {
      A.multiply(x, ax);
      EigenPair pair;
      pair.lambda = std::inner_product(x.begin(), x.end(), ax.begin(), 0.0);
      normalize_sign(x);
      pair.vector = std::move(x);
      if (converged) *converged = done;
      return pair;
    }
    sigma = lambda + (attempt + 1) * 1e-10 * std::max(std::abs(lambda), 1e-3 * a_norm);
  }
  fail(ErrorCode::singular_matrix, "shifted system stayed singular near eigenvalue " + std::to_string(lambda));
}

// Sturm counts already computed for one pencil, reused to tighten the
// starting bracket of every later eigenvalue.
class InertiaProbes {
 public:
  InertiaProbes(const SymTridiag& A, const SymTridiag& M) : A_(A), M_(M) {}

  void record(double sigma, int c) { probes_[sigma] = c; }

  int count(double sigma) {
    auto it = probes_.find(sigma);
    if (it != probes_.end()) return it->second;
    const int c = count_below(A_, M_, sigma);
    probes_.emplace(sigma, c);
    return c;
  }

  // Bracket holding eigenvalue j alone, no wider than rel * max(|lo|, |hi|);
  // needs some recorded sigma with count <= j and one with count > j.
  Bracket isolate(int j, double rel) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    int count_lo = 0, count_hi = 0;
    for (const auto& [sigma, c] : probes_) {
      if (c <= j) {
        lo = sigma;
        count_lo = c;
      } else if (sigma < hi) {
        hi = sigma;
        count_hi = c;
      }
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const bool alone = count_lo == j && count_hi == j + 1;
      if (alone && hi - lo <= rel * std::max(std::abs(lo), std::abs(hi))) break;
      const int c = count(mid);
      if (c <= j) {
        lo = mid;
        count_lo = c;
      } else {
        hi = mid;
        count_hi = c;
      }
    }
    return {lo, hi};
  }

 private:
  const SymTridiag& A_;
  const SymTridiag& M_;
  std::map<double, int> probes_;
};

constexpr double kIsolationTolerance = 1e-4;

}  // namespace

NegativeSpectrum negative_eigenpairs(const AssembledOperator& op, const EigenSolveOptions& options) {
  require(options.k_init >= 1 && options.growth >= 2, ErrorCode::invalid_parameter, "bad eigensolver batch sizes");
  const SymTridiag& A = op.stiffness;
  const SymTridiag& M = op.mass;
  const int n = static_cast<int>(op.size());

  NegativeSpectrum out;
  out.a_norm = A.inf_norm();
  out.threshold = -options.zero_threshold * out.a_norm;
  if (n == 0) {
    out.certificate = std::numeric_limits<double>::infinity();
    return out;
  }

  const double lo = lower_bound(A, M, options.shift);
  InertiaProbes probes(A, M);
  probes.record(lo, 0);
  const int below_threshold = probes.count(out.threshold);

  std::vector<Bracket> brackets;
  int k = options.k_init;
  bool certified = false;
  for (;;) {
    for (int j = static_cast<int>(brackets.size()); j < std::min(k, n); ++j) {
      if (j < below_threshold) {
        brackets.push_back(probes.isolate(j, kIsolationTolerance));
        continue;
      }
      // First eigenvalue at or above the threshold: locate it coarsely.
      double hi = out.threshold + std::max(1.0, std::abs(lo));
      for (int it = 0; it < 2000 && probes.count(hi) <= j; ++it) hi = out.threshold + 2.0 * (hi - out.threshold);
      const Bracket b = probes.isolate(j, kIsolationTolerance);
      bool ok = false;
      const EigenPair next = inverse_iteration(A, M, 0.5 * (b.lo + b.hi), {}, out.a_norm,
                                               options.max_inverse_iterations, j, &ok);
      out.certificate = ok && next.lambda >= b.lo && next.lambda <= b.hi ? next.lambda : 0.5 * (b.lo + b.hi);
      certified = true;
      break;
    }
    if (certified) break;
    if (static_cast<int>(brackets.size()) == n) {
      out.certificate = std::numeric_limits<double>::infinity();
      break;
    }
    if (++out.restarts > options.max_restarts)
      fail(ErrorCode::no_convergence, "negative spectrum not certified after " + std::to_string(options.max_restarts) +
                                          " restarts");
    k *= options.growth;
  }
  out.requested_k = k;

  out.pairs.reserve(brackets.size());
  for (std::size_t j = 0; j < brackets.size(); ++j) {
    const Bracket b = brackets[j];
    const int idx = static_cast<int>(j);
    bool ok = false;
    EigenPair pair = inverse_iteration(A, M, 0.5 * (b.lo + b.hi), out.pairs, out.a_norm,
                                       options.max_inverse_iterations, idx, &ok);
    const double slack = 1e-12 * std::max(std::abs(b.lo), std::abs(b.hi));
    if (!ok || !(pair.lambda >= b.lo - slack && pair.lambda <= b.hi + slack)) {
      // Converged onto a neighbour: pin the eigenvalue down fully and retry.
      const double exact = bisect_eigenvalue(A, M, idx, b.lo, b.hi, 0.0);
      pair = inverse_iteration(A, M, exact, out.pairs, out.a_norm, options.max_inverse_iterations, idx);
    }
    out.pairs.push_back(std::move(pair));
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
  return out;
}

int Spectrum::bound_states() const noexcept {
  int total = 0;
  for (const auto& c : channels) total += c.multiplicity * static_cast<int>(c.pairs.size());
  return total;
}

double Spectrum::bottom() const noexcept {
  double b = 0.0;
  for (const auto& c : channels)
    if (!c.pairs.empty()) b = std::min(b, c.pairs.front().lambda);
  return b;
}

double shift_strategy(const Spectrum* previous, double min_potential) {
  if (previous != nullptr && previous->bottom() < 0.0) return 1.05 * previous->bottom();
  return -std::max(0.0, -min_potential);
}

OperatorFamily::OperatorFamily(const Grid& grid, int dim, FormulationPolicy policy)
    : dim_(dim),
      policy_(policy),
      primary_(grid, dim,
               !grid.radial() ? Formulation::line
               : policy == FormulationPolicy::weighted ? Formulation::weighted
                                                       : Formulation::transformed) {
  if (grid.radial() && policy == FormulationPolicy::automatic && dim == 2)
    weighted_.emplace(grid, dim, Formulation::weighted);
  weights_ = nodal_weights(grid, dim);
}

const Discretization& OperatorFamily::discretization(int l) const {
  if (weighted_ && default_radial_formulation(dim_, l) == Formulation::weighted) return *weighted_;
  return primary_;
}

Spectrum OperatorFamily::scan(std::span<const double> potential, const ScanOptions& options,
                              const Spectrum* previous) const {
  require(potential.size() == grid().size(), ErrorCode::mismatched_grid, "potential does not match grid size");
  const double vmin = potential.empty() ? 0.0 : *std::min_element(potential.begin(), potential.end());
  EigenSolveOptions solver = options.solver;
  if (!solver.shift) solver.shift = shift_strategy(previous, vmin);

  auto solve_channel = [&](int l) {
    const Discretization& disc = discretization(l);
    AssembledOperator op = disc.assemble(potential, l);
    NegativeSpectrum neg;
    try {
      neg = negative_eigenpairs(op, solver);
    } catch (const Error& e) {
      throw Error(e.code(), "channel l = " + std::to_string(l) + ": " + e.what());
    }
    ChannelSpectrum c;
    c.l = l;
    c.multiplicity = dim_ == 1 ? 1 : multiplicity(dim_, l);
    c.formulation = op.formulation;
    c.first_free = op.first_free;
    c.pairs = std::move(neg.pairs);
    c.certificate = neg.certificate;
    c.a_norm = neg.a_norm;
    return c;
  };

  Spectrum spec;
  spec.dim = dim_;
  if (!grid().radial()) {
    spec.channels.push_back(solve_channel(0));
    return spec;
  }

  const int workers = std::max(1, options.workers);
  for (int l = 0; l < options.max_channels; l += workers) {
    std::vector<ChannelSpectrum> batch;
    if (workers == 1) {
      batch.push_back(solve_channel(l));
    } else {
      std::vector<std::future<ChannelSpectrum>> jobs;
      for (int w = 0; w < workers && l + w < options.max_channels; ++w)
        jobs.push_back(std::async(std::launch::async, solve_channel, l + w));
      for (auto& job : jobs) batch.push_back(job.get());
    }
    for (auto& c : batch) {
      if (c.pairs.empty()) return spec;
      spec.channels.push_back(std::move(c));
    }
  }
  fail(ErrorCode::no_convergence, "channel scan did not terminate within max_channels");
}

Spectrum scan_radial_spectrum(const PotentialField& V, FormulationPolicy policy, const ScanOptions& options) {
  require(V.grid.radial(), ErrorCode::mismatched_grid, "radial scan requires a radial grid");
  require(V.values.size() == V.grid.size(), ErrorCode::mismatched_grid, "potential does not match grid size");
  return OperatorFamily(V.grid, V.dim, policy).scan(V.values, options);
}

Spectrum scan_line_spectrum(const PotentialField& V, const ScanOptions& options) {
  require(!V.grid.radial(), ErrorCode::mismatched_grid, "line scan requires a full-line grid");
  return OperatorFamily(V.grid, 1).scan(V.values, options);
}

std::vector<double> expand_to_grid(std::span<const double> free_values, std::size_t first_free, std::size_t nodes) {
  std::vector<double> full(nodes, 0.0);
  for (std::size_t i = 0; i < free_values.size() && first_free + i < nodes; ++i) full[first_free + i] = free_values[i];
  return full;
}

}  // namespace ltopt
