#include "zoncf/ncf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zoncf {
namespace {

// Probability mass of |⟨ξ, e⟩| < t/√d for ξ uniform on the sphere is about
// t·√(2/π); dividing by this keeps a start that small rarer than the
// target failure probability.
constexpr double kSmallProjection = 1.2533141373155003;  // √(π/2)

double PracticalSigma(const Vector& x0) {
  return kPracticalSigmaFloor * std::max(1.0, x0.norm());
}

bool BudgetReached(const BlackBoxProblem& problem, const NcfParams& params) {
  return params.query_stop && problem.ledger().total() >= *params.query_stop;
}

std::size_t CeilCount(double x) {
  if (!(x < 1e18)) return static_cast<std::size_t>(1e18);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(x)));
}

}  // namespace

const char* PresetName(Preset preset) {
  return preset == Preset::kTheory ? "theory" : "practical";
}

void NcfParams::Validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("ncf: delta must be > 0");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("ncf: p must be in (0, 1]");
  if (!(c0 > 0.0) || !(c1 > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument("ncf: constants must be positive");
  }
  if ((eta && !(*eta > 0.0)) || (sigma_pert && !(*sigma_pert > 0.0)) ||
      (radius && !(*radius > 0.0)) || (iterations && *iterations == 0) ||
      (probe_samples && *probe_samples == 0)) {
    throw std::invalid_argument("ncf: overrides must be positive");
  }
}

OnlineWeakSchedule DeriveOnlineWeak(const NcfParams& params,
                                    const SmoothnessProfile& s, int dimension,
                                    const Vector& x0) {
  params.Validate();
  const double ell = s.ell, rho = EffectiveRho(s.rho), delta = params.delta;
  const double c0 = params.c0;
  const double base = 100.0 * dimension;
  const double log_base = std::log(base);

  OnlineWeakSchedule out;
  out.eta = params.eta.value_or(delta / (c0 * c0 * ell * ell * log_base));
  const double t_formula = c0 * c0 * log_base / (out.eta * delta);
  const double sigma_formula =
      out.eta * out.eta * delta * delta * delta / (std::pow(base, 3.0 * c0) * rho);

  if (params.preset == Preset::kTheory) {
    out.sigma_pert = params.sigma_pert.value_or(sigma_formula);
    out.radius = params.radius.value_or(std::pow(base, c0) * out.sigma_pert);
    out.iterations = params.iterations.value_or(CeilCount(t_formula));
    return out;
  }
  out.sigma_pert =
      params.sigma_pert.value_or(std::max(sigma_formula, PracticalSigma(x0)));
  out.radius = params.radius.value_or(kPracticalEscapeRatio * out.sigma_pert);
  // Oja growth at curvature −δ is (1 + ηδ) per step; a weak call only has
  // to succeed with probability 2/3.
  const double needed = out.radius / out.sigma_pert * std::sqrt(dimension) *
                        3.0 / kSmallProjection;
  const double t_escape = std::log(needed) / std::log1p(out.eta * delta);
  out.iterations =
      params.iterations.value_or(CeilCount(std::max(t_formula, t_escape)));
  return out;
}

DeterministicSchedule DeriveDeterministic(const NcfParams& params,
                                          const SmoothnessProfile& s,
                                          int dimension, const Vector& x0) {
  params.Validate();
  const double ell = s.ell, rho = EffectiveRho(s.rho), delta = params.delta;
  const double c1 = params.c1;
  const double ratio = dimension / params.p;
  const double t_formula =
      c1 * c1 * std::log(ratio) * std::sqrt(ell) / std::sqrt(delta);

  DeterministicSchedule out;
  if (params.preset == Preset::kTheory) {
    const double t = std::max(1.0, std::ceil(t_formula));
    out.iterations = params.iterations.value_or(CeilCount(t_formula));
    out.sigma_pert = params.sigma_pert.value_or(
        std::pow(ratio, -2.0 * c1) * delta / (std::pow(t, 4.0) * rho));
    out.radius = params.radius.value_or(std::pow(ratio, c1) * out.sigma_pert);
    return out;
  }
  const double t = std::max(1.0, std::ceil(t_formula));
  const double sigma_formula =
      std::pow(ratio, -2.0 * c1) * delta / (std::pow(t, 4.0) * rho);
  out.sigma_pert =
      params.sigma_pert.value_or(std::max(sigma_formula, PracticalSigma(x0)));
  out.radius = params.radius.value_or(kPracticalEscapeRatio * out.sigma_pert);
  // At curvature −δ the iteration map has eigenvalue 1 + δ/(4ℓ), where
  // 𝒯_t grows like cosh(t·acosh(1 + δ/(4ℓ))).
  const double needed = out.radius / out.sigma_pert * std::sqrt(dimension) /
                        (params.p * kSmallProjection);
  const double t_escape = std::acosh(needed) / std::acosh(1.0 + delta / (4.0 * ell));
  out.iterations =
      params.iterations.value_or(CeilCount(std::max(t_formula, t_escape)));
  return out;
}

std::size_t ProbeSampleCount(const NcfParams& params,
                             const SmoothnessProfile& s) {
  if (params.probe_samples) return *params.probe_samples;
  return CeilCount(s.ell * s.ell * std::log(1.0 / params.p) /
                   (params.delta * params.delta));
}

std::size_t OnlineRepetitions(const NcfParams& params) {
  return CeilCount(params.kappa * std::log(1.0 / params.p));
}

NcfOutcome NcfOnlineWeak(const BlackBoxProblem& problem, const Vector& x0,
                         const NcfParams& params, Rng& rng, NcfTrace* trace) {
  const int d = problem.dimension();
  const auto sched = DeriveOnlineWeak(params, problem.smoothness(), d, x0);
  const std::uint64_t start = problem.ledger().total();
  std::uniform_int_distribution<std::size_t> pick(0, problem.component_count() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  NcfOutcome out;
  out.attempts = 1;
  Vector z = sched.sigma_pert * SampleUnitSphere(d, rng);
  // Reservoir of one: after step t it holds z_s for s uniform in [1, t].
  Vector candidate = z;
  for (std::size_t t = 1; t <= sched.iterations; ++t) {
    if (BudgetReached(problem, params)) {
      out.aborted = true;
      break;
    }
    if (trace) trace->entry_radii.push_back(z.norm());
    const std::size_t i = pick(rng);
    if (t > 1 && unit(rng) * static_cast<double>(t) < 1.0) candidate = z;
    const double mu = std::max(z.norm(), kNcfMuFloor);
    const Vector hv = EstimateHessianVector(problem, i, x0, z, mu).hv;
    z -= sched.eta * hv;
    ++out.iterations;
    if (z.norm() >= sched.radius) {
      out.direction = candidate / candidate.norm();
      if (trace) trace->escape_iteration = t;
      break;
    }
  }
  if (trace) trace->final_displacement = z;
  out.queries_spent = problem.ledger().total() - start;
  return out;
}

ProbeResult RayleighProbe(const BlackBoxProblem& problem, const Vector& x0,
                          const Vector& v_unit, const NcfParams& params,
                          Rng& rng) {
  const int d = problem.dimension();
  const std::size_t n = problem.component_count();
  const double scale =
      params.delta / (16.0 * d * EffectiveRho(problem.smoothness().rho));
  const Vector v = scale * v_unit;
  const std::size_t m = ProbeSampleCount(params, problem.smoothness());
  const Batch batch = m >= n ? FullBatch(n) : SampleWithReplacement(n, m, rng);

  const std::uint64_t start = problem.ledger().total();
  const double mu = std::max(v.norm(), kNcfMuFloor);
  const Vector hv = EstimateHessianVector(problem, batch, x0, v, mu).hv;
  ProbeResult out;
  out.value = v.dot(hv) / v.squaredNorm();
  out.samples = batch.size();
  out.queries_spent = problem.ledger().total() - start;
  return out;
}

NcfOutcome NcfOnline(const BlackBoxProblem& problem, const Vector& x0,
                     const NcfParams& params, Rng& rng, NcfTrace* trace) {
  params.Validate();
  const std::uint64_t start = problem.ledger().total();
  const std::size_t reps = OnlineRepetitions(params);
  NcfOutcome out;
  for (std::size_t j = 0; j < reps; ++j) {
    NcfOutcome weak = NcfOnlineWeak(problem, x0, params, rng, trace);
    out.iterations += weak.iterations;
    ++out.attempts;
    if (weak.aborted) {
      out.aborted = true;
      break;
    }
    if (!weak.found()) continue;
    if (BudgetReached(problem, params)) {
      out.aborted = true;
      break;
    }
    const ProbeResult z = RayleighProbe(problem, x0, *weak.direction, params, rng);
    out.probe_components += z.samples;
    if (trace) trace->probe_values.push_back(z.value);
    if (z.value <= -0.75 * params.delta) {
      out.direction = std::move(weak.direction);
      break;
    }
  }
  out.queries_spent = problem.ledger().total() - start;
  return out;
}

double ChebyshevScalar(int n, double x) {
  if (n < 0) throw std::invalid_argument("chebyshev: degree must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

NcfOutcome NcfDeterministic(const BlackBoxProblem& problem, const Vector& x0,
                            const NcfParams& params, Rng& rng, NcfTrace* trace) {
  const int d = problem.dimension();
  const auto& s = problem.smoothness();
  const auto sched = DeriveDeterministic(params, s, d, x0);
  const std::uint64_t start = problem.ledger().total();
  const Batch batch = FullBatch(problem.component_count());
  const double shift = 1.0 - 3.0 * params.delta / (4.0 * s.ell);

  NcfOutcome out;
  out.attempts = 1;
  Vector y_prev = Vector::Zero(d);
  Vector y = sched.sigma_pert * SampleUnitSphere(d, rng);
  Vector disp = y;
  for (std::size_t t = 1; t <= sched.iterations; ++t) {
    if (BudgetReached(problem, params)) {
      out.aborted = true;
      break;
    }
    if (trace) trace->entry_radii.push_back(disp.norm());
    const double mu = std::max(y.norm(), kNcfMuFloor);
    const Vector hv = EstimateHessianVector(problem, batch, x0, y, mu).hv;
    const Vector my = shift * y - hv / s.ell;
    Vector y_next = 2.0 * my - y_prev;
    disp = y_next - my;
    ++out.iterations;
    if (disp.norm() >= sched.radius) {
      out.direction = disp / disp.norm();
      if (trace) trace->escape_iteration = t;
      break;
    }
    y_prev = std::move(y);
    y = std::move(y_next);
  }
  if (trace) trace->final_displacement = disp;
  out.queries_spent = problem.ledger().total() - start;
  return out;
}

}  // namespace zoncf
