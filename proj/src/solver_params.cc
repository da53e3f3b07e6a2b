#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zoncf/solvers.h"

namespace zoncf {
namespace {

std::size_t CeilCount(double x) {
  if (!(x < 1e18)) return static_cast<std::size_t>(1e18);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(x)));
}

std::size_t RoundCount(double x) {
  if (!(x < 1e18)) return static_cast<std::size_t>(1e18);
  return static_cast<std::size_t>(std::max(0.0, std::round(x)));
}

// Quantities every resolver starts from.
struct Setting {
  int d = 1;
  std::size_t n = 1;
  double ell = 1.0;
  double rho = 1.0;
  double sigma = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  std::optional<double> delta_f;
};

Setting MakeSetting(const SolverParams& params, const BlackBoxProblem& problem) {
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("solver: epsilon must be > 0");
  if (!(params.p > 0.0 && params.p < 1.0)) {
    throw std::invalid_argument("solver: p must be in (0, 1)");
  }
  if (params.delta && !(*params.delta > 0.0)) {
    throw std::invalid_argument("solver: delta must be > 0");
  }
  if (params.eta && !(*params.eta > 0.0)) {
    throw std::invalid_argument("solver: eta must be > 0");
  }
  const auto& s = problem.smoothness();
  Setting out;
  out.d = problem.dimension();
  out.n = problem.component_count();
  out.ell = s.ell;
  out.rho = EffectiveRho(s.rho);
  out.sigma = s.sigma_var;
  out.eps = params.epsilon;
  out.delta = params.delta.value_or(std::sqrt(out.rho * out.eps));
  out.delta_f = params.delta_f ? params.delta_f : s.delta_f;
  return out;
}

// Explicit cap, then the Δ_f formula (theory) or the number of iterations
// the budget can pay for (practical), then a fixed default.
std::size_t ResolveIterations(const SolverParams& params,
                              std::optional<double> from_delta_f,
                              double min_iteration_cost) {
  if (params.max_iterations) {
    if (*params.max_iterations == 0) {
      throw std::invalid_argument("solver: max_iterations must be > 0");
    }
    return *params.max_iterations;
  }
  std::optional<std::size_t> from_budget;
  if (params.run.query_budget) {
    from_budget = CeilCount(static_cast<double>(*params.run.query_budget) /
                            std::max(1.0, min_iteration_cost));
  }
  if (params.preset == Preset::kTheory) {
    if (from_delta_f) return CeilCount(*from_delta_f);
    if (from_budget) return *from_budget;
  } else {
    if (from_budget) return *from_budget;
    if (from_delta_f) return CeilCount(*from_delta_f);
  }
  return kDefaultIterations;
}

NcfParams NcfFor(const SolverParams& params, double delta, double p) {
  NcfParams ncf = params.ncf;
  ncf.delta = delta;
  ncf.p = p;
  ncf.preset = params.preset;
  return ncf;
}

std::optional<double> GdIterationsFromDeltaF(const Setting& s, GradOption option) {
  if (!s.delta_f) return std::nullopt;
  const double df = *s.delta_f;
  const double descent = option == GradOption::kCoord ? s.ell * df / (s.eps * s.eps)
                                                      : s.d * s.ell * df / (s.eps * s.eps);
  return s.rho * s.rho * df / std::pow(s.delta, 3.0) + descent;
}

double SqrtMu(double eps, double denom) { return std::sqrt(3.0 * eps / denom); }

}  // namespace

const char* GradOptionName(GradOption option) {
  return option == GradOption::kCoord ? "coord" : "rand";
}

ResolvedParams ResolveGdNcf(const SolverParams& params,
                            const BlackBoxProblem& problem) {
  const Setting s = MakeSetting(params, problem);
  const double sqrt_d = std::sqrt(static_cast<double>(s.d));
  ResolvedParams r;
  r.epsilon = s.eps;
  r.delta = s.delta;
  r.p = params.p;
  r.option = params.option;
  r.preset = params.preset;
  r.verify_batch = s.n;
  r.batch = s.n;
  r.mu_verify = params.mu_verify.value_or(SqrtMu(s.eps, 2.0 * s.rho * sqrt_d));
  if (params.option == GradOption::kCoord) {
    r.eta = params.eta.value_or(1.0 / (4.0 * s.ell));
    r.mu_descent = params.mu_descent.value_or(SqrtMu(s.eps, 4.0 * s.rho * sqrt_d));
  } else {
    r.eta = params.eta.value_or(1.0 / (8.0 * s.d * s.ell));
    r.mu_descent = params.mu_descent.value_or(
        std::min(SqrtMu(s.eps, 4.0 * s.rho * s.d), s.eps / (16.0 * sqrt_d * s.ell)));
  }
  r.iterations = ResolveIterations(params, GdIterationsFromDeltaF(s, params.option),
                                   2.0 * s.d * s.n);
  r.ncf = NcfFor(params, s.delta, params.p / static_cast<double>(r.iterations));
  return r;
}

ResolvedParams ResolveSgdNcf(const SolverParams& params,
                             const BlackBoxProblem& problem) {
  const Setting s = MakeSetting(params, problem);
  const double sqrt_d = std::sqrt(static_cast<double>(s.d));
  const double ratio = s.sigma * s.sigma / (s.eps * s.eps);
  ResolvedParams r;
  r.epsilon = s.eps;
  r.delta = s.delta;
  r.p = params.p;
  r.option = params.option;
  r.preset = params.preset;
  r.mu_verify = params.mu_verify.value_or(SqrtMu(s.eps, 2.0 * s.rho * sqrt_d));
  if (params.option == GradOption::kCoord) {
    r.batch = params.batch.value_or(CeilCount(std::max(32.0 * ratio, 1.0)));
    r.eta = params.eta.value_or(1.0 / (4.0 * s.ell));
    r.mu_descent = params.mu_descent.value_or(SqrtMu(s.eps, 4.0 * s.rho * sqrt_d));
  } else {
    r.batch = params.batch.value_or(CeilCount(std::max(8.0 * ratio, 1.0)));
    r.eta = params.eta.value_or(1.0 / (32.0 * s.d * s.ell));
    r.mu_descent = params.mu_descent.value_or(
        std::min(SqrtMu(s.eps, 4.0 * s.rho * s.d), s.eps / (32.0 * sqrt_d * s.ell)));
  }
  r.batch = std::min(r.batch, s.n);
  const double min_verify = std::min<double>(std::max(ratio, 1.0), s.n);
  r.iterations = ResolveIterations(params, GdIterationsFromDeltaF(s, params.option),
                                   2.0 * s.d * min_verify);
  const double log_term =
      std::max(1.0, std::log(2.0 * r.iterations / params.p));
  r.verify_batch = std::min(
      params.verify_batch.value_or(CeilCount(std::max(ratio, 1.0) * log_term)), s.n);
  r.ncf = NcfFor(params, s.delta, params.p / (2.0 * r.iterations));
  return r;
}

ResolvedParams ResolveScsgNcf(const SolverParams& params,
                              const BlackBoxProblem& problem) {
  const Setting s = MakeSetting(params, problem);
  if (!(params.scsg_c > 0.0)) throw std::invalid_argument("scsg: c must be > 0");
  const double sqrt_d = std::sqrt(static_cast<double>(s.d));
  const double ratio = s.sigma * s.sigma / (s.eps * s.eps);
  const bool coord = params.option == GradOption::kCoord;
  ResolvedParams r;
  r.epsilon = s.eps;
  r.delta = s.delta;
  r.p = params.p;
  r.option = params.option;
  r.preset = params.preset;

  const double b_core = (s.eps * s.eps + s.sigma * s.sigma) * std::pow(s.eps, 4.0) *
                        std::pow(s.rho, 6.0) /
                        (std::pow(s.delta, 9.0) * std::pow(s.ell, 3.0));
  r.big_batch = std::min(
      params.big_batch.value_or(CeilCount(std::max((coord ? 480.0 : 1152.0) * ratio, 1.0))),
      s.n);
  r.mini_batch = params.mini_batch.value_or(
      CeilCount(std::max(1.0, coord ? b_core : s.d * b_core)));
  if (r.big_batch == 0 || r.mini_batch == 0) {
    throw std::invalid_argument("scsg: batch sizes must be > 0");
  }
  const double b_eff = coord ? static_cast<double>(r.mini_batch)
                             : static_cast<double>(r.mini_batch) / s.d;
  const double gamma = coord ? 0.25 : 0.125;
  r.eta = params.eta.value_or(gamma * std::pow(b_eff / r.big_batch, 2.0 / 3.0) / s.ell);
  r.mu_verify = params.mu_verify.value_or(SqrtMu(s.eps, 4.0 * s.rho * sqrt_d));
  r.mu_descent = params.mu_descent.value_or(
      coord ? s.eps / (4.0 * std::sqrt(params.scsg_c * s.d) * s.ell)
            : s.eps / (4.0 * std::sqrt(params.scsg_c) * s.d * s.ell));

  std::optional<double> from_df;
  if (s.delta_f) {
    from_df = s.ell * std::cbrt(b_eff) * *s.delta_f /
              (s.eps * s.eps * std::cbrt(static_cast<double>(r.big_batch)));
  }
  const double min_verify = std::min<double>(std::max(ratio, 1.0), s.n);
  r.iterations = ResolveIterations(params, from_df, 2.0 * s.d * min_verify);
  const double log_term = std::max(1.0, std::log(static_cast<double>(r.iterations)));
  r.verify_batch = std::min(
      params.verify_batch.value_or(CeilCount(std::max(ratio, 1.0) * log_term)), s.n);
  r.batch = r.mini_batch;
  r.ncf = NcfFor(params, s.delta, 1.0 / (20.0 * r.iterations));
  return r;
}

namespace {

// Shared SPIDER quantities; K0 and ε̃ are filled in by the callers.
ResolvedParams SpiderCommon(const SolverParams& params, const Setting& s) {
  if (!(params.n0 > 0.0)) throw std::invalid_argument("spider: n0 must be > 0");
  ResolvedParams r;
  r.epsilon = s.eps;
  r.delta = s.delta;
  r.p = params.p;
  r.option = GradOption::kCoord;
  r.preset = params.preset;
  r.n0 = params.n0;
  r.s1 = std::min(params.s1.value_or(CeilCount(16.0 * s.sigma * s.sigma / (s.eps * s.eps))),
                  s.n);
  r.s2 = params.s2.value_or(RoundCount(16.0 * s.sigma / (s.eps * params.n0)));
  if (r.s1 == 0) throw std::invalid_argument("spider: |S1| must be > 0");
  if (r.s2 == 0) {
    throw std::invalid_argument("spider: |S2| rounds to 0; choose a smaller n0");
  }
  r.eta = params.eta.value_or(s.eps / (s.ell * params.n0));
  if (params.q) {
    r.q = *params.q;
  } else if (params.preset == Preset::kTheory) {
    r.q = CeilCount(s.sigma * params.n0 / s.eps);
  } else {
    r.q = std::max<std::size_t>(1, RoundCount(static_cast<double>(r.s1) / r.s2));
  }
  if (r.q == 0) throw std::invalid_argument("spider: q must be > 0");
  return r;
}

double SpiderMu(const SolverParams& params, const Setting& s, const ResolvedParams& r) {
  if (params.mu_descent) return *params.mu_descent;
  const double q = static_cast<double>(r.q);
  return std::pow(s.eps * r.eps_tilde / (8.0 * q * q * s.rho * s.rho * s.d), 0.25);
}

}  // namespace

ResolvedParams ResolveSpiderNcf(const SolverParams& params,
                                const BlackBoxProblem& problem) {
  const Setting s = MakeSetting(params, problem);
  ResolvedParams r = SpiderCommon(params, s);
  // δ/(ρη), which is δℓn₀/(ρε) at the default η.
  r.mini_steps = params.mini_steps.value_or(
      std::max<std::size_t>(1, RoundCount(s.delta / (s.rho * r.eta))));
  if (r.mini_steps == 0) throw std::invalid_argument("spider: mini_steps must be > 0");
  r.mini_step_length = s.delta / s.rho / static_cast<double>(r.mini_steps);

  std::optional<double> from_df;
  if (s.delta_f) {
    const double df = *s.delta_f;
    from_df = 8.0 * (std::floor(std::max(12.0 * s.rho * s.rho * df / std::pow(s.delta, 3.0),
                                         4.0 * s.rho * df / (s.delta * s.eps))) +
                     1.0);
  }
  const double loop_cost = static_cast<double>(r.mini_steps) * 4.0 * s.d * r.s2;
  r.iterations = ResolveIterations(params, from_df, loop_cost);
  const double k0 = static_cast<double>(r.iterations) * r.mini_steps;
  if (params.eps_tilde) {
    r.eps_tilde = *params.eps_tilde;
  } else if (params.preset == Preset::kTheory) {
    r.eps_tilde = 10.0 * s.eps * std::log(128.0 * (k0 + 1.0));
  } else {
    r.eps_tilde = s.eps;
  }
  r.mu_descent = SpiderMu(params, s, r);
  r.ncf = NcfFor(params, s.delta, 1.0 / (16.0 * r.iterations));
  return r;
}

ResolvedParams ResolveSpiderCoord(const SolverParams& params,
                                  const BlackBoxProblem& problem) {
  const Setting s = MakeSetting(params, problem);
  ResolvedParams r = SpiderCommon(params, s);
  const double k0 = std::floor(4.0 * s.ell * params.n0 / (s.eps * s.eps)) + 2.0;
  r.iterations = params.max_iterations.value_or(CeilCount(k0));
  if (params.eps_tilde) {
    r.eps_tilde = *params.eps_tilde;
  } else if (params.preset == Preset::kTheory) {
    r.eps_tilde = 10.0 * s.eps * std::log(4.0 * (k0 + 1.0) / params.p);
  } else {
    r.eps_tilde = s.eps;
  }
  r.mu_descent = SpiderMu(params, s, r);
  r.ncf = NcfFor(params, s.delta, params.p);
  return r;
}

}  // namespace zoncf
