#include "zoncf/baselines.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "run_context.h"

namespace zoncf {
namespace {

constexpr std::size_t kBaselineDefaultIterations = 100000;

std::size_t IterationCap(const BaselineParams& params) {
  if (params.max_iterations) {
    if (*params.max_iterations == 0) {
      throw std::invalid_argument("baseline: max_iterations must be > 0");
    }
    return *params.max_iterations;
  }
  // With a budget the run stops on the ledger, not on the count.
  return params.run.query_budget ? static_cast<std::size_t>(-1)
                                 : kBaselineDefaultIterations;
}

void RequirePositive(double value, const char* what) {
  if (!(value > 0.0)) throw std::invalid_argument(std::string("baseline: ") + what + " must be > 0");
}

void CheckCommon(const BaselineParams& params) {
  RequirePositive(params.epsilon, "epsilon");
  if (params.delta) RequirePositive(*params.delta, "delta");
}

Termination Stop(bool exhausted) {
  return exhausted ? Termination::kQueryBudgetExhausted : Termination::kIterationCapReached;
}

}  // namespace

ZpsgdSettings ResolveZpsgd(const BaselineParams& params, const BlackBoxProblem& problem) {
  CheckCommon(params);
  const auto& s = problem.smoothness();
  const int d = problem.dimension();
  ZpsgdSettings out;
  out.eta = params.zpsgd.eta.value_or(1.0 / (2.0 * s.ell));
  out.radius = params.zpsgd.radius.value_or(params.epsilon);
  out.m = params.zpsgd.m.value_or(static_cast<std::size_t>(d));
  out.sigma = params.zpsgd.sigma.value_or(
      std::sqrt(params.epsilon / (EffectiveRho(s.rho) * d)));
  RequirePositive(out.eta, "zpsgd eta");
  RequirePositive(out.sigma, "zpsgd sigma");
  if (out.radius < 0.0) throw std::invalid_argument("baseline: zpsgd radius must be >= 0");
  if (out.m == 0) throw std::invalid_argument("baseline: zpsgd m must be >= 1");
  return out;
}

ZpsgdStepResult ZpsgdStep(const BlackBoxProblem& problem, const Vector& x,
                          const ZpsgdSettings& settings, Rng& rng) {
  const int d = problem.dimension();
  std::normal_distribution<double> normal(0.0, settings.sigma);
  const double fx = problem.EvaluateFull(x);
  ZpsgdStepResult out;
  out.g = Vector::Zero(d);
  Vector z(d);
  for (std::size_t i = 0; i < settings.m; ++i) {
    for (int j = 0; j < d; ++j) z[j] = normal(rng);
    out.g += (problem.EvaluateFull(x + z) - fx) * z;
  }
  out.g /= static_cast<double>(settings.m) * settings.sigma * settings.sigma;
  out.xi = SampleBall(d, settings.radius, rng);
  out.x = x - settings.eta * (out.g + out.xi);
  return out;
}

SolverReport ZpsgdRun(const BlackBoxProblem& problem, const Vector& x0,
                      const BaselineParams& params, Rng& rng) {
  const ZpsgdSettings z = ResolveZpsgd(params, problem);
  const std::size_t cap = IterationCap(params);
  RunContext ctx(problem, "zpsgd", params.run, x0);
  Vector x = x0;
  for (std::size_t t = 0; t < cap; ++t) {
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, t);
    const std::uint64_t mark = ctx.mark();
    const Vector at = x;
    ZpsgdStepResult step = ZpsgdStep(problem, x, z, rng);
    x = std::move(step.x);
    ctx.Emit(Event::kDescent, x, mark,
             {.iteration = t, .estimate = &step.g, .at = &at, .batch = z.m});
  }
  return ctx.Finish(x, Stop(false), cap);
}

PagdSettings ResolvePagd(const BaselineParams& params, const BlackBoxProblem& problem) {
  CheckCommon(params);
  const PagdParams& p = params.pagd;
  RequirePositive(p.c, "pagd c");
  RequirePositive(p.c_h, "pagd c_h");
  const auto& s = problem.smoothness();
  const double d = problem.dimension();
  const double ell = s.ell;
  const double rho = EffectiveRho(s.rho);
  const double eps = params.epsilon;
  const double delta = params.delta.value_or(std::sqrt(rho * eps));
  const std::optional<double> delta_f = params.delta_f ? params.delta_f : s.delta_f;

  PagdSettings out;
  out.c_h = p.c_h;
  if (p.chi) {
    out.chi = *p.chi;
  } else if (delta_f && *delta_f > 0.0) {
    out.chi = 3.0 * std::max(std::log(d * ell * *delta_f / (p.c * eps * eps * delta)), 4.0);
  } else {
    out.chi = 12.0;
  }
  RequirePositive(out.chi, "pagd chi");
  const double chi2 = out.chi * out.chi;
  const double sqrt_c = std::sqrt(p.c);
  out.eta = p.eta.value_or(p.c / ell);
  out.radius = p.radius.value_or(sqrt_c / chi2 * eps / ell);
  out.g_thres = p.g_thres.value_or(sqrt_c / chi2 * eps);
  out.f_thres = p.f_thres.value_or(p.c / (chi2 * out.chi) * std::sqrt(eps * eps * eps / rho));
  out.t_thres = p.t_thres.value_or(static_cast<std::size_t>(
      std::ceil(out.chi / (p.c * p.c) * ell / std::sqrt(rho * eps))));
  out.s = sqrt_c / out.chi * std::sqrt(rho * eps) / rho;
  out.h_low = std::min(out.g_thres, out.radius * rho * delta * out.s / (2.0 * std::sqrt(d))) /
              p.c_h;
  RequirePositive(out.eta, "pagd eta");
  RequirePositive(out.radius, "pagd r");
  RequirePositive(out.g_thres, "pagd g_thres");
  RequirePositive(out.h_low, "pagd h_low");
  return out;
}

GradEstimate PagdGradient(const BlackBoxProblem& problem, const Vector& x,
                          double accuracy) {
  const double ell = problem.smoothness().ell;
  const double mu = 2.0 * accuracy / (ell * std::sqrt(static_cast<double>(problem.dimension())));
  return CoordGradForward(problem, FullBatch(problem.component_count()), x, mu);
}

Vector EscapeSaddle(const BlackBoxProblem& problem, const Vector& x_hat,
                    const PagdSettings& settings, Rng& rng,
                    std::optional<std::uint64_t> query_stop, EscapeStats* stats) {
  EscapeStats local;
  EscapeStats& st = stats ? *stats : local;
  st = {};
  const double f_hat = problem.EvaluateFull(x_hat, Phase::kSearch);
  Vector x = x_hat + SampleBall(problem.dimension(), settings.radius, rng);
  for (std::size_t i = 0; i <= settings.t_thres; ++i) {
    ++st.evaluations;
    if (f_hat - problem.EvaluateFull(x, Phase::kSearch) >= settings.f_thres) return x;
    if (query_stop && problem.ledger().total() >= *query_stop) return x;
    x -= settings.eta * PagdGradient(problem, x, settings.h_low).g;
    ++st.gradient_steps;
  }
  return x_hat;
}

SolverReport PagdRun(const BlackBoxProblem& problem, const Vector& x0,
                     const BaselineParams& params, Rng& rng) {
  const PagdSettings s = ResolvePagd(params, problem);
  const std::size_t cap = IterationCap(params);
  RunContext ctx(problem, "pagd", params.run, x0);
  const double accuracy = s.g_thres / (4.0 * s.c_h);
  Vector x = x0;
  for (std::size_t t = 0; t < cap; ++t) {
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, t);
    std::uint64_t mark = ctx.mark();
    const GradEstimate z = PagdGradient(problem, x, accuracy);
    if (z.g.norm() >= 0.75 * s.g_thres) {
      const Vector at = x;
      x -= s.eta * z.g;
      ctx.last_verdict = GradientVerdict::kLarge;
      ctx.Emit(Event::kDescent, x, mark,
               {.iteration = t, .estimate = &z.g, .at = &at,
                .verdict = GradientVerdict::kLarge});
      continue;
    }
    ctx.last_verdict = GradientVerdict::kSmall;
    ctx.Emit(Event::kVerify, x, mark,
             {.iteration = t, .estimate = &z.g, .at = &x,
              .verdict = GradientVerdict::kSmall});
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, t + 1);
    mark = ctx.mark();
    EscapeStats escape;
    Vector next = EscapeSaddle(problem, x, s, rng, ctx.absolute_stop(), &escape);
    const bool stayed = next == x;
    x = std::move(next);
    ctx.Emit(Event::kPerturb, x, mark,
             {.iteration = t, .inner_steps = escape.gradient_steps,
              .ncf_iterations = escape.evaluations});
    if (stayed) {
      ctx.last_ncf_bottom = true;
      return ctx.Finish(x, Termination::kSospCertified, t + 1);
    }
  }
  return ctx.Finish(x, Stop(false), cap);
}

Vector Dfpi(const BlackBoxProblem& problem, const Vector& x,
            const DfpiParams& params, Rng& rng,
            std::optional<std::uint64_t> query_stop, std::size_t* iterations_run) {
  if (params.iterations == 0) throw std::invalid_argument("dfpi: iterations must be >= 1");
  RequirePositive(params.c, "dfpi c");
  RequirePositive(params.r, "dfpi r");
  const double eta = params.eta.value_or(1.0 / problem.smoothness().ell);
  RequirePositive(eta, "dfpi eta");
  const Batch full = FullBatch(problem.component_count());
  Vector s = SampleUnitSphere(problem.dimension(), rng);
  if (iterations_run) *iterations_run = 0;
  for (std::size_t t = 0; t < params.iterations; ++t) {
    if (query_stop && problem.ledger().total() >= *query_stop) break;
    const Vector gp = CoordGradCentral(problem, full, x + params.r * s, params.c, Phase::kNcf).g;
    const Vector gm = CoordGradCentral(problem, full, x - params.r * s, params.c, Phase::kNcf).g;
    s -= eta * (gp - gm) / (2.0 * params.r);
    const double norm = s.norm();
    if (!(norm > 0.0)) s = SampleUnitSphere(problem.dimension(), rng);
    else s /= norm;
    if (iterations_run) ++*iterations_run;
  }
  return s;
}

namespace {

// Moves to the better of x ± σs when it beats the incumbent strictly.
void TripletMove(const BlackBoxProblem& problem, Vector& x, double& fx,
                 const Vector& s, double sigma) {
  const Vector plus = x + sigma * s;
  const Vector minus = x - sigma * s;
  const double fp = problem.EvaluateFull(plus, Phase::kSearch);
  const double fm = problem.EvaluateFull(minus, Phase::kSearch);
  if (fp < fx && fp <= fm) {
    x = plus;
    fx = fp;
  } else if (fm < fx) {
    x = minus;
    fx = fm;
  }
}

}  // namespace

SolverReport RspiRun(const BlackBoxProblem& problem, const Vector& x0,
                     const BaselineParams& params, Rng& rng) {
  CheckCommon(params);
  RspiParams r = params.rspi;
  RequirePositive(r.sigma1, "rspi sigma1");
  RequirePositive(r.sigma2, "rspi sigma2");
  RequirePositive(r.sigma1_decay, "rspi sigma1 decay");
  if (r.sigma1_period == 0) throw std::invalid_argument("baseline: rspi period must be >= 1");
  const std::size_t cap = IterationCap(params);
  RunContext ctx(problem, "rspi", params.run, x0);

  Vector x = x0;
  std::uint64_t mark = ctx.mark();
  double fx = problem.EvaluateFull(x, Phase::kSearch);
  ctx.Emit(Event::kSearch, x, mark);
  double sigma1 = r.sigma1;
  for (std::size_t k = 0; k < cap; ++k) {
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, k);
    mark = ctx.mark();
    const Vector xk = x;
    TripletMove(problem, x, fx, SampleUnitSphere(problem.dimension(), rng), sigma1);
    ctx.Emit(Event::kSearch, x, mark, {.iteration = k});

    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, k);
    mark = ctx.mark();
    std::size_t dfpi_iterations = 0;
    const Vector s2 = Dfpi(problem, xk, r.dfpi, rng, ctx.absolute_stop(), &dfpi_iterations);
    ctx.Emit(Event::kNcfCall, x, mark, {.iteration = k, .ncf_iterations = dfpi_iterations});

    mark = ctx.mark();
    TripletMove(problem, x, fx, s2, r.sigma2);
    ctx.Emit(Event::kSearch, x, mark, {.iteration = k});
    if ((k + 1) % r.sigma1_period == 0) sigma1 *= r.sigma1_decay;
  }
  return ctx.Finish(x, Stop(false), cap);
}

}  // namespace zoncf
