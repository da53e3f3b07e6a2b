#include "run_context.h"
#include "zoncf/solvers.h"

namespace zoncf {

SolverReport ZoSgdNcf(const BlackBoxProblem& problem, const Vector& x0,
                      const SolverParams& params, Rng& rng) {
  const ResolvedParams r = ResolveSgdNcf(params, problem);
  RunContext ctx(problem, "zo-sgd-ncf", params.run, x0);
  const std::size_t n = problem.component_count();
  const double rho = EffectiveRho(problem.smoothness().rho);

  NcfParams ncf = r.ncf;
  ncf.query_stop = ctx.absolute_stop();
  VerifyOptions check;
  check.epsilon = r.epsilon;
  check.mode = VerifyMode::kOnline;
  check.p = r.p;
  check.iterations = r.iterations;
  check.mu = r.mu_verify;
  check.batch_size = r.verify_batch;

  Vector x = x0;
  for (std::size_t t = 0; t < r.iterations; ++t) {
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, t);
    std::uint64_t mark = ctx.mark();
    const VerifyResult v = VerifyGradientNorm(problem, x, check, rng);
    ctx.last_verdict = v.verdict;
    ctx.Emit(Event::kVerify, x, mark,
             {.iteration = t, .estimate = &v.estimate, .at = &x,
              .batch = v.batch_size, .verdict = v.verdict});

    if (v.verdict == GradientVerdict::kLarge) {
      if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, t);
      mark = ctx.mark();
      const Batch s = SampleWithoutReplacement(n, r.batch, rng);
      const GradEstimate g =
          r.option == GradOption::kCoord
              ? CoordGradCentral(problem, s, x, r.mu_descent)
              : RandGradCentral(problem, s, x, r.mu_descent, rng);
      const Vector at = x;
      x -= r.eta * g.g;
      ctx.Emit(Event::kDescent, x, mark,
               {.iteration = t, .estimate = &g.g, .at = &at, .batch = s.size()});
      continue;
    }

    mark = ctx.mark();
    const NcfOutcome o = NcfOnline(problem, x, ncf, rng);
    if (!o.aborted) ctx.last_ncf_bottom = !o.found();
    ctx.Emit(Event::kNcfCall, x, mark,
             {.iteration = t, .ncf_iterations = o.iterations,
              .ncf_probe_components = o.probe_components, .ncf_found = o.found()});
    if (o.aborted) return ctx.Finish(x, Termination::kQueryBudgetExhausted, t + 1);
    if (!o.found()) return ctx.Finish(x, Termination::kSospCertified, t + 1);

    mark = ctx.mark();
    x = params.greedy_sign
            ? NegativeCurvatureStepGreedy(problem, x, *o.direction, r.delta, rho)
            : NegativeCurvatureStep(x, *o.direction, r.delta, rho, rng);
    ctx.Emit(Event::kNcStep, x, mark, {.iteration = t});
  }
  return ctx.Finish(x, Termination::kIterationCapReached, r.iterations);
}

}  // namespace zoncf
