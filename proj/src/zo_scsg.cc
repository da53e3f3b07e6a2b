#include <stdexcept>

#include "run_context.h"
#include "zoncf/solvers.h"

namespace zoncf {

double EpochContinueProbability(GradOption option, std::size_t big_batch,
                                std::size_t mini_batch, int dimension) {
  const double B = static_cast<double>(big_batch);
  const double b = option == GradOption::kCoord
                       ? static_cast<double>(mini_batch)
                       : static_cast<double>(mini_batch) / dimension;
  return B / (B + b);
}

std::size_t SampleEpochLength(double theta, Rng& rng) {
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw std::invalid_argument("epoch length: theta must be in [0, 1)");
  }
  std::geometric_distribution<std::size_t> geom(1.0 - theta);
  return geom(rng);
}

Vector ZoScsgEpoch(const BlackBoxProblem& problem, const Vector& anchor,
                   const ResolvedParams& params, Rng& rng, EpochStats* stats) {
  if (params.mini_batch > params.big_batch) {
    throw std::invalid_argument("scsg epoch: mini-batch larger than batch");
  }
  const std::uint64_t start = problem.ledger().total();
  const std::size_t n = problem.component_count();
  const double mu = params.mu_descent;

  const Batch anchor_batch = SampleWithoutReplacement(n, params.big_batch, rng);
  const Vector v = CoordGradCentral(problem, anchor_batch, anchor, mu).g;
  const double theta = EpochContinueProbability(params.option, params.big_batch,
                                                params.mini_batch,
                                                problem.dimension());
  const std::size_t steps = SampleEpochLength(theta, rng);

  Vector x = anchor;
  for (std::size_t k = 1; k <= steps; ++k) {
    const Batch mini = SampleWithoutReplacement(n, params.mini_batch, rng);
    Vector vk;
    if (params.option == GradOption::kCoord) {
      vk = CoordGradCentral(problem, mini, x, mu).g -
           CoordGradCentral(problem, mini, anchor, mu).g + v;
    } else {
      const Vector u = SampleUnitSphere(problem.dimension(), rng);
      vk = RandGradCentralAlong(problem, mini, x, mu, u).g -
           RandGradCentralAlong(problem, mini, anchor, mu, u).g + v;
    }
    x -= params.eta * vk;
  }
  if (stats) {
    stats->inner_steps = steps;
    stats->queries = problem.ledger().total() - start;
  }
  return x;
}

SolverReport ZoScsgNcf(const BlackBoxProblem& problem, const Vector& x0,
                       const SolverParams& params, Rng& rng) {
  const ResolvedParams r = ResolveScsgNcf(params, problem);
  if (r.mini_batch > r.big_batch) {
    SolverParams sgd = params;
    sgd.p = 2.0 / 3.0;
    SolverReport report = ZoSgdNcf(problem, x0, sgd, rng);
    report.algorithm = "zo-scsg-ncf";
    return report;
  }
  RunContext ctx(problem, "zo-scsg-ncf", params.run, x0);
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
      EpochStats stats;
      x = ZoScsgEpoch(problem, x, r, rng, &stats);
      ctx.Emit(Event::kEpoch, x, mark,
               {.iteration = t, .batch = r.mini_batch, .inner_steps = stats.inner_steps});
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
