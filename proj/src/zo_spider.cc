#include "run_context.h"
#include "zoncf/solvers.h"

namespace zoncf {
namespace {

// Running SPIDER estimate v_k of ∇f(x_k).
class SpiderTracker {
 public:
  SpiderTracker(const BlackBoxProblem& problem, const ResolvedParams& r)
      : problem_(problem), r_(r) {}

  // Returns true when step k refreshed from a large batch.
  bool Update(std::size_t k, const Vector& x, Rng& rng) {
    const std::size_t n = problem_.component_count();
    if (k % r_.q == 0) {
      const Batch s1 = SampleWithoutReplacement(n, r_.s1, rng);
      v_ = CoordGradCentral(problem_, s1, x, r_.mu_descent).g;
      batch_ = s1.size();
    } else {
      const Batch s2 = SampleWithReplacement(n, r_.s2, rng);
      v_ = CoordGradCentral(problem_, s2, x, r_.mu_descent).g -
           CoordGradCentral(problem_, s2, prev_, r_.mu_descent).g + v_;
      batch_ = s2.size();
    }
    prev_ = x;
    return k % r_.q == 0;
  }

  const Vector& v() const { return v_; }
  std::size_t batch() const { return batch_; }

 private:
  const BlackBoxProblem& problem_;
  const ResolvedParams& r_;
  Vector v_;
  Vector prev_;
  std::size_t batch_ = 0;
};

}  // namespace

SolverReport ZoSpiderNcf(const BlackBoxProblem& problem, const Vector& x0,
                         const SolverParams& params, Rng& rng) {
  const ResolvedParams r = ResolveSpiderNcf(params, problem);
  RunContext ctx(problem, "zo-spider-ncf", params.run, x0);
  NcfParams ncf = r.ncf;
  ncf.query_stop = ctx.absolute_stop();
  SpiderTracker tracker(problem, r);
  const double rho = EffectiveRho(problem.smoothness().rho);
  std::bernoulli_distribution coin(0.5);

  Vector x = x0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < r.iterations; ++j) {
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, k);
    std::uint64_t mark = ctx.mark();
    const NcfOutcome w1 = NcfOnline(problem, x, ncf, rng);
    if (!w1.aborted) ctx.last_ncf_bottom = !w1.found();

    Vector w2;
    if (w1.found()) {
      double sign = coin(rng) ? 1.0 : -1.0;
      if (params.greedy_sign) {
        const Vector step = (r.delta / rho) * *w1.direction;
        sign = problem.EvaluateFull(x - step, Phase::kNcf) <=
                       problem.EvaluateFull(x + step, Phase::kNcf)
                   ? 1.0
                   : -1.0;
      }
      w2 = sign * r.mini_step_length * *w1.direction;
    }
    // Greedy sign evaluations are charged to the NCF call.
    ctx.Emit(Event::kNcfCall, x, mark,
             {.iteration = k, .ncf_iterations = w1.iterations,
              .ncf_probe_components = w1.probe_components, .ncf_found = w1.found()});
    if (w1.aborted) return ctx.Finish(x, Termination::kQueryBudgetExhausted, k);
    for (std::size_t m = 0; m < r.mini_steps; ++m, ++k) {
      if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, k);
      mark = ctx.mark();
      const bool refresh = tracker.Update(k, x, rng);
      const Vector at = x;
      const Vector& v = tracker.v();
      StepInfo info{.iteration = k, .estimate = &v, .at = &at, .batch = tracker.batch()};
      if (w1.found()) {
        x -= w2;
        ctx.Emit(refresh ? Event::kRefresh : Event::kNcStep, x, mark, info);
        continue;
      }
      const double norm = v.norm();
      if (norm <= 2.0 * r.eps_tilde) {
        ctx.last_verdict = GradientVerdict::kSmall;
        info.verdict = GradientVerdict::kSmall;
        ctx.Emit(refresh ? Event::kRefresh : Event::kVerify, x, mark, info);
        return ctx.Finish(x, Termination::kSospCertified, k + 1);
      }
      ctx.last_verdict = GradientVerdict::kLarge;
      x -= (r.eta / norm) * v;
      ctx.Emit(refresh ? Event::kRefresh : Event::kDescent, x, mark, info);
    }
  }
  return ctx.Finish(x, Termination::kIterationCapReached, k);
}

SolverReport ZoSpiderCoord(const BlackBoxProblem& problem, const Vector& x0,
                           const SolverParams& params, Rng& rng) {
  const ResolvedParams r = ResolveSpiderCoord(params, problem);
  RunContext ctx(problem, "zo-spider-coord", params.run, x0);
  SpiderTracker tracker(problem, r);

  Vector x = x0;
  for (std::size_t k = 0; k < r.iterations; ++k) {
    if (ctx.exhausted()) return ctx.Finish(x, Termination::kQueryBudgetExhausted, k);
    const std::uint64_t mark = ctx.mark();
    const bool refresh = tracker.Update(k, x, rng);
    const Vector at = x;
    const Vector& v = tracker.v();
    StepInfo info{.iteration = k, .estimate = &v, .at = &at, .batch = tracker.batch()};
    const double norm = v.norm();
    if (norm <= 2.0 * r.eps_tilde) {
      ctx.last_verdict = GradientVerdict::kSmall;
      info.verdict = GradientVerdict::kSmall;
      ctx.Emit(refresh ? Event::kRefresh : Event::kVerify, x, mark, info);
      return ctx.Finish(x, Termination::kFirstOrderCertified, k + 1);
    }
    ctx.last_verdict = GradientVerdict::kLarge;
    x -= (r.eta / norm) * v;
    ctx.Emit(refresh ? Event::kRefresh : Event::kDescent, x, mark, info);
  }
  return ctx.Finish(x, Termination::kIterationCapReached, r.iterations);
}

}  // namespace zoncf
