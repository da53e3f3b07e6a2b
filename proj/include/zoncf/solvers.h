#ifndef ZONCF_SOLVERS_H_
#define ZONCF_SOLVERS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "zoncf/estimators.h"
#include "zoncf/ncf.h"
#include "zoncf/oracle.h"
#include "zoncf/report.h"

namespace zoncf {

// Option I descends with the coordinate-wise estimator, Option II with the
// random-direction estimator.
enum class GradOption { kCoord, kRand };
const char* GradOptionName(GradOption option);

// Hyperparameters of the NCF-based solvers. Unset fields are derived from
// the problem's smoothness profile according to the preset; set fields win.
struct SolverParams {
  double epsilon = 1e-2;
  std::optional<double> delta;  // default √(ρε)
  double p = 0.01;
  GradOption option = GradOption::kCoord;
  Preset preset = Preset::kPractical;

  std::optional<double> eta;
  std::optional<std::size_t> max_iterations;  // K (or J for SPIDER-NCF)
  std::optional<double> mu_verify;
  std::optional<double> mu_descent;
  std::optional<double> delta_f;  // overrides the problem's Δ_f

  std::optional<std::size_t> batch;         // |S| of ZO-SGD-NCF
  std::optional<std::size_t> verify_batch;  // |𝓑| of the online check
  std::optional<std::size_t> big_batch;     // SCSG B
  std::optional<std::size_t> mini_batch;    // SCSG b
  double scsg_c = 1.0;                      // constant c in SCSG μ₂

  std::optional<std::size_t> s1;  // SPIDER refresh batch
  std::optional<std::size_t> s2;  // SPIDER correction batch
  std::optional<std::size_t> q;   // SPIDER period
  double n0 = 1.0;
  std::optional<double> eps_tilde;
  std::optional<std::size_t> mini_steps;  // 𝒦

  // Pick the better of x ± (δ/ρ)v by evaluating both (2n extra queries).
  bool greedy_sign = false;

  NcfParams ncf;  // delta, p and preset are filled in by the solver
  RunLimits run;
};

// Every derived quantity of one solver run.
struct ResolvedParams {
  double epsilon = 0.0;
  double delta = 0.0;
  double p = 0.0;
  GradOption option = GradOption::kCoord;
  Preset preset = Preset::kPractical;

  double eta = 0.0;
  std::size_t iterations = 0;  // K, or J for SPIDER-NCF
  double mu_verify = 0.0;
  double mu_descent = 0.0;

  std::size_t batch = 0;
  std::size_t verify_batch = 0;
  std::size_t big_batch = 0;
  std::size_t mini_batch = 0;

  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::size_t q = 0;
  double n0 = 0.0;
  double eps_tilde = 0.0;
  std::size_t mini_steps = 0;
  double mini_step_length = 0.0;

  NcfParams ncf;  // ready to pass to the NCF routines
};

// Used when K cannot be derived from Δ_f or a query budget.
inline constexpr std::size_t kDefaultIterations = 100000;

ResolvedParams ResolveGdNcf(const SolverParams& params, const BlackBoxProblem& problem);
ResolvedParams ResolveSgdNcf(const SolverParams& params, const BlackBoxProblem& problem);
ResolvedParams ResolveScsgNcf(const SolverParams& params, const BlackBoxProblem& problem);
ResolvedParams ResolveSpiderNcf(const SolverParams& params, const BlackBoxProblem& problem);
ResolvedParams ResolveSpiderCoord(const SolverParams& params, const BlackBoxProblem& problem);

// x ± (δ/ρ)v with a uniformly random sign.
Vector NegativeCurvatureStep(const Vector& x, const Vector& v, double delta,
                             double rho, Rng& rng);
// Evaluates both candidates on the full objective and keeps the lower one.
Vector NegativeCurvatureStepGreedy(const BlackBoxProblem& problem,
                                   const Vector& x, const Vector& v,
                                   double delta, double rho);

SolverReport ZoGdNcf(const BlackBoxProblem& problem, const Vector& x0,
                     const SolverParams& params, Rng& rng);
SolverReport ZoSgdNcf(const BlackBoxProblem& problem, const Vector& x0,
                      const SolverParams& params, Rng& rng);

struct EpochStats {
  std::size_t inner_steps = 0;
  std::uint64_t queries = 0;
};
// P(N = k) = (1 − θ)θ^k with θ = B/(B + b) (Option I) or B/(B + b/d)
// (Option II), so E[N] = B/b resp. dB/b.
double EpochContinueProbability(GradOption option, std::size_t big_batch,
                                std::size_t mini_batch, int dimension);
std::size_t SampleEpochLength(double theta, Rng& rng);

// One ZO-SCSG epoch from the anchor; rejects b > B.
Vector ZoScsgEpoch(const BlackBoxProblem& problem, const Vector& anchor,
                   const ResolvedParams& params, Rng& rng,
                   EpochStats* stats = nullptr);
SolverReport ZoScsgNcf(const BlackBoxProblem& problem, const Vector& x0,
                       const SolverParams& params, Rng& rng);

SolverReport ZoSpiderNcf(const BlackBoxProblem& problem, const Vector& x0,
                         const SolverParams& params, Rng& rng);
SolverReport ZoSpiderCoord(const BlackBoxProblem& problem, const Vector& x0,
                           const SolverParams& params, Rng& rng);

}  // namespace zoncf

#endif  // ZONCF_SOLVERS_H_
