#ifndef ZONCF_BASELINES_H_
#define ZONCF_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "zoncf/estimators.h"
#include "zoncf/oracle.h"
#include "zoncf/report.h"

namespace zoncf {

// Zeroth-order perturbed stochastic gradient descent with Gaussian smoothing.
struct ZpsgdParams {
  std::optional<double> eta;     // default 1/(2ℓ)
  std::optional<double> radius;  // default ε
  std::optional<std::size_t> m;  // default d
  std::optional<double> sigma;   // default √(ε/(ρd))
};

// Perturbed approximate gradient descent. Unset values follow the
// initialization block with constants c and c_h.
struct PagdParams {
  double c = 1.0;
  double c_h = 1.0;
  std::optional<double> chi;  // 3·max{log(dℓΔ_f/(cε²δ)), 4}; 12 without Δ_f
  std::optional<double> eta;
  std::optional<double> radius;
  std::optional<double> g_thres;
  std::optional<double> f_thres;
  std::optional<std::size_t> t_thres;
};

// Derivative-free power iteration on x ↦ (I − ηH)x.
struct DfpiParams {
  double c = 1e-4;             // coordinate difference
  double r = 1e-2;             // displacement along the current direction
  std::optional<double> eta;   // default 1/ℓ
  std::size_t iterations = 20;
};

// Random search with power iteration.
struct RspiParams {
  double sigma1 = 1.0;
  double sigma2 = 1.25;
  double sigma1_decay = 0.95;
  std::size_t sigma1_period = 20;
  DfpiParams dfpi;
};

struct BaselineParams {
  double epsilon = 1e-2;
  std::optional<double> delta;    // default √(ρε)
  std::optional<double> delta_f;  // overrides the problem's Δ_f
  std::optional<std::size_t> max_iterations;
  ZpsgdParams zpsgd;
  PagdParams pagd;
  RspiParams rspi;
  RunLimits run;
};

struct ZpsgdSettings {
  double eta = 0.0;
  double radius = 0.0;
  std::size_t m = 0;
  double sigma = 0.0;
};
ZpsgdSettings ResolveZpsgd(const BaselineParams& params, const BlackBoxProblem& problem);

struct ZpsgdStepResult {
  Vector x;
  Vector g;   // smoothed gradient estimate
  Vector xi;  // perturbation drawn from the radius-r ball
};
// One step; costs m + 1 full evaluations.
ZpsgdStepResult ZpsgdStep(const BlackBoxProblem& problem, const Vector& x,
                          const ZpsgdSettings& settings, Rng& rng);
SolverReport ZpsgdRun(const BlackBoxProblem& problem, const Vector& x0,
                      const BaselineParams& params, Rng& rng);

struct PagdSettings {
  double chi = 0.0;
  double eta = 0.0;
  double radius = 0.0;
  double g_thres = 0.0;
  double f_thres = 0.0;
  std::size_t t_thres = 0;
  double s = 0.0;
  double h_low = 0.0;
  double c_h = 1.0;
};
PagdSettings ResolvePagd(const BaselineParams& params, const BlackBoxProblem& problem);

// Forward-difference coordinate estimate accurate to `accuracy` in norm for
// an ℓ-smooth objective: μ = 2·accuracy/(ℓ√d). Costs (d + 1) evaluations.
GradEstimate PagdGradient(const BlackBoxProblem& problem, const Vector& x,
                          double accuracy);
struct EscapeStats {
  std::size_t evaluations = 0;     // full evaluations after f(x̂)
  std::size_t gradient_steps = 0;  // each costs d + 1 full evaluations
};
// Returns x̂ itself when no iterate gains f_thres. Stops early, returning
// the current iterate, once the ledger reaches query_stop.
Vector EscapeSaddle(const BlackBoxProblem& problem, const Vector& x_hat,
                    const PagdSettings& settings, Rng& rng,
                    std::optional<std::uint64_t> query_stop = std::nullopt,
                    EscapeStats* stats = nullptr);
// Terminates SOSPCertified when EscapeSaddle returns its input. kPerturb
// events report the escape's gradient steps as inner_steps and its
// evaluations as ncf_iterations.
SolverReport PagdRun(const BlackBoxProblem& problem, const Vector& x0,
                     const BaselineParams& params, Rng& rng);

// Unit direction after `iterations` steps; costs 4d full evaluations each.
// Stops early once the ledger reaches query_stop.
Vector Dfpi(const BlackBoxProblem& problem, const Vector& x,
            const DfpiParams& params, Rng& rng,
            std::optional<std::uint64_t> query_stop = std::nullopt,
            std::size_t* iterations_run = nullptr);
// kNcfCall events report the DFPI iterations run as ncf_iterations.
SolverReport RspiRun(const BlackBoxProblem& problem, const Vector& x0,
                     const BaselineParams& params, Rng& rng);

}  // namespace zoncf

#endif  // ZONCF_BASELINES_H_
