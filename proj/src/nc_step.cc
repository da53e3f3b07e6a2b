#include <stdexcept>

#include "zoncf/solvers.h"

namespace zoncf {
namespace {

void RequireStep(double delta, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("nc step: rho must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("nc step: delta must be > 0");
}

}  // namespace

Vector NegativeCurvatureStep(const Vector& x, const Vector& v, double delta,
                             double rho, Rng& rng) {
  RequireStep(delta, rho);
  std::bernoulli_distribution coin(0.5);
  const double sign = coin(rng) ? 1.0 : -1.0;
  return x + sign * (delta / rho) * v;
}

Vector NegativeCurvatureStepGreedy(const BlackBoxProblem& problem,
                                   const Vector& x, const Vector& v,
                                   double delta, double rho) {
  RequireStep(delta, rho);
  Vector plus = x + (delta / rho) * v;
  Vector minus = x - (delta / rho) * v;
  const double fp = problem.EvaluateFull(plus, Phase::kNcf);
  const double fm = problem.EvaluateFull(minus, Phase::kNcf);
  return fp <= fm ? plus : minus;
}

}  // namespace zoncf
