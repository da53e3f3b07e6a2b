#ifndef ZONCF_ESTIMATORS_H_
#define ZONCF_ESTIMATORS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "zoncf/oracle.h"

namespace zoncf {

// Component indices of a mini-batch. May contain repeats.
using Batch = std::vector<std::size_t>;

Batch FullBatch(std::size_t n);
Batch SampleWithReplacement(std::size_t n, std::size_t size, Rng& rng);
// Uniform subset; sizes >= n return the full index set.
Batch SampleWithoutReplacement(std::size_t n, std::size_t size, Rng& rng);

// Uniform direction on the unit sphere (normalized standard Gaussian).
Vector SampleUnitSphere(int dimension, Rng& rng);
// Uniform point in the ball of the given radius.
Vector SampleBall(int dimension, double radius, Rng& rng);

// Smallest Hessian-Lipschitz constant used when deriving parameters; ρ = 0
// problems (pure quadratics) would otherwise divide by zero.
inline constexpr double kRhoFloor = 1e-6;
inline double EffectiveRho(double rho) { return rho > kRhoFloor ? rho : kRhoFloor; }

enum class GradVariant { kCoordCentral, kCoordForward, kRandCentral };
const char* GradVariantName(GradVariant v);

struct GradEstimate {
  Vector g;
  GradVariant variant = GradVariant::kCoordCentral;
  double mu = 0.0;
  std::uint64_t queries_spent = 0;
  Batch batch;
};

// Exact query cost of one estimator call.
std::uint64_t GradCost(GradVariant variant, int dimension, std::size_t batch);
inline std::uint64_t HvCost(int dimension, std::size_t batch, bool cached) {
  return static_cast<std::uint64_t>(cached ? 2 : 4) * dimension * batch;
}

// g_j = Σ_{i∈B} [f_i(x + μe_j) − f_i(x − μe_j)] / (2μ|B|). Cost 2d|B|.
GradEstimate CoordGradCentral(const BlackBoxProblem& problem, const Batch& batch,
                              const Vector& x, double mu,
                              Phase phase = Phase::kGradient);

// g_j = Σ_{i∈B} [f_i(x + μe_j) − f_i(x)] / (μ|B|). Cost (d + 1)|B|.
GradEstimate CoordGradForward(const BlackBoxProblem& problem, const Batch& batch,
                              const Vector& x, double mu,
                              Phase phase = Phase::kGradient);

// g = d [f_B(x + μu) − f_B(x − μu)] / (2μ) u with u uniform on the sphere.
// Cost 2|B|.
GradEstimate RandGradCentral(const BlackBoxProblem& problem, const Batch& batch,
                             const Vector& x, double mu, Rng& rng,
                             Phase phase = Phase::kGradient);
// Same estimator along a caller-chosen unit direction.
GradEstimate RandGradCentralAlong(const BlackBoxProblem& problem,
                                  const Batch& batch, const Vector& x, double mu,
                                  const Vector& u,
                                  Phase phase = Phase::kGradient);

// f_B(x0 ± μe_j) for a fixed (x0, μ, B); lets repeated Hessian-vector
// estimates at the same base point and smoothing skip half the queries.
struct HvCache {
  Vector base;
  double mu = 0.0;
  Batch batch;
  Vector plus;   // f_B(x0 + μe_j)
  Vector minus;  // f_B(x0 − μe_j)
};
HvCache MakeHvCache(const BlackBoxProblem& problem, const Batch& batch,
                    const Vector& x0, double mu, Phase phase = Phase::kNcf);

struct HvEstimate {
  Vector hv;
  double mu = 0.0;
  Vector base;
  Vector displacement;
  std::uint64_t queries_spent = 0;
};

// (Hv)_j = [f(x0 + v + μe_j) − f(x0 + v − μe_j) + f(x0 − μe_j) − f(x0 + μe_j)]
//          / (2μ), averaged over the batch. Cost 4d|B|, or 2d|B| with a
// matching cache.
HvEstimate EstimateHessianVector(const BlackBoxProblem& problem,
                                 const Batch& batch, const Vector& x0,
                                 const Vector& v, double mu,
                                 const HvCache* cache = nullptr,
                                 Phase phase = Phase::kNcf);
HvEstimate EstimateHessianVector(const BlackBoxProblem& problem,
                                 std::size_t component, const Vector& x0,
                                 const Vector& v, double mu,
                                 const HvCache* cache = nullptr,
                                 Phase phase = Phase::kNcf);

// ---------------------------------------------------------------------------
// Gradient-norm verification: decides ||∇f(x)|| >= ε/2 (Large) or
// ||∇f(x)|| <= ε (Small) from one coordinate-wise estimate.
// ---------------------------------------------------------------------------
enum class VerifyMode { kDeterministic, kOnline };
enum class GradientVerdict { kLarge, kSmall };

struct VerifyOptions {
  double epsilon = 1e-3;
  VerifyMode mode = VerifyMode::kDeterministic;
  double p = 0.01;                  // failure probability (online)
  std::size_t iterations = 1;       // K in log(2K/p)
  std::optional<double> mu;         // default: largest μ the bound allows
  std::optional<std::size_t> batch_size;  // default: theory size (online)
  bool median_of_means = false;
  std::size_t mom_groups = 0;       // 0: ⌈log(1/p)⌉ groups
};

struct VerifyResult {
  GradientVerdict verdict = GradientVerdict::kLarge;
  double estimated_norm = 0.0;
  double threshold = 0.0;
  double mu = 0.0;
  std::size_t batch_size = 0;
  std::uint64_t queries_spent = 0;
  Vector estimate;
};

// Deterministic: μ <= sqrt(3ε / (2ρ√d)). Online: μ <= sqrt(3ε / (4ρ√d)).
double VerifySmoothing(VerifyMode mode, double epsilon, double rho, int dimension);
// ⌈max(32σ²/ε², 1) · log(2K/p)⌉.
std::size_t OnlineVerifyBatchSize(double sigma, double epsilon,
                                  std::size_t iterations, double p);

VerifyResult VerifyGradientNorm(const BlackBoxProblem& problem, const Vector& x,
                                const VerifyOptions& options, Rng& rng,
                                Phase phase = Phase::kVerification);

}  // namespace zoncf

#endif  // ZONCF_ESTIMATORS_H_
