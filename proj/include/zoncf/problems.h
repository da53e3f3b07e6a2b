#ifndef ZONCF_PROBLEMS_H_
#define ZONCF_PROBLEMS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "zoncf/libsvm.h"
#include "zoncf/oracle.h"

namespace zoncf {

// ---------------------------------------------------------------------------
// Octopus function of Du et al. (2017). 2^d local minima at (±4τ, ..., ±4τ)
// and 2^d - 1 saddles; the origin is the saddle farthest from every minimum.
// ---------------------------------------------------------------------------
struct OctopusParams {
  int dimension = 10;
  double tau = 2.718281828459045;
  double L = 2.718281828459045;
  double gamma = 1.0;
};

// Offset ν between consecutive zones, −g1(2τ) + 4Lτ².
double OctopusNu(const OctopusParams& params);
// Value at every local minimum, −d·ν.
double OctopusMinimumValue(const OctopusParams& params);

BlackBoxProblem MakeOctopus(const OctopusParams& params);
BlackBoxProblem MakeOctopus(int dimension, double tau, double L, double gamma);

// ---------------------------------------------------------------------------
// Cubic regularization: f(w) = ½ wᵀAw + bᵀw + (α/3)||w||³.
// ---------------------------------------------------------------------------
BlackBoxProblem MakeCubicReg(const Matrix& A, const Vector& b, double alpha);

// Diagonal A with round(0.1·d) randomly chosen entries equal to -1 and the
// rest uniform in [1, 2]; b = 0.
Vector SampleCubicDiagonal(int dimension, Rng& rng);
BlackBoxProblem SampleCubicRegDeterministic(int dimension, std::uint64_t seed,
                                            double alpha);

// Finite-sum cubic problem. Component i uses A' + diag(ξ_i) and b_i = ξ'_i with
// ξ_i ~ U[-0.1, 0.1]^d and ξ'_i ~ U[-1, 1]^d, so the component mean is the
// deterministic instance returned by CubicStochasticMean.
struct CubicStochasticInstance {
  Vector base_diagonal;        // A'
  Matrix diagonal_noise;       // n × d, row i is ξ_i
  Matrix linear_noise;         // n × d, row i is ξ'_i
  double alpha = 0.5;
  // Radius of the ball on which sigma_var bounds the component variance.
  double variance_radius = 4.0;
};

inline constexpr std::size_t kDefaultStochasticComponents = 256;

CubicStochasticInstance SampleCubicStochasticInstance(
    int dimension, std::uint64_t seed, double alpha,
    std::size_t components = kDefaultStochasticComponents);
BlackBoxProblem MakeCubicRegStochastic(const CubicStochasticInstance& instance);
BlackBoxProblem SampleCubicRegStochastic(
    int dimension, std::uint64_t seed, double alpha,
    std::size_t components = kDefaultStochasticComponents);

// (A, b) of the deterministic problem the stochastic instance averages to.
std::pair<Matrix, Vector> CubicStochasticMean(
    const CubicStochasticInstance& instance);
// Bound σ with E_i ||∇f_i(w) − ∇f(w)||² ≤ σ² for ||w|| ≤ variance_radius.
double CubicStochasticSigma(const CubicStochasticInstance& instance);

// ---------------------------------------------------------------------------
// Regularized non-linear least squares:
//   f_i(w) = (y_i − s(wᵀx_i))² + Σ_j λ w_j² / (1 + α w_j²),  s = logistic.
// The regularizer is replicated in every component.
// ---------------------------------------------------------------------------
BlackBoxProblem MakeRegNls(const LibsvmDataset& data, double lambda,
                           double alpha);

// ---------------------------------------------------------------------------
// Synthetic problems used by tests and the invariant suites.
// ---------------------------------------------------------------------------

// f(x) = ½ xᵀHx + gᵀx + c, n = 1, ρ = 0.
BlackBoxProblem MakeQuadratic(const Matrix& H, const Vector& g, double c = 0.0,
                              double ell = 0.0);

// Finite sum of quadratics f_i(x) = ½ xᵀH_i x + g_iᵀx.
BlackBoxProblem MakeQuadraticSum(std::vector<Matrix> hessians,
                                 std::vector<Vector> linear, double ell = 0.0);

// f(x) = Σ_j x_j³ (ρ = 6 exactly), n = 1.
BlackBoxProblem MakeSumOfCubes(int dimension);

// f(x) = ½ xᵀHx + (κ/6) Σ_j x_j³, a quadratic with a cubic perturbation
// (ρ = κ).
BlackBoxProblem MakePerturbedQuadratic(const Matrix& H, double kappa);

}  // namespace zoncf

#endif  // ZONCF_PROBLEMS_H_
