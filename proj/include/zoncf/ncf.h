#ifndef ZONCF_NCF_H_
#define ZONCF_NCF_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "zoncf/estimators.h"
#include "zoncf/oracle.h"

namespace zoncf {

enum class Preset { kTheory, kPractical };
const char* PresetName(Preset preset);

// Negative-curvature finding at a fixed point x0 from function values only.
struct NcfParams {
  double delta = 0.1;  // target curvature
  double p = 0.1;      // failure probability
  double c0 = 1.0;     // online constant
  double c1 = 1.0;     // deterministic constant
  double kappa = 1.0;  // online repetitions: ⌈κ log(1/p)⌉
  Preset preset = Preset::kPractical;

  // Explicit values win over both presets.
  std::optional<double> eta;
  std::optional<std::size_t> iterations;
  std::optional<double> sigma_pert;
  std::optional<double> radius;
  std::optional<std::size_t> probe_samples;

  // Abort once the problem's ledger reaches this total.
  std::optional<std::uint64_t> query_stop;

  void Validate() const;
};

// Practical-preset perturbation floor and escape ratio.
inline constexpr double kPracticalSigmaFloor = 1e-8;
inline constexpr double kPracticalEscapeRatio = 1e4;
// Smallest smoothing used inside the NCF loops.
inline constexpr double kNcfMuFloor = 1e-12;

struct OnlineWeakSchedule {
  double eta = 0.0;
  std::size_t iterations = 0;
  double sigma_pert = 0.0;
  double radius = 0.0;
};

struct DeterministicSchedule {
  std::size_t iterations = 0;
  double sigma_pert = 0.0;
  double radius = 0.0;
};

// Theory: η = δ/(C₀²ℓ²log(100d)), T = C₀²log(100d)/(ηδ),
// σ = η²δ³/((100d)^{3C₀}ρ), r = (100d)^{C₀}σ.
// Practical: same η and T formulas, σ floored at 1e-8·max(1, ||x0||),
// r = 1e4·σ, and T raised so that curvature −δ can grow a typical start
// from σ past r.
OnlineWeakSchedule DeriveOnlineWeak(const NcfParams& params,
                                    const SmoothnessProfile& smoothness,
                                    int dimension, const Vector& x0);

// Theory: T = C₁²log(d/p)√ℓ/√δ, σ = (d/p)^{−2C₁}δ/(T⁴ρ), r = (d/p)^{C₁}σ.
// Practical: as above with the online floors, and T raised like the online
// schedule using the Chebyshev growth rate at curvature −δ.
DeterministicSchedule DeriveDeterministic(const NcfParams& params,
                                          const SmoothnessProfile& smoothness,
                                          int dimension, const Vector& x0);

// ⌈ℓ² log(1/p) / δ²⌉, at least 1.
std::size_t ProbeSampleCount(const NcfParams& params,
                             const SmoothnessProfile& smoothness);
// ⌈κ log(1/p)⌉, at least 1.
std::size_t OnlineRepetitions(const NcfParams& params);

struct NcfOutcome {
  std::optional<Vector> direction;  // unit vector, or empty for Bottom
  std::size_t iterations = 0;       // inner iterations across all attempts
  std::size_t attempts = 0;         // weak calls (online) or 1
  std::size_t probe_components = 0; // components used by Rayleigh probes
  std::uint64_t queries_spent = 0;
  bool aborted = false;             // stopped by query_stop; reads as Bottom

  bool found() const { return direction.has_value(); }
};

// Optional instrumentation for tests.
struct NcfTrace {
  std::vector<double> entry_radii;   // ||x_t − x0|| at each loop entry
  Vector final_displacement;         // last x_{t+1} − x0
  std::size_t escape_iteration = 0;  // t at escape, 0 when none
  std::vector<double> probe_values;  // online: z_j per attempt
};

NcfOutcome NcfOnlineWeak(const BlackBoxProblem& problem, const Vector& x0,
                         const NcfParams& params, Rng& rng,
                         NcfTrace* trace = nullptr);

struct ProbeResult {
  double value = 0.0;
  std::size_t samples = 0;
  std::uint64_t queries_spent = 0;
};

// Averaged (v′)ᵀ𝓗v′/||v′||² over m components drawn with replacement, with
// v′ = δ/(16dρ)·v. When m >= n every component is used once instead.
ProbeResult RayleighProbe(const BlackBoxProblem& problem, const Vector& x0,
                          const Vector& v_unit, const NcfParams& params,
                          Rng& rng);

NcfOutcome NcfOnline(const BlackBoxProblem& problem, const Vector& x0,
                     const NcfParams& params, Rng& rng,
                     NcfTrace* trace = nullptr);

// 𝒯_n(x) by the three-term recurrence.
double ChebyshevScalar(int n, double x);

// Chebyshev-accelerated power iteration on the full objective. Uses every
// component at each step when n > 1.
NcfOutcome NcfDeterministic(const BlackBoxProblem& problem, const Vector& x0,
                            const NcfParams& params, Rng& rng,
                            NcfTrace* trace = nullptr);

}  // namespace zoncf

#endif  // ZONCF_NCF_H_
