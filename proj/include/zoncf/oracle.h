#ifndef ZONCF_ORACLE_H_
#define ZONCF_ORACLE_H_

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Core>

namespace zoncf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All randomness in the library flows through explicitly seeded engines of
// this type; nothing inside a problem evaluation draws random numbers.
using Rng = std::mt19937_64;

// Which part of an algorithm paid for a function query.
enum class Phase : int {
  kGradient = 0,
  kNcf = 1,
  kVerification = 2,
  kSearch = 3,  // baselines: random search, perturbation checks
};
inline constexpr std::size_t kPhaseCount = 4;

const char* PhaseName(Phase phase);

struct LedgerSnapshot {
  std::uint64_t total = 0;
  std::array<std::uint64_t, kPhaseCount> by_phase{};

  std::uint64_t operator[](Phase phase) const {
    return by_phase[static_cast<std::size_t>(phase)];
  }
  friend bool operator==(const LedgerSnapshot&, const LedgerSnapshot&) = default;
};

// Exact count of single-component function evaluations. Thread safe.
class QueryLedger {
 public:
  QueryLedger() = default;
  QueryLedger(const QueryLedger&) = delete;
  QueryLedger& operator=(const QueryLedger&) = delete;

  void Charge(Phase phase, std::uint64_t count = 1);
  std::uint64_t total() const { return total_.load(std::memory_order_relaxed); }
  std::uint64_t phase(Phase phase) const;
  LedgerSnapshot Snapshot() const;
  void Reset();

 private:
  std::atomic<std::uint64_t> total_{0};
  std::array<std::atomic<std::uint64_t>, kPhaseCount> phases_{};
};

// Smoothness constants used to derive algorithm parameters. For the bundled
// test problems these are the values the experiments were tuned with, not
// bounds derived from the construction.
struct SmoothnessProfile {
  double ell = 1.0;        // gradient Lipschitz constant
  double rho = 1.0;        // Hessian Lipschitz constant
  double sigma_var = 0.0;  // bound on E||grad f_i - grad f||^2 is sigma_var^2
  std::optional<double> delta_f;  // initial optimality gap, when known

  void Validate() const;
};

// Test-only analytic derivatives of the full objective. Solvers never touch
// these; they exist so tests and reports can certify results.
struct AnalyticHooks {
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  std::function<Vector(std::size_t, const Vector&)> component_gradient;
};

// Finite-sum objective f = (1/n) sum_i f_i exposed through component
// evaluations only. Every call to Evaluate is charged to the ledger.
class BlackBoxProblem {
 public:
  using ComponentFn = std::function<double(std::size_t, const Vector&)>;

  BlackBoxProblem(std::string name, int dimension, std::size_t components,
                  ComponentFn component, SmoothnessProfile smoothness,
                  AnalyticHooks hooks = {});

  BlackBoxProblem(BlackBoxProblem&&) noexcept = default;
  BlackBoxProblem& operator=(BlackBoxProblem&&) noexcept = default;

  // Same objective, fresh ledger. Instances share immutable problem data.
  BlackBoxProblem Fork() const;

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  std::size_t component_count() const { return components_; }
  bool deterministic() const { return components_ == 1; }
  const SmoothnessProfile& smoothness() const { return smoothness_; }
  void set_smoothness(const SmoothnessProfile& s);

  double Evaluate(std::size_t component, const Vector& x,
                  Phase phase = Phase::kGradient) const;

  // (1/n) sum_i f_i(x); charges n queries.
  double EvaluateFull(const Vector& x, Phase phase = Phase::kGradient) const;

  // Full objective value without touching the ledger. Used for trajectory
  // reporting, never by the algorithms themselves.
  double OracleValue(const Vector& x) const;

  const AnalyticHooks& hooks() const { return hooks_; }
  bool has_gradient() const { return static_cast<bool>(hooks_.gradient); }
  bool has_hessian() const { return static_cast<bool>(hooks_.hessian); }

  QueryLedger& ledger() const { return *ledger_; }

 private:
  std::string name_;
  int dimension_;
  std::size_t components_;
  ComponentFn component_;
  SmoothnessProfile smoothness_;
  AnalyticHooks hooks_;
  std::unique_ptr<QueryLedger> ledger_;
};

}  // namespace zoncf

#endif  // ZONCF_ORACLE_H_
