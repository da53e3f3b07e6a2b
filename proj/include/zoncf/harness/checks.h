#ifndef ZONCF_HARNESS_CHECKS_H_
#define ZONCF_HARNESS_CHECKS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zoncf/harness/config.h"
#include "zoncf/report.h"

namespace zoncf::harness {

enum class Relation { kAtMost, kAtLeast };

struct CheckResult {
  std::string suite;
  std::string test;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  Relation relation = Relation::kAtMost;
  std::string inequality;  // the property checked, in words
  std::string note;
};

struct CheckOptions {
  // Runs the coordinate-gradient sweep at 10μ while the bound keeps μ.
  bool corrupt_mu = false;
};

const std::vector<std::string>& SuiteNames();  // estimators, ncf, solvers, baselines

// suite is one of SuiteNames() or "all"; throws std::invalid_argument
// otherwise.
std::vector<CheckResult> RunInvariants(const std::string& suite, const CheckOptions& options = {});

std::string ReportJson(const std::vector<CheckResult>& results);
std::string ReportText(const std::vector<CheckResult>& results);
bool AllPassed(const std::vector<CheckResult>& results);

// Closed-form query cost of one emitted step.
struct CostModel {
  std::string algorithm;
  int dimension = 0;
  std::size_t components = 1;
  GradOption option = GradOption::kCoord;
  bool greedy_sign = false;
  std::size_t big_batch = 0;        // SCSG B
};
CostModel MakeCostModel(const BlackBoxProblem& problem, const ExperimentConfig& config,
                        const AlgorithmSpec& algorithm);
// first_event marks the run's first emitted step (RSPI's initial
// evaluation).
std::uint64_t ExpectedEventCost(const CostModel& model, const StepInfo& step, bool first_event);

struct LedgerAudit {
  SolverReport report;
  std::uint64_t ledger_total = 0;       // queries charged by the run
  std::uint64_t closed_form_total = 0;  // sum of ExpectedEventCost
  std::uint64_t max_event_cost = 0;
  std::size_t events = 0;
  std::size_t mismatched_events = 0;  // closed form differs from the ledger
};
// Runs the algorithm with an observer that prices every step.
LedgerAudit AuditLedger(const BlackBoxProblem& problem, const ExperimentConfig& config,
                        const AlgorithmSpec& algorithm, std::uint64_t seed,
                        const std::optional<Vector>& x0 = std::nullopt);

}  // namespace zoncf::harness

#endif  // ZONCF_HARNESS_CHECKS_H_
