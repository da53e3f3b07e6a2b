#ifndef ZONCF_REPORT_H_
#define ZONCF_REPORT_H_

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zoncf/estimators.h"
#include "zoncf/oracle.h"

namespace zoncf {

enum class Termination {
  kSospCertified,
  kFirstOrderCertified,  // stopping test on the gradient only
  kIterationCapReached,
  kQueryBudgetExhausted,
};
inline constexpr std::size_t kTerminationCount = 4;
const char* TerminationName(Termination t);
std::optional<Termination> ParseTermination(const std::string& name);

enum class Event : int {
  kStart = 0,
  kVerify,
  kDescent,
  kEpoch,     // one SCSG epoch
  kNcfCall,
  kNcStep,
  kRefresh,   // SPIDER full-batch refresh
  kSearch,    // random-search move (RSPI)
  kPerturb,   // perturbed escape attempt (PAGD)
  kSample,    // periodic record between events
  kEnd,
};
inline constexpr std::size_t kEventCount = 11;
const char* EventName(Event e);
std::optional<Event> ParseEvent(const std::string& name);

struct TrajectoryRecord {
  std::uint64_t queries = 0;  // ledger total relative to the run start
  double f = 0.0;             // full objective, computed off the ledger
  Event event = Event::kStart;
  double ms = 0.0;            // wall clock since the run start
};

// Per-step instrumentation handed to an optional observer. Pointers are
// valid only during the callback.
struct StepInfo {
  Event event = Event::kStart;
  std::size_t iteration = 0;
  const Vector* x = nullptr;         // point after the step
  const Vector* estimate = nullptr;  // gradient estimate used, if any
  const Vector* at = nullptr;        // point the estimate refers to
  std::uint64_t queries = 0;         // charged by this step
  std::size_t batch = 0;             // components per estimator call
  std::size_t inner_steps = 0;       // SCSG epoch length
  std::optional<GradientVerdict> verdict;
  std::optional<std::size_t> ncf_iterations;
  std::optional<std::size_t> ncf_probe_components;
  std::optional<bool> ncf_found;
};
using StepObserver = std::function<void(const StepInfo&)>;

// Shared run controls for solvers and baselines.
struct RunLimits {
  std::optional<std::uint64_t> query_budget;
  std::uint64_t sample_every = 1000;
  StepObserver observer;
};

struct SolverReport {
  std::string algorithm;
  Vector x;
  Termination termination = Termination::kIterationCapReached;
  std::vector<TrajectoryRecord> trajectory;
  LedgerSnapshot ledger;
  std::uint64_t query_total = 0;
  std::size_t iterations = 0;
  std::array<std::size_t, kEventCount> event_counts{};
  std::optional<GradientVerdict> last_verdict;
  std::optional<bool> last_ncf_bottom;

  std::size_t count(Event e) const {
    return event_counts[static_cast<std::size_t>(e)];
  }
};

// Builds the trajectory of one run. Records keep strictly increasing query
// counts: an event that spent no queries replaces the record before it.
// Crossing a multiple of sample_every between events inserts a kSample
// record carrying the previous value forward.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const BlackBoxProblem& problem, std::uint64_t sample_every);

  std::uint64_t queries() const;
  void Record(Event event, const Vector& x);
  const std::vector<TrajectoryRecord>& records() const { return records_; }
  const std::array<std::size_t, kEventCount>& counts() const { return counts_; }

 private:
  void Push(const TrajectoryRecord& r);

  const BlackBoxProblem& problem_;
  std::uint64_t start_;
  std::uint64_t sample_every_;
  std::chrono::steady_clock::time_point clock_start_;
  std::vector<TrajectoryRecord> records_;
  std::array<std::size_t, kEventCount> counts_{};
};

}  // namespace zoncf

#endif  // ZONCF_REPORT_H_
