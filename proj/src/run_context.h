#ifndef ZONCF_SRC_RUN_CONTEXT_H_
#define ZONCF_SRC_RUN_CONTEXT_H_

#include <optional>
#include <string>
#include <utility>

#include "zoncf/report.h"

namespace zoncf {

// Budget checks, trajectory recording and observer dispatch shared by every
// solver and baseline run.
class RunContext {
 public:
  RunContext(const BlackBoxProblem& problem, std::string algorithm,
             const RunLimits& limits, const Vector& x0)
      : problem_(problem),
        algorithm_(std::move(algorithm)),
        limits_(limits),
        start_(problem.ledger().total()),
        recorder_(problem, limits.sample_every) {
    recorder_.Record(Event::kStart, x0);
  }

  std::uint64_t queries() const { return problem_.ledger().total() - start_; }
  std::uint64_t mark() const { return problem_.ledger().total(); }

  bool exhausted() const {
    return limits_.query_budget && queries() >= *limits_.query_budget;
  }

  // Absolute ledger value at which long subroutines should stop.
  std::optional<std::uint64_t> absolute_stop() const {
    if (!limits_.query_budget) return std::nullopt;
    return start_ + *limits_.query_budget;
  }

  void Emit(Event event, const Vector& x, std::uint64_t mark,
            StepInfo info = {}) {
    recorder_.Record(event, x);
    if (!limits_.observer) return;
    info.event = event;
    info.x = &x;
    info.queries = problem_.ledger().total() - mark;
    limits_.observer(info);
  }

  std::optional<GradientVerdict> last_verdict;
  std::optional<bool> last_ncf_bottom;

  SolverReport Finish(const Vector& x, Termination termination,
                      std::size_t iterations) {
    recorder_.Record(Event::kEnd, x);
    SolverReport r;
    r.algorithm = algorithm_;
    r.x = x;
    r.termination = termination;
    r.trajectory = recorder_.records();
    r.event_counts = recorder_.counts();
    r.ledger = problem_.ledger().Snapshot();
    r.query_total = queries();
    r.iterations = iterations;
    r.last_verdict = last_verdict;
    r.last_ncf_bottom = last_ncf_bottom;
    return r;
  }

 private:
  const BlackBoxProblem& problem_;
  std::string algorithm_;
  const RunLimits& limits_;
  std::uint64_t start_;
  TrajectoryRecorder recorder_;
};

}  // namespace zoncf

#endif  // ZONCF_SRC_RUN_CONTEXT_H_
