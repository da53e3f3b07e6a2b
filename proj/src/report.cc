#include "zoncf/report.h"

namespace zoncf {
namespace {

constexpr std::array<const char*, kTerminationCount> kTerminationNames = {
    "sosp_certified", "first_order_certified", "iteration_cap",
    "budget_exhausted"};

constexpr std::array<const char*, kEventCount> kEventNames = {
    "start",  "verify", "descent", "epoch",   "ncf_call", "nc_step",
    "refresh", "search", "perturb", "sample", "end"};

}  // namespace

const char* TerminationName(Termination t) {
  return kTerminationNames[static_cast<std::size_t>(t)];
}

std::optional<Termination> ParseTermination(const std::string& name) {
  for (std::size_t i = 0; i < kTerminationCount; ++i) {
    if (name == kTerminationNames[i]) return static_cast<Termination>(i);
  }
  return std::nullopt;
}

const char* EventName(Event e) { return kEventNames[static_cast<std::size_t>(e)]; }

std::optional<Event> ParseEvent(const std::string& name) {
  for (std::size_t i = 0; i < kEventCount; ++i) {
    if (name == kEventNames[i]) return static_cast<Event>(i);
  }
  return std::nullopt;
}

TrajectoryRecorder::TrajectoryRecorder(const BlackBoxProblem& problem,
                                       std::uint64_t sample_every)
    : problem_(problem),
      start_(problem.ledger().total()),
      sample_every_(sample_every),
      clock_start_(std::chrono::steady_clock::now()) {}

std::uint64_t TrajectoryRecorder::queries() const {
  return problem_.ledger().total() - start_;
}

void TrajectoryRecorder::Record(Event event, const Vector& x) {
  ++counts_[static_cast<std::size_t>(event)];
  TrajectoryRecord r;
  r.queries = queries();
  r.f = problem_.OracleValue(x);
  r.event = event;
  r.ms = std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - clock_start_)
             .count();
  if (!records_.empty() && sample_every_ > 0) {
    const TrajectoryRecord last = records_.back();
    std::uint64_t next = (last.queries / sample_every_ + 1) * sample_every_;
    for (; next < r.queries; next += sample_every_) {
      ++counts_[static_cast<std::size_t>(Event::kSample)];
      records_.push_back({next, last.f, Event::kSample, r.ms});
    }
  }
  Push(r);
}

void TrajectoryRecorder::Push(const TrajectoryRecord& r) {
  if (!records_.empty() && records_.back().queries >= r.queries) {
    records_.back() = r;
  } else {
    records_.push_back(r);
  }
}

}  // namespace zoncf
