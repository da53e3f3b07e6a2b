#include "zoncf/oracle.h"

#include <stdexcept>
#include <utility>

namespace zoncf {

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kGradient: return "gradient";
    case Phase::kNcf: return "ncf";
    case Phase::kVerification: return "verification";
    case Phase::kSearch: return "search";
  }
  return "unknown";
}

void QueryLedger::Charge(Phase phase, std::uint64_t count) {
  phases_[static_cast<std::size_t>(phase)].fetch_add(count,
                                                     std::memory_order_relaxed);
  total_.fetch_add(count, std::memory_order_relaxed);
}

std::uint64_t QueryLedger::phase(Phase phase) const {
  return phases_[static_cast<std::size_t>(phase)].load(
      std::memory_order_relaxed);
}

LedgerSnapshot QueryLedger::Snapshot() const {
  LedgerSnapshot snap;
  // Read phases first so that a concurrent Charge can only make the total
  // look larger than the phase sum, never smaller.
  for (std::size_t i = 0; i < kPhaseCount; ++i) {
    snap.by_phase[i] = phases_[i].load(std::memory_order_relaxed);
  }
  snap.total = total_.load(std::memory_order_relaxed);
  return snap;
}

void QueryLedger::Reset() {
  for (auto& p : phases_) p.store(0, std::memory_order_relaxed);
  total_.store(0, std::memory_order_relaxed);
}

void SmoothnessProfile::Validate() const {
  if (!(ell > 0.0)) throw std::invalid_argument("smoothness: ell must be > 0");
  if (!(rho >= 0.0)) throw std::invalid_argument("smoothness: rho must be >= 0");
  if (!(sigma_var >= 0.0)) {
    throw std::invalid_argument("smoothness: sigma_var must be >= 0");
  }
}

BlackBoxProblem::BlackBoxProblem(std::string name, int dimension,
                                 std::size_t components, ComponentFn component,
                                 SmoothnessProfile smoothness,
                                 AnalyticHooks hooks)
    : name_(std::move(name)),
      dimension_(dimension),
      components_(components),
      component_(std::move(component)),
      smoothness_(smoothness),
      hooks_(std::move(hooks)),
      ledger_(std::make_unique<QueryLedger>()) {
  if (dimension_ <= 0) throw std::invalid_argument("dimension must be positive");
  if (components_ == 0) {
    throw std::invalid_argument("component count must be positive");
  }
  if (!component_) throw std::invalid_argument("component function is empty");
  smoothness_.Validate();
}

BlackBoxProblem BlackBoxProblem::Fork() const {
  return BlackBoxProblem(name_, dimension_, components_, component_,
                         smoothness_, hooks_);
}

void BlackBoxProblem::set_smoothness(const SmoothnessProfile& s) {
  s.Validate();
  smoothness_ = s;
}

double BlackBoxProblem::Evaluate(std::size_t component, const Vector& x,
                                 Phase phase) const {
  if (component >= components_) {
    throw std::out_of_range("component index out of range");
  }
  ledger_->Charge(phase);
  return component_(component, x);
}

double BlackBoxProblem::EvaluateFull(const Vector& x, Phase phase) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < components_; ++i) sum += Evaluate(i, x, phase);
  return sum / static_cast<double>(components_);
}

double BlackBoxProblem::OracleValue(const Vector& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < components_; ++i) sum += component_(i, x);
  return sum / static_cast<double>(components_);
}

}  // namespace zoncf
