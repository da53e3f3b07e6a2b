#ifndef ZONCF_HARNESS_EXPERIMENT_H_
#define ZONCF_HARNESS_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zoncf/harness/config.h"
#include "zoncf/report.h"

namespace zoncf::harness {

inline constexpr const char* kTrajectoryHeader = "seed,algorithm,queries,f,event,ms";
inline constexpr const char* kSummaryHeader =
    "seed,algorithm,termination,queries,iterations,final_f,grad_norm,lambda_min";

struct RunOptions {
  bool write_outputs = true;
  std::size_t workers = 0;  // 0: hardware concurrency
};

struct RunResult {
  std::string label;
  std::string algorithm;
  std::uint64_t seed = 0;
  SolverReport report;
  double delta = 0.0;
  double final_f = 0.0;
  std::optional<double> grad_norm;   // analytic hooks only
  std::optional<double> lambda_min;
};

struct ExperimentResult {
  std::vector<RunResult> runs;  // algorithm-major, then seed order
  std::filesystem::path out_dir;
};

// Runs one algorithm on a problem that already carries the run's
// smoothness profile. x0 is the origin unless given.
SolverReport RunAlgorithm(const BlackBoxProblem& problem, const ExperimentConfig& config,
                          const AlgorithmSpec& algorithm, std::uint64_t seed,
                          const std::optional<Vector>& x0 = std::nullopt,
                          StepObserver observer = {});

// Validates the config and builds the problem before any run starts.
ExperimentResult RunExperiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string TrajectoryCsv(const SolverReport& report, const std::string& label,
                          std::uint64_t seed, bool timing);
std::string SummaryCsv(const std::vector<RunResult>& runs);
std::string TrajectoryFileName(const std::string& label, std::uint64_t seed);

// Writes through a temporary file and a rename.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace zoncf::harness

#endif  // ZONCF_HARNESS_EXPERIMENT_H_
