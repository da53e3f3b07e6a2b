#ifndef ZONCF_HARNESS_CONFIG_H_
#define ZONCF_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "zoncf/baselines.h"
#include "zoncf/ncf.h"
#include "zoncf/oracle.h"
#include "zoncf/solvers.h"

namespace zoncf::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ParamValue = std::variant<bool, std::int64_t, double, std::string>;
// Flat key/value overrides; nested tables use dotted keys ("ncf.eta").
using ParamMap = std::map<std::string, ParamValue>;

struct ProblemSpec {
  std::string name;
  ParamMap params;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct AlgorithmSpec {
  std::string name;   // solver or baseline name
  std::string label;  // unique within the experiment; defaults to name
  ParamMap params;
  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

struct ExperimentConfig {
  std::string name;
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  double epsilon = 1e-2;
  std::optional<double> delta;  // default √(ρε) per run
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::optional<std::uint64_t> budget;
  std::string out = "out";
  Preset preset = Preset::kPractical;
  std::uint64_t sample_every = 1000;
  bool timing = false;  // fill the ms column; off keeps CSVs reproducible
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

const std::vector<std::string>& SolverNames();
const std::vector<std::string>& BaselineNames();
const std::vector<std::string>& ProblemNames();
bool IsSolver(const std::string& name);
bool IsBaseline(const std::string& name);

ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::filesystem::path& path);
std::string SerializeConfig(const ExperimentConfig& config);

// Resolves every name and override key; throws ConfigError.
void ValidateConfig(const ExperimentConfig& config);

// Builds the named problem. Dataset-backed problems look the file up as
// given, then under $ZONCF_DATA_DIR; a missing file throws
// std::runtime_error.
BlackBoxProblem BuildProblem(const ProblemSpec& spec);

// Applies ell / rho / sigma / delta_f overrides from an algorithm's params.
SmoothnessProfile AlgorithmSmoothness(const AlgorithmSpec& algorithm,
                                      const SmoothnessProfile& base);

SolverParams MakeSolverParams(const ExperimentConfig& config,
                              const AlgorithmSpec& algorithm);
BaselineParams MakeBaselineParams(const ExperimentConfig& config,
                                  const AlgorithmSpec& algorithm);

// δ of a run: the configured value, or √(ρε) with the run's ρ.
double RunDelta(const ExperimentConfig& config, const SmoothnessProfile& smoothness);

}  // namespace zoncf::harness

#endif  // ZONCF_HARNESS_CONFIG_H_
