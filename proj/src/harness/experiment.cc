#include "zoncf/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "zoncf/baselines.h"
#include "zoncf/harness/plot.h"
#include "zoncf/solvers.h"

namespace zoncf::harness {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using SolverFn = SolverReport (*)(const BlackBoxProblem&, const Vector&, const SolverParams&, Rng&);
using BaselineFn = SolverReport (*)(const BlackBoxProblem&, const Vector&, const BaselineParams&,
                                    Rng&);

SolverFn FindSolver(const std::string& name) {
  if (name == "zo-gd-ncf") return &ZoGdNcf;
  if (name == "zo-sgd-ncf") return &ZoSgdNcf;
  if (name == "zo-scsg-ncf") return &ZoScsgNcf;
  if (name == "zo-spider-ncf") return &ZoSpiderNcf;
  if (name == "zo-spider-coord") return &ZoSpiderCoord;
  return nullptr;
}

BaselineFn FindBaseline(const std::string& name) {
  if (name == "zpsgd") return &ZpsgdRun;
  if (name == "pagd") return &PagdRun;
  if (name == "rspi") return &RspiRun;
  return nullptr;
}

RunResult RunPair(const BlackBoxProblem& base, const ExperimentConfig& config,
                  const AlgorithmSpec& algorithm, std::uint64_t seed) {
  BlackBoxProblem problem = base.Fork();
  problem.set_smoothness(AlgorithmSmoothness(algorithm, base.smoothness()));
  RunResult r;
  r.label = algorithm.label;
  r.algorithm = algorithm.name;
  r.seed = seed;
  r.delta = RunDelta(config, problem.smoothness());
  r.report = RunAlgorithm(problem, config, algorithm, seed);
  r.final_f = problem.OracleValue(r.report.x);
  if (problem.has_gradient()) r.grad_norm = problem.hooks().gradient(r.report.x).norm();
  if (problem.has_hessian()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(problem.hooks().hessian(r.report.x),
                                              Eigen::EigenvaluesOnly);
    r.lambda_min = eig.eigenvalues().minCoeff();
  }
  return r;
}

}  // namespace

SolverReport RunAlgorithm(const BlackBoxProblem& problem, const ExperimentConfig& config,
                          const AlgorithmSpec& algorithm, std::uint64_t seed,
                          const std::optional<Vector>& x0, StepObserver observer) {
  const Vector start = x0 ? *x0 : Vector::Zero(problem.dimension());
  Rng rng(seed);
  if (const SolverFn fn = FindSolver(algorithm.name)) {
    SolverParams params = MakeSolverParams(config, algorithm);
    params.run.observer = std::move(observer);
    return fn(problem, start, params, rng);
  }
  if (const BaselineFn fn = FindBaseline(algorithm.name)) {
    BaselineParams params = MakeBaselineParams(config, algorithm);
    params.run.observer = std::move(observer);
    return fn(problem, start, params, rng);
  }
  throw ConfigError("unknown algorithm '" + algorithm.name + "'");
}

std::string TrajectoryFileName(const std::string& label, std::uint64_t seed) {
  return label + "-seed" + std::to_string(seed) + ".csv";
}

std::string TrajectoryCsv(const SolverReport& report, const std::string& label,
                          std::uint64_t seed, bool timing) {
  std::ostringstream os;
  os << kTrajectoryHeader << '\n';
  for (const auto& rec : report.trajectory) {
    os << seed << ',' << label << ',' << rec.queries << ',' << Num(rec.f) << ','
       << EventName(rec.event) << ',';
    if (timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", rec.ms);
      os << buf;
    } else {
      os << 0;
    }
    os << '\n';
  }
  return os.str();
}

std::string SummaryCsv(const std::vector<RunResult>& runs) {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& r : runs) {
    os << r.seed << ',' << r.label << ',' << TerminationName(r.report.termination) << ','
       << r.report.query_total << ',' << r.report.iterations << ',' << Num(r.final_f) << ','
       << (r.grad_norm ? Num(*r.grad_norm) : "") << ','
       << (r.lambda_min ? Num(*r.lambda_min) : "") << '\n';
  }
  return os.str();
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents) {
  std::ostringstream suffix;
  suffix << ".tmp" << std::hash<std::thread::id>{}(std::this_thread::get_id());
  std::filesystem::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const RunOptions& options) {
  ValidateConfig(config);
  const BlackBoxProblem base = BuildProblem(config.problem);

  struct Job {
    std::size_t algorithm;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    for (auto seed : config.seeds) jobs.push_back({a, seed});
  }

  ExperimentResult result;
  result.out_dir = config.out;
  if (options.write_outputs) std::filesystem::create_directories(result.out_dir);

  result.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(error_mu);
        if (error) return;
      }
      try {
        const AlgorithmSpec& alg = config.algorithms[jobs[i].algorithm];
        result.runs[i] = RunPair(base, config, alg, jobs[i].seed);
        if (options.write_outputs) {
          WriteFileAtomic(result.out_dir / TrajectoryFileName(alg.label, jobs[i].seed),
                          TrajectoryCsv(result.runs[i].report, alg.label, jobs[i].seed,
                                        config.timing));
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };

  std::size_t workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  if (options.write_outputs) {
    WriteFileAtomic(result.out_dir / "summary.csv", SummaryCsv(result.runs));
    WriteFileAtomic(result.out_dir / "config.toml", SerializeConfig(config));
    std::vector<TrajectoryFile> files;
    for (const auto& r : result.runs) {
      files.push_back({r.seed, r.label, r.report.trajectory});
    }
    PlotOptions plot;
    plot.title = config.name;
    WriteFileAtomic(result.out_dir / "plot.svg", RenderSvg(SummarizeSeries(files), plot));
  }
  return result;
}

}  // namespace zoncf::harness
