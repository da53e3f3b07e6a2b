#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zoncf/harness/checks.h"
#include "zoncf/harness/config.h"
#include "zoncf/harness/experiment.h"
#include "zoncf/harness/plot.h"

using namespace zoncf;
using namespace zoncf::harness;

namespace {

// "0,1,2", "0..4" or a mix of both.
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part = text.substr(start, comma - start);
    if (!part.empty()) {
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dots));
        const auto hi = std::stoull(part.substr(dots + 2));
        if (hi < lo) throw ConfigError("seed range '" + part + "' is empty");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw ConfigError("--seeds selects no seeds");
  return seeds;
}

void PrintSummary(const ExperimentResult& result) {
  std::printf("%-18s %5s  %-22s %12s %22s %12s %12s\n", "algorithm", "seed", "termination",
              "queries", "final f", "|grad f|", "lambda_min");
  for (const auto& r : result.runs) {
    std::printf("%-18s %5llu  %-22s %12llu %22.15g ", r.label.c_str(),
                static_cast<unsigned long long>(r.seed), TerminationName(r.report.termination),
                static_cast<unsigned long long>(r.report.query_total), r.final_f);
    if (r.grad_norm) std::printf("%12.4g ", *r.grad_norm); else std::printf("%12s ", "-");
    if (r.lambda_min) std::printf("%12.4g\n", *r.lambda_min); else std::printf("%12s\n", "-");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order saddle escaping toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run every (algorithm, seed) pair of a config");
  std::string config_path, seeds, out, preset;
  std::optional<std::uint64_t> budget;
  std::size_t workers = 0;
  bool timing = false, quiet = false;
  run->add_option("config", config_path, "experiment config (TOML)")->required();
  run->add_option("--seeds", seeds, "seed list, e.g. 0,1,2 or 0..4");
  run->add_option("--budget", budget, "query budget per run");
  run->add_option("--out", out, "output directory");
  run->add_option("--preset", preset, "parameter preset")
      ->check(CLI::IsMember({"theory", "practical"}));
  run->add_option("--workers", workers, "worker threads (0: all cores)");
  run->add_flag("--timing", timing, "fill the ms column of trajectories");
  run->add_flag("-q,--quiet", quiet, "skip the summary table");

  auto* check = app.add_subcommand("check", "run the invariant suites");
  std::string suite = "all";
  bool json = false, corrupt_mu = false;
  check->add_option("suite", suite, "estimators, ncf, solvers, baselines or all")
      ->check(CLI::IsMember({"all", "estimators", "ncf", "solvers", "baselines"}));
  check->add_flag("--json", json, "machine-readable report on stdout");
  check->add_flag("--corrupt-mu", corrupt_mu, "negative control: run estimators at 10 mu");

  auto* plot = app.add_subcommand("plot", "redraw plot.svg from the CSVs in a directory");
  std::string plot_dir;
  PlotOptions plot_options;
  std::optional<double> f_ref;
  plot->add_option("dir", plot_dir, "experiment output directory")->required();
  plot->add_flag("--log-x", plot_options.log_x, "logarithmic query axis");
  plot->add_flag("--log-y", plot_options.log_y, "plot f - f_ref on a logarithmic axis");
  plot->add_option("--f-ref", f_ref, "reference value for --log-y");
  plot->add_option("--title", plot_options.title, "plot title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig config = LoadConfig(config_path);
      if (!seeds.empty()) config.seeds = ParseSeeds(seeds);
      if (budget) config.budget = *budget;
      if (!out.empty()) config.out = out;
      if (preset == "theory") config.preset = Preset::kTheory;
      if (preset == "practical") config.preset = Preset::kPractical;
      if (timing) config.timing = true;
      RunOptions options;
      options.workers = workers;
      const ExperimentResult result = RunExperiment(config, options);
      if (!quiet) PrintSummary(result);
      std::printf("wrote %zu trajectories, summary.csv and plot.svg to %s\n", result.runs.size(),
                  result.out_dir.string().c_str());
      return 0;
    }
    if (*check) {
      CheckOptions options;
      options.corrupt_mu = corrupt_mu;
      const auto results = RunInvariants(suite, options);
      std::cout << (json ? ReportJson(results) : ReportText(results));
      return AllPassed(results) ? 0 : 1;
    }
    if (*plot) {
      plot_options.f_ref = f_ref;
      std::printf("wrote %s\n", PlotDirectory(plot_dir, plot_options).string().c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
