#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "zoncf/harness/checks.h"
#include "zoncf/harness/config.h"
#include "zoncf/harness/experiment.h"
#include "zoncf/harness/plot.h"

using namespace zoncf;
using namespace zoncf::harness;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"(
name = "sample"
epsilon = 1e-3
seeds = [0, 1, 2]
budget = 20000
out = "out/sample"
preset = "practical"

[problem]
name = "octopus"
dimension = 3
tau = 2.718281828459045

[[algorithms]]
name = "zo-gd-ncf"
eta = 0.09196986029286058
ncf.eta = 0.05

[[algorithms]]
name = "zo-gd-ncf"
label = "gd-rand"
option = "rand"

[[algorithms]]
name = "rspi"
dfpi = { iterations = 5, r = 0.01 }
)";

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zoncf-harness-" + name);
  fs::remove_all(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig Small(const fs::path& out) {
  ExperimentConfig c = ParseConfig(kSample);
  c.out = out.string();
  c.seeds = {0, 1};
  return c;
}

TrajectoryFile Run(std::string algorithm, std::uint64_t seed,
                   std::vector<std::pair<std::uint64_t, double>> points) {
  TrajectoryFile f;
  f.algorithm = std::move(algorithm);
  f.seed = seed;
  for (auto [q, v] : points) f.records.push_back({q, v, Event::kDescent, 0.0});
  return f;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = ParseConfig(kSample);
  CHECK(c.name == "sample");
  CHECK(c.epsilon == 1e-3);
  CHECK_FALSE(c.delta.has_value());
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(c.budget == 20000);
  CHECK(c.sample_every == 1000);
  CHECK(c.problem.name == "octopus");
  CHECK(std::get<std::int64_t>(c.problem.params.at("dimension")) == 3);
  REQUIRE(c.algorithms.size() == 3);
  CHECK(c.algorithms[0].label == "zo-gd-ncf");
  CHECK(c.algorithms[1].label == "gd-rand");
  CHECK(std::get<std::int64_t>(c.algorithms[2].params.at("dfpi.iterations")) == 5);

  const SolverParams gd = MakeSolverParams(c, c.algorithms[0]);
  CHECK(gd.epsilon == 1e-3);
  CHECK(gd.eta == 0.09196986029286058);
  CHECK(gd.ncf.eta == 0.05);
  CHECK(gd.run.query_budget == 20000);
  CHECK(gd.option == GradOption::kCoord);
  CHECK(MakeSolverParams(c, c.algorithms[1]).option == GradOption::kRand);
  const BaselineParams rspi = MakeBaselineParams(c, c.algorithms[2]);
  CHECK(rspi.rspi.dfpi.iterations == 5);
  CHECK(rspi.rspi.dfpi.r == 0.01);
  CHECK(rspi.epsilon == 1e-3);
}

TEST_CASE("config defaults") {
  const ExperimentConfig c = ParseConfig(R"(
[problem]
name = "cubic-det"
[[algorithms]]
name = "pagd"
t_thres = 3
)");
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK(c.epsilon == 1e-2);
  CHECK_FALSE(c.budget.has_value());
  CHECK(c.preset == Preset::kPractical);
  CHECK(MakeBaselineParams(c, c.algorithms[0]).pagd.t_thres == 3);
}

TEST_CASE("config round trip is the identity") {
  const ExperimentConfig a = ParseConfig(kSample);
  const std::string text = SerializeConfig(a);
  const ExperimentConfig b = ParseConfig(text);
  CHECK(a == b);
  CHECK(SerializeConfig(b) == text);

  ExperimentConfig c = a;
  c.delta = 0.125;
  c.preset = Preset::kTheory;
  c.timing = true;
  c.budget.reset();
  c.algorithms[0].params["greedy_sign"] = true;
  c.algorithms[0].params["ncf.sigma_pert"] = 1e-300;
  c.algorithms[0].params["eta"] = 0.1 + 0.2;
  CHECK(ParseConfig(SerializeConfig(c)) == c);
}

TEST_CASE("config errors") {
  auto bad = [](const std::string& text) { CHECK_THROWS_AS(ParseConfig(text), ConfigError); };
  const std::string problem = "[problem]\nname = \"octopus\"\n";
  const std::string algo = "[[algorithms]]\nname = \"zo-gd-ncf\"\n";
  bad("seeds = []\n" + problem + algo);
  bad(problem + "[[algorithms]]\nname = \"zo-newton\"\n");
  bad("[problem]\nname = \"rosenbrock\"\n" + algo);
  bad("epsilon_typo = 1.0\n" + problem + algo);
  bad(problem + algo + "etaa = 0.1\n");
  bad(problem + algo + "ncf.bogus = 0.1\n");
  bad(problem + algo + "eta = \"fast\"\n");
  bad(problem + algo + "max_iterations = -3\n");
  bad(problem + algo + algo);
  bad(algo);
  bad(problem);
  bad("preset = \"fast\"\n" + problem + algo);
  bad("epsilon = 0.0\n" + problem + algo);
  bad(problem + "dimensions = 4\n" + algo);
  bad("seeds = [0, -1]\n" + problem + algo);
  bad("epsilon = [\n" + problem);
  bad(problem + "[[algorithms]]\nname = \"pagd\"\nncf.eta = 0.1\n");
}

TEST_CASE("unknown names fail before any run") {
  const fs::path out = TempDir("early");
  ExperimentConfig c = Small(out);
  c.algorithms.push_back({"zo-newton", "newton", {}});
  CHECK_THROWS_AS(RunExperiment(c), ConfigError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("delta rule") {
  ExperimentConfig c = ParseConfig(kSample);
  SmoothnessProfile s;
  s.rho = 4.0;
  CHECK(RunDelta(c, s) == doctest::Approx(std::sqrt(4.0 * 1e-3)));
  c.delta = 0.3;
  CHECK(RunDelta(c, s) == 0.3);
}

TEST_CASE("problem construction and smoothness overrides") {
  ProblemSpec spec{"octopus", {{"dimension", std::int64_t{4}}, {"rho", 2.0}}};
  const BlackBoxProblem p = BuildProblem(spec);
  CHECK(p.dimension() == 4);
  CHECK(p.smoothness().rho == 2.0);
  CHECK(p.smoothness().ell == doctest::Approx(2.0 * std::numbers::e));

  const AlgorithmSpec alg{"zpsgd", "zpsgd", {{"rho", 1e-4}, {"ell", 3}}};
  const SmoothnessProfile s = AlgorithmSmoothness(alg, p.smoothness());
  CHECK(s.rho == 1e-4);
  CHECK(s.ell == 3.0);

  const BlackBoxProblem cs = BuildProblem(
      {"cubic-stoch", {{"dimension", std::int64_t{6}}, {"components", std::int64_t{12}}}});
  CHECK(cs.component_count() == 12);
  CHECK(BuildProblem({"cubic-det", {{"dimension", std::int64_t{7}}}}).dimension() == 7);
}

TEST_CASE("dataset lookup") {
  const fs::path dir = TempDir("data");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "tiny.svm");
    f << "+1 1:0.5 3:1\n-1 2:0.25\n";
  }
  ProblemSpec spec{"reg-nls", {{"dataset", std::string("tiny.svm")}}};
  ::setenv("ZONCF_DATA_DIR", dir.c_str(), 1);
  const BlackBoxProblem p = BuildProblem(spec);
  CHECK(p.dimension() == 3);
  CHECK(p.component_count() == 2);

  spec.params["dataset"] = std::string("missing.svm");
  try {
    BuildProblem(spec);
    FAIL("expected an error");
  } catch (const ConfigError&) {
    FAIL("a missing dataset is an I/O error, not a config error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("missing.svm") != std::string::npos);
  }
  ::unsetenv("ZONCF_DATA_DIR");
}

TEST_CASE("trajectory csv schema") {
  SolverReport r;
  r.trajectory = {{0, -0.5, Event::kStart, 1.25},
                  {40, 0.1 + 0.2, Event::kDescent, 2.5},
                  {1000, 1e-300, Event::kSample, 3.0}};
  const std::string csv = TrajectoryCsv(r, "gd", 7, false);
  CHECK(csv.substr(0, csv.find('\n')) == "seed,algorithm,queries,f,event,ms");
  CHECK(csv.find("7,gd,40,0.30000000000000004,descent,0\n") != std::string::npos);
  const TrajectoryFile back = ParseTrajectoryCsv(csv);
  CHECK(back.seed == 7);
  CHECK(back.algorithm == "gd");
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[1].f == 0.1 + 0.2);
  CHECK(back.records[2].f == 1e-300);
  CHECK(back.records[2].event == Event::kSample);
  CHECK(TrajectoryCsv(r, "gd", 7, true).find(",2.500\n") != std::string::npos);
}

TEST_CASE("csv reader rejects a different header") {
  CHECK_THROWS_AS(ParseTrajectoryCsv("seed,algorithm,queries,f,event\n0,gd,0,1,start\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(ParseTrajectoryCsv("seed,algorithm,queries,f,event,ms\n0,gd,0,1,warp,0\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(ParseTrajectoryCsv(
                      "seed,algorithm,queries,f,event,ms\n0,gd,5,1,start,0\n0,gd,4,1,end,0\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(ParseTrajectoryCsv(""), std::runtime_error);
}

TEST_CASE("experiment outputs and bitwise determinism") {
  const fs::path a = TempDir("run-a"), b = TempDir("run-b");
  RunOptions many;
  many.workers = 4;
  RunOptions one;
  one.workers = 1;
  const ExperimentResult ra = RunExperiment(Small(a), many);
  const ExperimentResult rb = RunExperiment(Small(b), one);
  REQUIRE(ra.runs.size() == 6);
  CHECK(ra.runs[0].label == "zo-gd-ncf");
  CHECK(ra.runs[1].seed == 1);
  CHECK(ra.runs[5].label == "rspi");

  std::size_t csvs = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (name != "config.toml") CHECK(Slurp(entry.path()) == Slurp(b / name));
    CHECK(name.string().find(".tmp") == std::string::npos);
    csvs += entry.path().extension() == ".csv";
  }
  CHECK(csvs == 7);
  CHECK(fs::exists(a / "plot.svg"));
  CHECK(ParseConfig(Slurp(a / "config.toml")) == Small(a));

  const std::string summary = Slurp(a / "summary.csv");
  CHECK(summary.substr(0, summary.find('\n')) == kSummaryHeader);
  for (const auto& r : ra.runs) {
    const TrajectoryFile t = ReadTrajectoryCsv(a / TrajectoryFileName(r.label, r.seed));
    CHECK(t.records.back().queries == r.report.query_total);
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      CHECK(t.records[i].queries > t.records[i - 1].queries);
    }
    CHECK(r.grad_norm.has_value());
    CHECK(r.lambda_min.has_value());
    CHECK(r.final_f == t.records.back().f);
  }
}

TEST_CASE("budget enforcement within one step") {
  const ExperimentConfig c = Small(TempDir("budget"));
  const BlackBoxProblem base = BuildProblem(c.problem);
  for (const auto& alg : c.algorithms) {
    BlackBoxProblem p = base.Fork();
    const LedgerAudit audit = AuditLedger(p, c, alg, 0);
    CAPTURE(alg.label);
    CHECK(audit.ledger_total == audit.closed_form_total);
    CHECK(audit.mismatched_events == 0);
    CHECK(audit.ledger_total <= *c.budget + audit.max_event_cost);
  }
}

TEST_CASE("closed-form event costs") {
  CostModel m;
  m.algorithm = "zo-scsg-ncf";
  m.dimension = 4;
  m.components = 10;
  m.big_batch = 20;
  StepInfo s;
  s.event = Event::kEpoch;
  s.batch = 3;
  s.inner_steps = 2;
  CHECK(ExpectedEventCost(m, s, false) == 2 * 4 * 10 + 2 * 2 * 2 * 4 * 3);
  m.option = GradOption::kRand;
  CHECK(ExpectedEventCost(m, s, false) == 2 * 4 * 10 + 2 * 2 * 2 * 3);
  m.algorithm = "rspi";
  s.event = Event::kSearch;
  CHECK(ExpectedEventCost(m, s, true) == 10);
  CHECK(ExpectedEventCost(m, s, false) == 20);
  s.event = Event::kNcfCall;
  s.ncf_iterations = 7;
  CHECK(ExpectedEventCost(m, s, false) == 7 * 4 * 4 * 10);
}

TEST_CASE("plot of a single two-point series") {
  const auto series = SummarizeSeries({Run("gd", 0, {{0, 1.0}, {100, 0.5}})});
  REQUIRE(series.size() == 1);
  CHECK(series[0].queries == std::vector<double>{0, 100});
  const std::string svg = RenderSvg(series, {});
  const auto at = svg.find("<polyline");
  REQUIRE(at != std::string::npos);
  const auto open = svg.find("points=\"", at) + 8;
  const std::string points = svg.substr(open, svg.find('"', open) - open);
  CHECK(std::count(points.begin(), points.end(), ' ') == 1);
  CHECK(std::count(points.begin(), points.end(), ',') == 2);
  CHECK(svg.find("<polygon") == std::string::npos);
  CHECK(svg.find("<polyline", at + 1) == std::string::npos);
}

TEST_CASE("median and interquartile band over seeds") {
  const auto series = SummarizeSeries({Run("a", 0, {{0, 1.0}, {10, 1.0}}),
                                       Run("a", 1, {{0, 2.0}, {20, 0.0}}),
                                       Run("a", 2, {{0, 3.0}, {5, 3.0}}),
                                       Run("b", 0, {{0, 9.0}})});
  REQUIRE(series.size() == 2);
  const auto& s = series[0];
  CHECK(s.runs == 3);
  CHECK(s.queries == std::vector<double>{0, 5, 10, 20});
  CHECK(s.median[0] == 2.0);
  CHECK(s.q25[0] == 1.5);
  CHECK(s.q75[0] == 2.5);
  // Run 1 holds 2.0 until q = 20; finished runs keep their last value.
  CHECK(s.median[3] == 1.0);
  CHECK(s.q25[3] == 0.5);
  CHECK(series[1].label == "b");
}

TEST_CASE("query grid is thinned") {
  std::vector<std::pair<std::uint64_t, double>> pts;
  for (std::uint64_t q = 0; q < 5000; ++q) pts.emplace_back(q, 1.0 / (1.0 + q));
  const auto series = SummarizeSeries({Run("a", 0, pts)}, 400);
  CHECK(series[0].queries.size() == 400);
  CHECK(series[0].queries.front() == 0);
  CHECK(series[0].queries.back() == 4999);
}

TEST_CASE("svg bytes are deterministic and log axes render") {
  const std::vector<TrajectoryFile> files{Run("a", 0, {{0, 1.0}, {100, 0.1}, {1000, 0.01}}),
                                          Run("a", 1, {{0, 1.0}, {300, 0.05}}),
                                          Run("b & c", 0, {{0, 2.0}, {1000, -1.0}})};
  PlotOptions o;
  o.log_x = true;
  o.log_y = true;
  o.title = "t";
  const std::string first = RenderSvg(SummarizeSeries(files), o);
  CHECK(first == RenderSvg(SummarizeSeries(files), o));
  CHECK(first.find("b &amp; c") != std::string::npos);
  CHECK(first.find("nan") == std::string::npos);
  CHECK(first.find("inf") == std::string::npos);
  CHECK(RenderSvg({}, {}).find("</svg>") != std::string::npos);
}

TEST_CASE("plotting a directory") {
  const fs::path dir = TempDir("plot");
  fs::create_directories(dir);
  SolverReport r;
  r.trajectory = {{0, 1.0, Event::kStart, 0.0}, {10, 0.5, Event::kEnd, 0.0}};
  WriteFileAtomic(dir / "gd-seed0.csv", TrajectoryCsv(r, "gd", 0, false));
  WriteFileAtomic(dir / "summary.csv", std::string(kSummaryHeader) + "\n");
  const fs::path svg = PlotDirectory(dir, {});
  CHECK(fs::exists(svg));
  const std::string once = Slurp(svg);
  PlotDirectory(dir, {});
  CHECK(Slurp(svg) == once);

  WriteFileAtomic(dir / "odd.csv", "seed,algorithm,queries,f\n");
  CHECK_THROWS_AS(PlotDirectory(dir, {}), std::runtime_error);
  CHECK_THROWS_AS(PlotDirectory(TempDir("empty-plot-missing"), {}), std::exception);
}

TEST_CASE("invariant suites pass and the negative control fails") {
  const auto results = RunInvariants("estimators");
  CHECK(AllPassed(results));
  CHECK(results.size() >= 24);

  CheckOptions corrupt;
  corrupt.corrupt_mu = true;
  const auto bad = RunInvariants("estimators", corrupt);
  CHECK_FALSE(AllPassed(bad));
  bool reported = false;
  for (const auto& r : bad) {
    if (r.passed) continue;
    CHECK(r.test.find("coord_grad_bound") == 0);
    CHECK(r.observed > r.bound);
    reported = true;
  }
  CHECK(reported);
  const std::string json = ReportJson(bad);
  for (const char* key : {"\"suite\"", "\"test\"", "\"status\"", "\"observed\"", "\"bound\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
  CHECK(json.find("\"fail\"") != std::string::npos);
  CHECK(ReportText(bad).find("violated: ||g_coord - grad f|| <= sqrt(d) rho mu^2 / 6") !=
        std::string::npos);
  CHECK_THROWS_AS(RunInvariants("everything"), std::invalid_argument);
}

TEST_CASE("all invariant suites pass") {
  const auto results = RunInvariants("all");
  for (const auto& r : results) {
    CAPTURE(r.suite);
    CAPTURE(r.test);
    CHECK(r.passed);
  }
  bool ncf_targets = false;
  for (const auto& r : results) {
    ncf_targets |= r.suite == "ncf" && r.note.find("2/3") != std::string::npos &&
                   r.note.find("1-p") != std::string::npos;
  }
  CHECK(ncf_targets);
}
