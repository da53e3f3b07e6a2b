#include "zoncf/harness/checks.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <json.hpp>

#include "zoncf/estimators.h"
#include "zoncf/harness/experiment.h"
#include "zoncf/ncf.h"
#include "zoncf/problems.h"
#include "zoncf/solvers.h"

namespace zoncf::harness {
namespace {

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

CheckResult AtMost(std::string suite, std::string test, double observed, double bound,
                   std::string inequality, std::string note = {}) {
  CheckResult r{std::move(suite), std::move(test), false, observed, bound,
                Relation::kAtMost, std::move(inequality), std::move(note)};
  r.passed = observed <= bound;
  return r;
}

CheckResult AtLeast(std::string suite, std::string test, double observed, double bound,
                    std::string inequality, std::string note = {}) {
  CheckResult r{std::move(suite), std::move(test), false, observed, bound,
                Relation::kAtLeast, std::move(inequality), std::move(note)};
  r.passed = observed >= bound;
  return r;
}

Matrix RandomOrthogonal(int d, Rng& rng) {
  Matrix m(d, d);
  std::normal_distribution<double> n;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = n(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ();
}

// Lowest eigenvalue `lowest`, the rest uniform in [lo, 1].
Matrix RotatedSpectrum(int d, double lowest, double lo, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  Vector eig(d);
  eig[0] = lowest;
  for (int j = 1; j < d; ++j) eig[j] = u(rng);
  const Matrix q = RandomOrthogonal(d, rng);
  Matrix h = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (h + h.transpose());
}

Vector UniformBox(int d, double half, Rng& rng) {
  std::uniform_real_distribution<double> u(-half, half);
  Vector x(d);
  for (auto& e : x) e = u(rng);
  return x;
}

// Floating-point slack on bounds that hold with equality in exact arithmetic.
double Slack(double bound) { return bound * (1.0 + 1e-9) + 1e-13; }

// ---------------------------------------------------------------------------
// estimators
// ---------------------------------------------------------------------------

void EstimatorSuite(const CheckOptions& options, std::vector<CheckResult>& out) {
  const std::string suite = "estimators";
  const double rho = 6.0;
  for (int d : {1, 5, 20, 100}) {
    auto p = MakeSumOfCubes(d);
    const Batch one = FullBatch(1);
    for (double mu : {1e-1, 1e-2, 1e-3}) {
      Rng rng(static_cast<std::uint64_t>(d) * 7919 + static_cast<std::uint64_t>(1.0 / mu));
      const double mu_used = options.corrupt_mu ? 10.0 * mu : mu;
      const double g_bound = std::sqrt(d) * rho * mu * mu / 6.0;
      // Roundoff of a central difference of values up to |f| <= d(1 + μ)³.
      const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * std::sqrt(d) * d *
                              std::pow(1.0 + mu_used, 3) / mu_used;
      double worst_g = 0.0, worst_hv = 0.0, worst_hv_ratio = 0.0;
      double hv_bound_at_worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const Vector x = UniformBox(d, 1.0, rng);
        const Vector g = CoordGradCentral(p, one, x, mu_used).g;
        worst_g = std::max(worst_g, (g - p.hooks().gradient(x)).norm());

        std::uniform_real_distribution<double> len(0.0, 1.0);
        const Vector v = len(rng) * SampleUnitSphere(d, rng);
        const Vector hv = EstimateHessianVector(p, 0, x, v, mu).hv;
        const double err = (hv - p.hooks().hessian(x) * v).norm();
        const double bound = rho * (v.squaredNorm() / 2.0 + std::sqrt(d) * mu * mu / 3.0);
        if (err / Slack(bound) > worst_hv_ratio) {
          worst_hv_ratio = err / Slack(bound);
          worst_hv = err;
          hv_bound_at_worst = bound;
        }
      }
      const std::string tag = "d=" + std::to_string(d) + " mu=" + Fmt("%g", mu);
      CheckResult r = AtMost(suite, "coord_grad_bound " + tag, worst_g, g_bound + roundoff,
                             "||g_coord - grad f|| <= sqrt(d) rho mu^2 / 6");
      r.note = "bound includes roundoff " + Fmt("%.2g", roundoff);
      if (options.corrupt_mu) r.note += "; estimator run at 10 mu (negative control)";
      out.push_back(r);
      CheckResult h = AtMost(suite, "hv_bound " + tag, worst_hv_ratio, 1.0,
                             "||Hv_est - H v|| <= rho (||v||^2/2 + sqrt(d) mu^2/3)");
      h.observed = worst_hv;
      h.bound = hv_bound_at_worst;
      out.push_back(h);
    }
  }

  double coord_err = 0.0, rand_err = 0.0, hv_err = 0.0;
  Rng rng(2024);
  for (int k = 0; k < 100; ++k) {
    std::uniform_int_distribution<int> dim(1, 20);
    const int d = dim(rng);
    Matrix h(d, d);
    std::normal_distribution<double> nd;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) h(i, j) = nd(rng);
    }
    h = (0.5 * (h + h.transpose())).eval();
    const Vector g = UniformBox(d, 1.0, rng);
    auto p = MakeQuadratic(h, g, 0.5);
    const Vector x = UniformBox(d, 1.0, rng);
    const Vector truth = h * x + g;
    const Batch one = FullBatch(1);
    coord_err = std::max(coord_err, (CoordGradCentral(p, one, x, 0.1).g - truth).cwiseAbs().maxCoeff());
    const Vector u = SampleUnitSphere(d, rng);
    const Vector expect = d * u.dot(truth) * u;
    rand_err = std::max(rand_err,
                        (RandGradCentralAlong(p, one, x, 0.1, u).g - expect).cwiseAbs().maxCoeff());
    const Vector v = UniformBox(d, 1.0, rng);
    hv_err = std::max(hv_err, (EstimateHessianVector(p, 0, x, v, 0.1).hv - h * v).cwiseAbs().maxCoeff());
  }
  out.push_back(AtMost(suite, "quadratic_exact coord_central", coord_err, 1e-9,
                       "max |g_coord - grad f| <= 1e-9 on quadratics"));
  out.push_back(AtMost(suite, "quadratic_exact rand_central", rand_err, 1e-9,
                       "max |g_rand - d (u.grad f) u| <= 1e-9 on quadratics"));
  out.push_back(AtMost(suite, "quadratic_exact hessian_vector", hv_err, 1e-9,
                       "max |Hv_est - H v| <= 1e-9 on quadratics"));

  std::size_t mismatches = 0;
  for (int d : {1, 3, 8}) {
    auto p = MakeQuadraticSum({Matrix::Identity(d, d), 2.0 * Matrix::Identity(d, d),
                               Matrix::Identity(d, d)},
                              {Vector::Zero(d), Vector::Ones(d), -Vector::Ones(d)});
    Rng r(d);
    const Vector x = Vector::Ones(d);
    for (std::size_t b : {1, 2, 5}) {
      const Batch batch = SampleWithReplacement(3, b, r);
      auto charge = [&](auto&& call, std::uint64_t expect) {
        const std::uint64_t before = p.ledger().total();
        const std::uint64_t spent = call();
        mismatches += spent != expect || p.ledger().total() - before != expect;
      };
      charge([&] { return CoordGradCentral(p, batch, x, 0.1).queries_spent; },
             GradCost(GradVariant::kCoordCentral, d, b));
      charge([&] { return CoordGradForward(p, batch, x, 0.1).queries_spent; },
             GradCost(GradVariant::kCoordForward, d, b));
      charge([&] { return RandGradCentral(p, batch, x, 0.1, r).queries_spent; },
             GradCost(GradVariant::kRandCentral, d, b));
      charge([&] { return EstimateHessianVector(p, batch, x, x, 0.1).queries_spent; },
             HvCost(d, b, false));
      const HvCache cache = MakeHvCache(p, batch, x, 0.1);
      charge([&] { return EstimateHessianVector(p, batch, x, x, 0.1, &cache).queries_spent; },
             HvCost(d, b, true));
    }
  }
  out.push_back(AtMost(suite, "ledger_costs", static_cast<double>(mismatches), 0.0,
                       "estimator calls charging other than the closed-form cost = 0"));
}

// ---------------------------------------------------------------------------
// ncf
// ---------------------------------------------------------------------------

void NcfSuite(std::vector<CheckResult>& out) {
  const std::string suite = "ncf";
  const int d = 20;
  const double delta = 0.5, p_fail = 0.05;
  Rng gen(5);
  const Matrix neg = RotatedSpectrum(d, -1.0, 0.5, gen);
  const Matrix psd = RotatedSpectrum(d, 0.1, 0.1, gen);
  auto pn = MakeQuadratic(neg, Vector::Zero(d));
  auto pp = MakeQuadratic(psd, Vector::Zero(d));
  NcfParams params;
  params.delta = delta;
  params.p = p_fail;
  const Vector x0 = Vector::Zero(d);
  auto quotient = [&](const Vector& v) { return v.dot(neg * v); };
  const std::string targets =
      "targets: 1-p = " + Fmt("%.2f", 1.0 - p_fail) + ", weak 2/3";

  const int runs = 100;
  int on_ok = 0, on_bottom = 0, det_ok = 0, det_bottom = 0;
  for (int seed = 0; seed < runs; ++seed) {
    Rng r1(seed), r2(seed + 1000), r3(seed), r4(seed + 1000);
    const auto a = NcfOnline(pn, x0, params, r1);
    on_ok += a.found() && quotient(*a.direction) <= -delta / 2;
    on_bottom += !NcfOnline(pp, x0, params, r2).found();
    const auto b = NcfDeterministic(pn, x0, params, r3);
    det_ok += b.found() && quotient(*b.direction) <= -delta / 2;
    det_bottom += !NcfDeterministic(pp, x0, params, r4).found();
  }
  auto rate = [&](int k) { return static_cast<double>(k) / runs; };
  out.push_back(AtLeast(suite, "online_success_rate", rate(on_ok), 0.9,
                        "P[direction with v'Hv <= -delta/2] >= 0.9", targets));
  out.push_back(AtLeast(suite, "online_bottom_rate", rate(on_bottom), 0.9,
                        "P[bottom on lambda_min >= 0.1] >= 0.9", targets));
  out.push_back(AtLeast(suite, "deterministic_success_rate", rate(det_ok), 0.9,
                        "P[direction with v'Hv <= -delta/2] >= 0.9", targets));
  out.push_back(AtLeast(suite, "deterministic_bottom_rate", rate(det_bottom), 0.9,
                        "P[bottom on lambda_min >= 0.1] >= 0.9", targets));

  const int weak_runs = 150;
  int weak_ok = 0;
  for (int seed = 0; seed < weak_runs; ++seed) {
    Rng r(seed);
    const auto w = NcfOnlineWeak(pn, x0, params, r);
    weak_ok += w.found() && quotient(*w.direction) <= -delta / 2;
  }
  const double se = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / weak_runs);
  out.push_back(AtLeast(suite, "weak_success_rate",
                        static_cast<double>(weak_ok) / weak_runs, 2.0 / 3.0 - 3.0 * se,
                        "P[weak direction with v'Hv <= -delta/2] >= 2/3 - 3 SE", targets));

  double worst = 0.0;
  for (int dim : {2, 7, 20}) {
    Rng g2(dim);
    const Matrix h = RotatedSpectrum(dim, -0.3, -0.2, g2);
    auto p = MakeQuadratic(h, Vector::Zero(dim), 0.0, 1.0);
    NcfParams cp;
    cp.delta = 0.2;
    cp.p = 0.1;
    cp.radius = std::numeric_limits<double>::infinity();
    cp.iterations = 25;
    Rng rng(11);
    NcfTrace trace;
    NcfDeterministic(p, Vector::Zero(dim), cp, rng, &trace);
    const auto sched = DeriveDeterministic(cp, p.smoothness(), dim, Vector::Zero(dim));
    Rng replay(11);
    const Vector xi = sched.sigma_pert * SampleUnitSphere(dim, replay);
    const Matrix m = Matrix::Identity(dim, dim) * (1.0 - 0.75 * cp.delta) - h;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    Vector poly(dim);
    for (int j = 0; j < dim; ++j) poly[j] = ChebyshevScalar(25, eig.eigenvalues()[j]);
    const Vector dense =
        eig.eigenvectors() * poly.asDiagonal() * eig.eigenvectors().transpose() * xi;
    worst = std::max(worst, (trace.final_displacement - dense).norm() / dense.norm());
  }
  out.push_back(AtMost(suite, "chebyshev_equivalence", worst, 1e-8,
                       "||y_T - T_T(M) xi|| / ||T_T(M) xi|| <= 1e-8"));
}

// ---------------------------------------------------------------------------
// ledger audits shared by the solver and baseline suites
// ---------------------------------------------------------------------------

void AuditSuite(const std::string& suite, const ExperimentConfig& config,
                std::vector<CheckResult>& out) {
  const BlackBoxProblem base = BuildProblem(config.problem);
  for (const auto& alg : config.algorithms) {
    BlackBoxProblem p1 = base.Fork();
    p1.set_smoothness(AlgorithmSmoothness(alg, base.smoothness()));
    BlackBoxProblem p2 = base.Fork();
    p2.set_smoothness(p1.smoothness());
    const LedgerAudit a = AuditLedger(p1, config, alg, 3);
    const SolverReport b = RunAlgorithm(p2, config, alg, 3);

    const double diff = std::abs(static_cast<double>(a.ledger_total) -
                                 static_cast<double>(a.closed_form_total));
    out.push_back(AtMost(suite, "ledger_audit " + alg.label, diff, 0.0,
                         "|ledger total - closed-form event sum| = 0",
                         std::to_string(a.events) + " events, " +
                             std::to_string(a.report.count(Event::kNcfCall)) + " ncf calls, " +
                             std::to_string(a.ledger_total) + " queries, " +
                             std::to_string(a.mismatched_events) + " mismatched"));
    if (config.budget) {
      const double over = static_cast<double>(a.ledger_total) - static_cast<double>(*config.budget);
      out.push_back(AtMost(suite, "budget_overshoot " + alg.label, std::max(0.0, over),
                           static_cast<double>(a.max_event_cost),
                           "queries beyond the budget <= largest single step"));
    }
    std::size_t differ = a.report.trajectory.size() != b.trajectory.size() ? 1 : 0;
    for (std::size_t i = 0; !differ && i < b.trajectory.size(); ++i) {
      const auto& x = a.report.trajectory[i];
      const auto& y = b.trajectory[i];
      differ += x.queries != y.queries || x.f != y.f || x.event != y.event;
    }
    differ += a.report.x != b.x;
    out.push_back(AtMost(suite, "determinism " + alg.label, static_cast<double>(differ), 0.0,
                         "repeated seeded runs differ = 0"));
  }
}

AlgorithmSpec Alg(std::string name, std::string label, ParamMap params = {}) {
  return {std::move(name), std::move(label), std::move(params)};
}

void SolverSuite(std::vector<CheckResult>& out) {
  const std::string suite = "solvers";
  {
    // f(x) = −(δ/2)x² + (ρ/6)x³ at the saddle: λ_min = −δ exactly.
    const double delta = 0.5, rho = 1.0;
    auto p = MakePerturbedQuadratic(Matrix::Constant(1, 1, -delta), rho);
    Rng rng(7);
    const Vector x = Vector::Zero(1), v = Vector::Ones(1);
    const int draws = 2000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double dec = p.OracleValue(x) - p.OracleValue(NegativeCurvatureStep(x, v, delta, rho, rng));
      sum += dec;
      sq += dec * dec;
    }
    const double mean = sum / draws;
    const double se = std::sqrt(std::max(0.0, sq / draws - mean * mean) / draws);
    out.push_back(AtLeast(suite, "nc_step_mean_decrease", mean,
                          delta * delta * delta / (12.0 * rho * rho) - 3.0 * se,
                          "mean decrease >= delta^3/(12 rho^2) - 3 SE"));
  }
  {
    const std::size_t B = 128, b = 10;
    const double theta = EpochContinueProbability(GradOption::kCoord, B, b, 20);
    Rng rng(11);
    double sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(SampleEpochLength(theta, rng));
    const double target = static_cast<double>(B) / b;
    out.push_back(AtMost(suite, "scsg_epoch_mean", std::abs(sum / draws - target) / target, 0.05,
                         "|mean N - B/b| / (B/b) <= 0.05"));
  }

  ExperimentConfig c;
  c.name = "solver-audit";
  c.problem = {"cubic-stoch", {{"dimension", std::int64_t{5}},
                               {"components", std::int64_t{16}},
                               {"instance_seed", std::int64_t{1}}}};
  c.epsilon = 0.5;
  c.budget = 300000;
  c.sample_every = 5000;
  const ParamValue eta = 0.1;
  c.algorithms = {
      Alg("zo-gd-ncf", "gd"),
      Alg("zo-gd-ncf", "gd-rand", {{"option", std::string("rand")}}),
      Alg("zo-sgd-ncf", "sgd", {{"batch", std::int64_t{8}}, {"ncf.eta", eta}}),
      Alg("zo-sgd-ncf", "sgd-rand",
          {{"batch", std::int64_t{8}}, {"option", std::string("rand")}, {"ncf.eta", eta}}),
      Alg("zo-scsg-ncf", "scsg",
          {{"big_batch", std::int64_t{12}}, {"mini_batch", std::int64_t{4}}, {"ncf.eta", eta}}),
      Alg("zo-scsg-ncf", "scsg-ii",
          {{"big_batch", std::int64_t{12}}, {"mini_batch", std::int64_t{4}},
           {"option", std::string("rand")}, {"ncf.eta", eta}}),
      Alg("zo-spider-ncf", "spider", {{"s2", std::int64_t{3}}, {"ncf.eta", eta}}),
      Alg("zo-spider-ncf", "spider-greedy",
          {{"s2", std::int64_t{3}}, {"greedy_sign", true}, {"ncf.eta", eta}}),
      Alg("zo-spider-coord", "spider-coord", {{"s2", std::int64_t{3}}, {"epsilon", 0.05}}),
  };
  AuditSuite(suite, c, out);
}

void BaselineSuite(std::vector<CheckResult>& out) {
  const std::string suite = "baselines";
  {
    const int d = 6;
    Vector diag = Vector::Ones(d);
    diag[2] = -1.0;
    auto p = MakeQuadratic(Matrix(diag.asDiagonal()), Vector::Zero(d), 0.0, 1.0);
    Rng rng(4);
    DfpiParams dp;
    dp.iterations = 60;
    const Vector s = Dfpi(p, Vector::Zero(d), dp, rng);
    out.push_back(AtMost(suite, "dfpi_alignment", 1.0 - std::abs(s[2]), 1e-6,
                         "1 - |<s, e_min>| <= 1e-6"));
  }

  ExperimentConfig c;
  c.name = "baseline-audit";
  c.problem = {"octopus", {{"dimension", std::int64_t{3}}}};
  c.epsilon = 1e-2;
  c.budget = 60000;
  c.sample_every = 1000;
  c.algorithms = {
      Alg("zpsgd", "zpsgd", {{"m", std::int64_t{4}}}),
      Alg("pagd", "pagd"),
      Alg("rspi", "rspi", {{"dfpi.iterations", std::int64_t{5}}}),
  };
  AuditSuite(suite, c, out);
}

}  // namespace

const std::vector<std::string>& SuiteNames() {
  static const std::vector<std::string> names{"estimators", "ncf", "solvers", "baselines"};
  return names;
}

std::vector<CheckResult> RunInvariants(const std::string& suite, const CheckOptions& options) {
  const bool all = suite == "all";
  if (!all && std::find(SuiteNames().begin(), SuiteNames().end(), suite) == SuiteNames().end()) {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  std::vector<CheckResult> out;
  if (all || suite == "estimators") EstimatorSuite(options, out);
  if (all || suite == "ncf") NcfSuite(out);
  if (all || suite == "solvers") SolverSuite(out);
  if (all || suite == "baselines") BaselineSuite(out);
  return out;
}

bool AllPassed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::string ReportJson(const std::vector<CheckResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j{{"suite", r.suite},
                     {"test", r.test},
                     {"status", r.passed ? "pass" : "fail"},
                     {"observed", r.observed},
                     {"bound", r.bound},
                     {"relation", r.relation == Relation::kAtMost ? "<=" : ">="},
                     {"inequality", r.inequality}};
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string ReportText(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.suite << ' ' << r.test << "  observed "
       << Fmt("%.6g", r.observed) << (r.relation == Relation::kAtMost ? " <= " : " >= ")
       << Fmt("%.6g", r.bound);
    if (!r.passed) os << "  violated: " << r.inequality;
    if (!r.note.empty()) os << "  [" << r.note << "]";
    os << '\n';
  }
  const auto failed = std::count_if(results.begin(), results.end(),
                                    [](const auto& r) { return !r.passed; });
  os << results.size() - failed << '/' << results.size() << " passed\n";
  return os.str();
}

CostModel MakeCostModel(const BlackBoxProblem& problem, const ExperimentConfig& config,
                        const AlgorithmSpec& algorithm) {
  CostModel m;
  m.algorithm = algorithm.name;
  m.dimension = problem.dimension();
  m.components = problem.component_count();
  if (IsSolver(algorithm.name)) {
    const SolverParams p = MakeSolverParams(config, algorithm);
    m.option = p.option;
    m.greedy_sign = p.greedy_sign;
    if (algorithm.name == "zo-scsg-ncf") m.big_batch = ResolveScsgNcf(p, problem).big_batch;
  }
  return m;
}

std::uint64_t ExpectedEventCost(const CostModel& m, const StepInfo& s, bool first_event) {
  const std::uint64_t d = static_cast<std::uint64_t>(m.dimension);
  const std::uint64_t n = m.components;
  const std::uint64_t b = std::min<std::uint64_t>(s.batch, n);
  const bool spider = m.algorithm == "zo-spider-ncf" || m.algorithm == "zo-spider-coord";
  const std::uint64_t grad = m.option == GradOption::kCoord ? 2 * d : 2;  // per component
  const std::uint64_t ncf_online = 4 * d * (s.ncf_iterations.value_or(0) +
                                            s.ncf_probe_components.value_or(0));
  switch (s.event) {
    case Event::kVerify:
      if (m.algorithm == "pagd") return (d + 1) * n;
      return spider ? 4 * d * b : 2 * d * b;
    case Event::kDescent:
      if (m.algorithm == "pagd") return (d + 1) * n;
      if (m.algorithm == "zpsgd") return (s.batch + 1) * n;
      return spider ? 4 * d * b : grad * b;
    case Event::kRefresh:
      return 2 * d * b;
    case Event::kEpoch: {
      const std::uint64_t big = std::min<std::uint64_t>(m.big_batch, n);
      return 2 * d * big + s.inner_steps * 2 * grad * b;
    }
    case Event::kNcfCall:
      if (m.algorithm == "rspi" || m.algorithm == "zo-gd-ncf") return 4 * d * n * s.ncf_iterations.value_or(0);
      if (m.algorithm == "zo-spider-ncf" && m.greedy_sign && s.ncf_found.value_or(false)) {
        return ncf_online + 2 * n;
      }
      return ncf_online;
    case Event::kNcStep:
      if (spider) return 4 * d * b;
      return m.greedy_sign ? 2 * n : 0;
    case Event::kSearch:
      return first_event ? n : 2 * n;
    case Event::kPerturb:
      return n * (1 + s.ncf_iterations.value_or(0) + (d + 1) * s.inner_steps);
    default:
      return 0;
  }
}

LedgerAudit AuditLedger(const BlackBoxProblem& problem, const ExperimentConfig& config,
                        const AlgorithmSpec& algorithm, std::uint64_t seed,
                        const std::optional<Vector>& x0) {
  const CostModel model = MakeCostModel(problem, config, algorithm);
  LedgerAudit audit;
  auto observer = [&](const StepInfo& s) {
    const std::uint64_t expect = ExpectedEventCost(model, s, audit.events == 0);
    audit.closed_form_total += expect;
    audit.max_event_cost = std::max(audit.max_event_cost, expect);
    audit.mismatched_events += expect != s.queries;
    ++audit.events;
  };
  audit.report = RunAlgorithm(problem, config, algorithm, seed, x0, observer);
  audit.ledger_total = audit.report.query_total;
  return audit;
}

}  // namespace zoncf::harness
