#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "zoncf/estimators.h"
#include "zoncf/libsvm.h"
#include "zoncf/problems.h"

using namespace zoncf;
using Eigen::Vector2d;

namespace {

double MinEigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// Plain central differences on the uncounted oracle value.
Vector NumericGradient(const BlackBoxProblem& p, const Vector& x, double h) {
  Vector g(x.size());
  Vector w = x;
  for (long j = 0; j < x.size(); ++j) {
    w[j] = x[j] + h;
    const double fp = p.OracleValue(w);
    w[j] = x[j] - h;
    const double fm = p.OracleValue(w);
    w[j] = x[j];
    g[j] = (fp - fm) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("ledger charges one query per evaluation") {
  auto p = MakeSumOfCubes(3);
  const Vector x = Vector::Ones(3);
  CHECK(p.Evaluate(0, x) == doctest::Approx(3.0));
  p.Evaluate(0, x, Phase::kNcf);
  p.Evaluate(0, x, Phase::kVerification);
  auto snap = p.ledger().Snapshot();
  CHECK(snap.total == 3);
  CHECK(snap[Phase::kGradient] == 1);
  CHECK(snap[Phase::kNcf] == 1);
  CHECK(snap[Phase::kVerification] == 1);

  p.OracleValue(x);
  CHECK(p.ledger().total() == 3);

  auto forked = p.Fork();
  CHECK(forked.ledger().total() == 0);
  CHECK(forked.OracleValue(x) == p.OracleValue(x));
  CHECK_THROWS_AS(p.Evaluate(1, x), std::out_of_range);
}

TEST_CASE("ledger full evaluation costs n queries") {
  std::vector<Matrix> hs(4, Matrix::Identity(2, 2));
  std::vector<Vector> gs;
  for (int i = 0; i < 4; ++i) gs.push_back(Vector::Constant(2, i));
  auto p = MakeQuadraticSum(hs, gs);
  const Vector x = Vector::Ones(2);
  // mean of (1 + 2i) over i = 0..3
  CHECK(p.EvaluateFull(x) == doctest::Approx(4.0));
  CHECK(p.ledger().total() == 4);
}

TEST_CASE("ledger is consistent under concurrent charging") {
  auto p = MakeSumOfCubes(2);
  const Vector x = Vector::Zero(2);
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&p, &x, t] {
      for (int k = 0; k < 2500; ++k) p.Evaluate(0, x, static_cast<Phase>(t));
    });
  }
  for (auto& w : workers) w.join();
  const auto snap = p.ledger().Snapshot();
  CHECK(snap.total == 10000);
  std::uint64_t sum = 0;
  for (auto v : snap.by_phase) sum += v;
  CHECK(sum == snap.total);
}

TEST_CASE("smoothness profile validation") {
  SmoothnessProfile s;
  s.ell = 0.0;
  CHECK_THROWS(s.Validate());
  s.ell = 1.0;
  s.rho = -1.0;
  CHECK_THROWS(s.Validate());
  s.rho = 0.0;
  CHECK_NOTHROW(s.Validate());
}

TEST_CASE("octopus origin is a strict saddle") {
  auto p = MakeOctopus(10, std::numbers::e, std::numbers::e, 1.0);
  const Vector origin = Vector::Zero(10);
  CHECK(p.hooks().gradient(origin).norm() == 0.0);
  CHECK(p.OracleValue(origin) == 0.0);

  auto p2 = MakeOctopus(2, std::numbers::e, std::numbers::e, 1.0);
  const double lmin = MinEigen(p2.hooks().hessian(Vector::Zero(2)));
  CHECK(lmin < 0.0);
  CHECK(lmin == doctest::Approx(-2.0));
}

TEST_CASE("octopus sign symmetry") {
  const double tau = std::numbers::e;
  auto p = MakeOctopus(2, tau, std::numbers::e, 1.0);
  Vector a(2), b(2);
  a << 4 * tau, 4 * tau;
  b << -4 * tau, -4 * tau;
  CHECK(p.OracleValue(a) == p.OracleValue(b));
  Vector c(2), e(2);
  c << 1.3, -5.1;
  e << -1.3, 5.1;
  CHECK(p.OracleValue(c) == p.OracleValue(e));
}

TEST_CASE("octopus corners are local minima") {
  const double tau = std::numbers::e;
  for (int d = 2; d <= 6; ++d) {
    OctopusParams params{d, tau, std::numbers::e, 1.0};
    auto p = MakeOctopus(params);
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vector x(d);
      for (int j = 0; j < d; ++j) x[j] = (mask >> j & 1) ? 4 * tau : -4 * tau;
      CHECK(p.hooks().gradient(x).norm() < 1e-8);
      CHECK(MinEigen(p.hooks().hessian(x)) > 0.0);
      CHECK(p.OracleValue(x) == doctest::Approx(OctopusMinimumValue(params)));
    }
  }
}

TEST_CASE("octopus zone offset") {
  const double tau = std::numbers::e, L = std::numbers::e, gamma = 1.0;
  // ν = −g1(2τ) + 4Lτ² with g1(2τ) = −4γτ² + (−14L + 10γ)τ²/3 + (5L − 3γ)τ²/2.
  const double g1 = -4 * gamma * tau * tau + (-14 * L + 10 * gamma) * tau * tau / 3 +
                    (5 * L - 3 * gamma) * tau * tau / 2;
  const double nu = -g1 + 4 * L * tau * tau;
  CHECK(OctopusNu({3, tau, L, gamma}) == doctest::Approx(nu).epsilon(1e-12));
  CHECK(nu == doctest::Approx(139.86).epsilon(1e-4));
}

TEST_CASE("octopus gradient hook matches finite differences") {
  const double tau = std::numbers::e;
  auto p = MakeOctopus(4, tau, std::numbers::e, 1.0);
  Rng rng(3);
  std::uniform_real_distribution<double> u(-5 * tau, 5 * tau);
  for (int k = 0; k < 50; ++k) {
    Vector x(4);
    for (auto& v : x) v = u(rng);
    const Vector g = p.hooks().gradient(x);
    CHECK((g - NumericGradient(p, x, 1e-6)).norm() <= 1e-4 * (1 + g.norm()));
  }
}

TEST_CASE("octopus is continuously differentiable across zone edges") {
  const double tau = std::numbers::e;
  auto p = MakeOctopus(3, tau, std::numbers::e, 1.0);
  for (double edge : {tau, 2 * tau}) {
    Vector lo(3), hi(3);
    lo << edge - 1e-9, 0.7, -0.4;
    hi << edge + 1e-9, 0.7, -0.4;
    CHECK(p.OracleValue(lo) == doctest::Approx(p.OracleValue(hi)).epsilon(1e-8));
    CHECK((p.hooks().gradient(lo) - p.hooks().gradient(hi)).norm() < 1e-6);
  }
}

TEST_CASE("octopus rejects bad parameters") {
  CHECK_THROWS(MakeOctopus(1, 1.0, 1.0, 1.0));
  CHECK_THROWS(MakeOctopus(3, 0.0, 1.0, 1.0));
  CHECK_THROWS(MakeOctopus(3, 1.0, -1.0, 1.0));
  CHECK_THROWS(MakeOctopus(3, 1.0, 1.0, 0.0));
}

TEST_CASE("cubic regularization values") {
  Matrix A = Vector2d(1.0, -1.0).asDiagonal();
  auto p = MakeCubicReg(A, Vector::Zero(2), 0.5);
  CHECK(p.OracleValue(Vector::Zero(2)) == 0.0);
  CHECK(p.hooks().gradient(Vector::Zero(2)).norm() == 0.0);
  CHECK(p.OracleValue(Vector2d(1.0, 0.0)) == doctest::Approx(2.0 / 3.0));

  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = 1e-6;
  CHECK_THROWS(MakeCubicReg(bad, Vector::Zero(2), 0.5));
  CHECK_THROWS(MakeCubicReg(A, Vector::Zero(2), -1.0));
}

TEST_CASE("cubic regularization gradient and hessian hooks") {
  Rng rng(1);
  auto p = SampleCubicRegDeterministic(8, 4, 0.5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 20; ++k) {
    Vector x(8);
    for (auto& v : x) v = n(rng);
    CHECK((p.hooks().gradient(x) - NumericGradient(p, x, 1e-6)).norm() < 1e-5);
    Matrix num(8, 8);
    for (int j = 0; j < 8; ++j) {
      Vector e = Vector::Zero(8);
      e[j] = 1e-5;
      num.col(j) = (p.hooks().gradient(x + e) - p.hooks().gradient(x - e)) / 2e-5;
    }
    CHECK((p.hooks().hessian(x) - num).norm() < 1e-6);
  }
}

TEST_CASE("sampled cubic diagonal has a tenth of entries at -1") {
  Rng rng(7);
  const Vector diag = SampleCubicDiagonal(100, rng);
  int neg = 0;
  for (double v : diag) {
    if (v == -1.0) {
      ++neg;
    } else {
      CHECK(v >= 1.0);
      CHECK(v <= 2.0);
    }
  }
  CHECK(neg == 10);
}

TEST_CASE("stochastic cubic is reproducible from its seed") {
  auto a = SampleCubicStochasticInstance(20, 11, 0.5, 64);
  auto b = SampleCubicStochasticInstance(20, 11, 0.5, 64);
  CHECK(a.base_diagonal == b.base_diagonal);
  CHECK(a.diagonal_noise == b.diagonal_noise);
  CHECK(a.linear_noise == b.linear_noise);
  auto pa = MakeCubicRegStochastic(a);
  auto pb = MakeCubicRegStochastic(b);
  const Vector x = Vector::LinSpaced(20, -1.0, 1.0);
  for (std::size_t i = 0; i < pa.component_count(); ++i) {
    CHECK(pa.Evaluate(i, x) == pb.Evaluate(i, x));
  }
}

TEST_CASE("stochastic cubic averages to its deterministic instance") {
  auto inst = SampleCubicStochasticInstance(20, 5, 0.5);
  auto p = MakeCubicRegStochastic(inst);
  CHECK(p.component_count() == kDefaultStochasticComponents);
  const auto [A, b] = CubicStochasticMean(inst);
  auto det = MakeCubicReg(A, b, 0.5);

  CHECK(std::abs(p.OracleValue(Vector::Zero(20))) < 1e-15);
  Rng rng(2);
  std::normal_distribution<double> n;
  for (int k = 0; k < 10; ++k) {
    Vector x(20);
    for (auto& v : x) v = n(rng);
    CHECK(std::abs(p.OracleValue(x) - det.OracleValue(x)) < 1e-10);
  }
}

TEST_CASE("stochastic cubic component variance within the configured bound") {
  auto inst = SampleCubicStochasticInstance(20, 9, 0.5);
  auto p = MakeCubicRegStochastic(inst);
  const double sigma = p.smoothness().sigma_var;
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    Vector x = SampleUnitSphere(20, rng) * inst.variance_radius *
               std::uniform_real_distribution<double>(0, 1)(rng);
    const Vector g = p.hooks().gradient(x);
    double var = 0.0;
    Vector mean = Vector::Zero(20);
    for (std::size_t i = 0; i < p.component_count(); ++i) {
      const Vector gi = p.hooks().component_gradient(i, x);
      mean += gi;
      var += (gi - g).squaredNorm();
    }
    mean /= static_cast<double>(p.component_count());
    var /= static_cast<double>(p.component_count());
    CHECK((mean - g).norm() < 1e-10);
    CHECK(var <= sigma * sigma);
  }
}

TEST_CASE("libsvm parsing") {
  std::istringstream one("+1 3:0.5\n");
  auto d = ParseLibsvm(one);
  CHECK(d.rows() == 1);
  CHECK(d.dims() == 3);
  CHECK(d.labels[0] == 1.0);
  CHECK(d.features.coeff(0, 2) == 0.5);
  CHECK(d.features.coeff(0, 0) == 0.0);

  std::istringstream several("-1 1:1 4:2 # comment\n\n+1 2:3\n0 1:0.25\n");
  auto s = ParseLibsvm(several, 6);
  CHECK(s.rows() == 3);
  CHECK(s.dims() == 6);
  CHECK(s.labels[0] == 0.0);
  CHECK(s.labels[1] == 1.0);
  CHECK(s.labels[2] == 0.0);
  CHECK(s.features.coeff(0, 3) == 2.0);

  std::istringstream empty("");
  CHECK_THROWS_AS(ParseLibsvm(empty), LibsvmParseError);

  std::istringstream bad_order("+1 1:1\n+1 3:1 2:1\n");
  try {
    ParseLibsvm(bad_order);
    FAIL("expected a parse error");
  } catch (const LibsvmParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream bad_label("2 1:1\n");
  CHECK_THROWS_AS(ParseLibsvm(bad_label), LibsvmParseError);
  std::istringstream bad_pair("+1 1-1\n");
  CHECK_THROWS_AS(ParseLibsvm(bad_pair), LibsvmParseError);
  std::istringstream zero_index("+1 0:1\n");
  CHECK_THROWS_AS(ParseLibsvm(zero_index), LibsvmParseError);
  std::istringstream narrow("+1 5:1\n");
  CHECK_THROWS(ParseLibsvm(narrow, 3));
}

TEST_CASE("regularized least squares") {
  std::istringstream text("+1 1:1 2:-0.5\n-1 2:2 3:1\n+1 1:0.3 3:-1\n");
  const auto data = ParseLibsvm(text);
  auto p = MakeRegNls(data, 1.0, 1.0);
  CHECK(p.component_count() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p.Evaluate(i, Vector::Zero(3)) == doctest::Approx(0.25));
  }
  Rng rng(8);
  std::normal_distribution<double> n;
  for (int k = 0; k < 10; ++k) {
    Vector x(3);
    for (auto& v : x) v = n(rng);
    CHECK((p.hooks().gradient(x) - NumericGradient(p, x, 1e-6)).norm() < 1e-6);
    Matrix num(3, 3);
    for (int j = 0; j < 3; ++j) {
      Vector e = Vector::Zero(3);
      e[j] = 1e-5;
      num.col(j) = (p.hooks().gradient(x + e) - p.hooks().gradient(x - e)) / 2e-5;
    }
    CHECK((p.hooks().hessian(x) - num).norm() < 1e-6);
  }
  LibsvmDataset none;
  CHECK_THROWS(MakeRegNls(none, 1.0, 1.0));
}

TEST_CASE("w1a dataset when available") {
  const char* dir = std::getenv("ZONCF_DATA_DIR");
  const auto path = std::filesystem::path(dir ? dir : "") / "w1a";
  if (!dir || !std::filesystem::exists(path)) {
    MESSAGE("ZONCF_DATA_DIR/w1a not present; skipping");
    return;
  }
  const auto data = ParseLibsvmFile(path.string(), 300);
  CHECK(data.rows() == 2477);
  CHECK(data.dims() == 300);
  auto p = MakeRegNls(data, 1.0, 1.0);
  CHECK(p.OracleValue(Vector::Zero(300)) == doctest::Approx(0.25));
}
