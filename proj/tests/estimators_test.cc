#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "zoncf/estimators.h"
#include "zoncf/problems.h"

using namespace zoncf;

namespace {

BlackBoxProblem Constant(int d, double c) {
  SmoothnessProfile s;
  s.rho = 0.0;
  return BlackBoxProblem("constant", d, 1,
                         [c](std::size_t, const Vector&) { return c; }, s);
}

BlackBoxProblem Linear(const Vector& g) {
  SmoothnessProfile s;
  s.rho = 0.0;
  return BlackBoxProblem(
      "linear", static_cast<int>(g.size()), 1,
      [g](std::size_t, const Vector& x) { return g.dot(x); }, s);
}

Vector RandomVector(int d, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (auto& e : v) e = n(rng);
  return v;
}

Matrix RandomSymmetric(int d, Rng& rng) {
  Matrix m(d, d);
  std::normal_distribution<double> n;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = n(rng);
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

TEST_CASE("batch sampling") {
  Rng rng(1);
  CHECK(FullBatch(4) == Batch{0, 1, 2, 3});
  auto b = SampleWithoutReplacement(10, 6, rng);
  CHECK(b.size() == 6);
  std::sort(b.begin(), b.end());
  CHECK(std::adjacent_find(b.begin(), b.end()) == b.end());
  CHECK(SampleWithoutReplacement(5, 9, rng) == FullBatch(5));
  auto r = SampleWithReplacement(3, 50, rng);
  CHECK(r.size() == 50);
  for (auto i : r) CHECK(i < 3);
}

TEST_CASE("sphere and ball sampling") {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    CHECK(SampleUnitSphere(7, rng).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(SampleBall(7, 0.3, rng).norm() <= 0.3);
  }
}

TEST_CASE("coordinate central estimator examples") {
  auto c = Constant(3, 4.0);
  CHECK(CoordGradCentral(c, {0}, Vector::Ones(3), 0.1).g.norm() == 0.0);

  auto q = MakeQuadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector x = Eigen::Vector2d(1.0, 2.0);
  const auto est = CoordGradCentral(q, {0}, x, 0.01);
  CHECK((est.g - x).norm() < 1e-12);
  CHECK(est.variant == GradVariant::kCoordCentral);
  CHECK(est.queries_spent == 4);
  CHECK(q.ledger().total() == 4);

  auto cube = MakeSumOfCubes(1);
  const double expected = (1.1 * 1.1 * 1.1 - 0.9 * 0.9 * 0.9) / 0.2;
  CHECK(expected == doctest::Approx(3.01));
  CHECK(CoordGradCentral(cube, {0}, Vector::Ones(1), 0.1).g[0] ==
        doctest::Approx(3.01).epsilon(1e-12));
  CHECK_THROWS(CoordGradCentral(cube, {0}, Vector::Ones(1), 0.0));
  CHECK_THROWS(CoordGradCentral(cube, {}, Vector::Ones(1), 0.1));
}

TEST_CASE("coordinate forward estimator examples") {
  auto c = Constant(3, -2.0);
  CHECK(CoordGradForward(c, {0}, Vector::Ones(3), 0.1).g.norm() == 0.0);

  const Vector g = Eigen::Vector3d(0.5, -1.0, 2.0);
  auto lin = Linear(g);
  const auto est = CoordGradForward(lin, {0}, Vector::Ones(3), 0.1);
  CHECK((est.g - g).norm() < 1e-12);
  CHECK(est.queries_spent == 4);
  CHECK(lin.ledger().total() == 4);

  auto sq = MakeQuadratic(2.0 * Matrix::Identity(1, 1), Vector::Zero(1));
  CHECK(CoordGradForward(sq, {0}, Vector::Ones(1), 0.1).g[0] ==
        doctest::Approx(2.1).epsilon(1e-12));
  CHECK_THROWS(CoordGradForward(sq, {0}, Vector::Ones(1), -1.0));
}

TEST_CASE("random central estimator examples") {
  Rng rng(5);
  auto c = Constant(4, 1.0);
  for (int k = 0; k < 10; ++k) {
    CHECK(RandGradCentral(c, {0}, Vector::Ones(4), 0.1, rng).g.norm() == 0.0);
  }
  const Vector g = Eigen::Vector4d(1.0, -2.0, 0.5, 3.0);
  auto lin = Linear(g);
  const Vector u = SampleUnitSphere(4, rng);
  auto est = RandGradCentralAlong(lin, {0}, Vector::Zero(4), 0.3, u);
  CHECK((est.g - 4.0 * g.dot(u) * u).norm() < 1e-12);
  CHECK(est.queries_spent == 2);

  auto q = MakeQuadratic(Matrix::Identity(4, 4), Vector::Zero(4));
  const Vector x = Eigen::Vector4d(0.2, 1.0, -0.7, 0.1);
  for (double mu : {1e-3, 0.5, 3.0}) {
    auto e = RandGradCentralAlong(q, {0}, x, mu, u);
    CHECK((e.g - 4.0 * x.dot(u) * u).norm() < 1e-10);
  }
  CHECK_THROWS(RandGradCentral(q, {0}, x, 0.0, rng));
}

TEST_CASE("random estimator mean approaches the smoothed gradient") {
  // f(x) = Σ x_j³ has ∇f_μ(x) = 3x² + 3μ²/(d + 2) under uniform-ball
  // smoothing, the expectation of the sphere estimator.
  const int d = 3;
  auto p = MakeSumOfCubes(d);
  const Vector x = Eigen::Vector3d(0.4, -0.3, 0.8);
  const double mu = 0.5;
  Vector target = 3.0 * x.array().square().matrix();
  target.array() += 3.0 * mu * mu / (d + 2);

  Rng rng(17);
  const int draws = 100000;
  Vector mean = Vector::Zero(d);
  Vector second = Vector::Zero(d);
  for (int k = 0; k < draws; ++k) {
    const Vector g = RandGradCentral(p, {0}, x, mu, rng).g;
    mean += g;
    second += g.array().square().matrix();
  }
  mean /= draws;
  second /= draws;
  for (int j = 0; j < d; ++j) {
    const double se = std::sqrt((second[j] - mean[j] * mean[j]) / draws);
    CHECK(std::abs(mean[j] - target[j]) <= 3.0 * se);
  }
}

TEST_CASE("coordinate estimator error bound on sum of cubes") {
  Rng rng(11);
  for (int d : {1, 5, 20}) {
    auto p = MakeSumOfCubes(d);
    for (double mu : {1e-1, 1e-2, 1e-3}) {
      const double bound = std::sqrt(d) * 6.0 * mu * mu / 6.0;
      for (int k = 0; k < 50; ++k) {
        Vector x = SampleBall(d, 1.0, rng);
        const Vector g = CoordGradCentral(p, {0}, x, mu).g;
        CHECK((g - p.hooks().gradient(x)).norm() <= bound * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("forward estimator error bound") {
  Rng rng(12);
  auto p = MakePerturbedQuadratic(RandomSymmetric(6, rng), 0.0);
  const double ell = p.smoothness().ell;
  for (double mu : {1e-1, 1e-2}) {
    for (int k = 0; k < 20; ++k) {
      const Vector x = RandomVector(6, rng);
      const Vector g = CoordGradForward(p, {0}, x, mu).g;
      CHECK((g - p.hooks().gradient(x)).norm() <= ell * std::sqrt(6.0) * mu);
    }
  }
}

TEST_CASE("hessian-vector estimator examples") {
  Matrix A = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  auto q = MakeQuadratic(A, Vector::Zero(2));
  const auto est = EstimateHessianVector(q, std::size_t{0}, Vector::Zero(2),
                                         Eigen::Vector2d(0.1, 0.1), 0.01);
  CHECK((est.hv - Eigen::Vector2d(0.1, -0.1)).norm() < 1e-12);
  CHECK(est.queries_spent == 8);
  CHECK(q.ledger().total() == 8);

  const auto zero = EstimateHessianVector(q, std::size_t{0}, Vector::Ones(2),
                                          Vector::Zero(2), 0.01);
  CHECK(zero.hv.norm() == 0.0);

  auto cube = MakeSumOfCubes(1);
  const auto c = EstimateHessianVector(cube, std::size_t{0}, Vector::Zero(1),
                                       Vector::Constant(1, 0.1), 0.1);
  CHECK(c.hv[0] == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(std::abs(c.hv[0]) <= 6.0 * (0.005 + 0.01 / 3.0));
  CHECK_THROWS(EstimateHessianVector(cube, std::size_t{0}, Vector::Zero(1),
                                     Vector::Ones(1), 0.0));
}

TEST_CASE("hessian-vector cache halves the cost and preserves the value") {
  Rng rng(21);
  auto p = MakePerturbedQuadratic(RandomSymmetric(5, rng), 2.0);
  const Vector x0 = RandomVector(5, rng);
  const Vector v = RandomVector(5, rng, 0.1);
  const auto fresh = EstimateHessianVector(p, std::size_t{0}, x0, v, 1e-3);
  const auto cache = MakeHvCache(p, {0}, x0, 1e-3);
  const auto before = p.ledger().total();
  const auto cached = EstimateHessianVector(p, std::size_t{0}, x0, v, 1e-3, &cache);
  CHECK(p.ledger().total() - before == 10);
  CHECK(cached.queries_spent == 10);
  CHECK((cached.hv - fresh.hv).norm() < 1e-12);

  // A cache built for another smoothing is ignored.
  const auto other = EstimateHessianVector(p, std::size_t{0}, x0, v, 2e-3, &cache);
  CHECK(other.queries_spent == 20);
}

TEST_CASE("hessian-vector error bound sweep") {
  Rng rng(31);
  for (int d : {1, 5, 20}) {
    auto p = MakeSumOfCubes(d);
    for (double mu : {1e-1, 1e-2, 1e-3}) {
      for (int k = 0; k < 30; ++k) {
        const Vector x0 = SampleBall(d, 1.0, rng);
        const Vector v = SampleBall(d, 0.5, rng);
        const Vector hv = EstimateHessianVector(p, std::size_t{0}, x0, v, mu).hv;
        const Vector truth = p.hooks().hessian(x0) * v;
        const double bound = 6.0 * (v.squaredNorm() / 2 + std::sqrt(d) * mu * mu / 3);
        CHECK((hv - truth).norm() <= bound * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("central estimators are exact on quadratics") {
  Rng rng(41);
  for (int k = 0; k < 30; ++k) {
    const int d = 1 + k % 8;
    const Matrix H = RandomSymmetric(d, rng);
    const Vector g = RandomVector(d, rng);
    auto q = MakeQuadratic(H, g, 1.5);
    const Vector x = RandomVector(d, rng);
    const Vector v = RandomVector(d, rng);
    for (double mu : {1e-3, 0.1, 2.0}) {
      CHECK((CoordGradCentral(q, {0}, x, mu).g - (H * x + g)).norm() < 1e-9);
      const Vector u = SampleUnitSphere(d, rng);
      const Vector expect = d * (H * x + g).dot(u) * u;
      CHECK((RandGradCentralAlong(q, {0}, x, mu, u).g - expect).norm() < 1e-9);
      CHECK((EstimateHessianVector(q, std::size_t{0}, x, v, mu).hv - H * v).norm() <
            1e-9);
    }
  }
}

TEST_CASE("advertised costs match the ledger") {
  Rng rng(51);
  std::vector<Matrix> hs;
  std::vector<Vector> gs;
  for (int i = 0; i < 6; ++i) {
    hs.push_back(RandomSymmetric(4, rng));
    gs.push_back(RandomVector(4, rng));
  }
  auto p = MakeQuadraticSum(hs, gs);
  std::uniform_int_distribution<int> size(1, 9);
  for (int k = 0; k < 100; ++k) {
    const Batch b = SampleWithReplacement(6, size(rng), rng);
    const Vector x = RandomVector(4, rng);
    auto before = p.ledger().total();
    switch (k % 4) {
      case 0: {
        auto e = CoordGradCentral(p, b, x, 0.1);
        CHECK(e.queries_spent == GradCost(GradVariant::kCoordCentral, 4, b.size()));
        CHECK(p.ledger().total() - before == e.queries_spent);
        break;
      }
      case 1: {
        auto e = CoordGradForward(p, b, x, 0.1);
        CHECK(e.queries_spent == 5 * b.size());
        CHECK(p.ledger().total() - before == e.queries_spent);
        break;
      }
      case 2: {
        auto e = RandGradCentral(p, b, x, 0.1, rng);
        CHECK(e.queries_spent == 2 * b.size());
        CHECK(p.ledger().total() - before == e.queries_spent);
        break;
      }
      default: {
        auto e = EstimateHessianVector(p, b, x, RandomVector(4, rng), 0.1);
        CHECK(e.queries_spent == 16 * b.size());
        CHECK(p.ledger().total() - before == e.queries_spent);
        break;
      }
    }
  }
}

TEST_CASE("batch mean equals the mean of component estimates") {
  Rng rng(61);
  std::vector<Matrix> hs;
  std::vector<Vector> gs;
  for (int i = 0; i < 3; ++i) {
    hs.push_back(RandomSymmetric(3, rng));
    gs.push_back(RandomVector(3, rng));
  }
  auto p = MakeQuadraticSum(hs, gs);
  const Vector x = RandomVector(3, rng);
  const Vector g = CoordGradCentral(p, FullBatch(3), x, 0.1).g;
  CHECK((g - p.hooks().gradient(x)).norm() < 1e-10);
}

TEST_CASE("gradient norm verification") {
  Rng rng(71);
  OctopusParams params{4, std::numbers::e, std::numbers::e, 1.0};
  auto octo = MakeOctopus(params);
  const Vector corner = Vector::Constant(4, 4 * params.tau);
  VerifyOptions det;
  det.epsilon = 1e-2;
  auto r = VerifyGradientNorm(octo, corner, det, rng);
  CHECK(r.verdict == GradientVerdict::kSmall);
  CHECK(r.queries_spent == 2 * 4);
  CHECK(r.mu == doctest::Approx(std::sqrt(3 * 1e-2 / (2 * std::numbers::e * 2))));

  // Stochastic cubic at a point with ||∇f|| = 10ε.
  auto inst = SampleCubicStochasticInstance(20, 3, 0.5);
  auto p = MakeCubicRegStochastic(inst);
  const double eps = 0.05;
  Vector x = Vector::Zero(20);
  {
    const Vector g0 = p.hooks().gradient(x);
    // Walk along the gradient at the origin until the norm hits 10ε.
    double lo = 0.0, hi = 5.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double n = p.hooks().gradient(mid * g0.normalized()).norm();
      (n < 10 * eps ? lo : hi) = mid;
      if (std::abs(n - 10 * eps) < 1e-12) break;
    }
    x = lo * g0.normalized();
    if (p.hooks().gradient(x).norm() < 10 * eps) x = hi * g0.normalized();
  }
  REQUIRE(p.hooks().gradient(x).norm() >= 10 * eps - 1e-9);
  VerifyOptions online;
  online.epsilon = eps;
  online.mode = VerifyMode::kOnline;
  online.p = 0.01;
  online.iterations = 100;
  online.batch_size = 64;
  int large = 0;
  for (int s = 0; s < 100; ++s) {
    Rng seeded(s);
    large += VerifyGradientNorm(p, x, online, seeded).verdict ==
             GradientVerdict::kLarge;
  }
  CHECK(large == 100);

  // Theory batch size saturates at n.
  online.batch_size.reset();
  auto full = VerifyGradientNorm(p, x, online, rng);
  CHECK(full.batch_size == p.component_count());
  CHECK(OnlineVerifyBatchSize(1.0, 0.5, 10, 0.01) ==
        static_cast<std::size_t>(std::ceil(128.0 * std::log(2000.0))));
  CHECK(OnlineVerifyBatchSize(0.0, 0.5, 10, 0.01) ==
        static_cast<std::size_t>(std::ceil(std::log(2000.0))));
}

TEST_CASE("verification boundary counts as large") {
  // Linear f with μ = 0.5: every difference is exact in binary, so ||ĝ||
  // lands exactly on the 3ε/4 threshold.
  Rng rng(81);
  VerifyOptions o;
  o.epsilon = 0.5;
  o.mu = 0.5;
  auto on = Linear(Eigen::Vector2d(0.375, 0.0));
  auto r = VerifyGradientNorm(on, Vector::Zero(2), o, rng);
  CHECK(r.threshold == 0.375);
  CHECK(r.estimated_norm == 0.375);
  CHECK(r.verdict == GradientVerdict::kLarge);
  auto below = Linear(Eigen::Vector2d(0.37, 0.0));
  CHECK(VerifyGradientNorm(below, Vector::Zero(2), o, rng).verdict ==
        GradientVerdict::kSmall);
}

TEST_CASE("median-of-means verification") {
  Rng rng(91);
  auto p = SampleCubicRegStochastic(10, 2, 0.5, 64);
  VerifyOptions o;
  o.epsilon = 0.1;
  o.mode = VerifyMode::kOnline;
  o.batch_size = 64;
  o.median_of_means = true;
  o.mom_groups = 4;
  const Vector x = Vector::Constant(10, 0.3);
  auto r = VerifyGradientNorm(p, x, o, rng);
  CHECK(r.queries_spent == 2 * 10 * 64);
  CHECK((r.estimate - p.hooks().gradient(x)).norm() < 1.0);
}
