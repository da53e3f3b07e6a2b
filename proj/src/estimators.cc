#include "zoncf/estimators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zoncf {
namespace {

void RequirePositiveMu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("smoothing parameter must be > 0");
}

void RequireBatch(const BlackBoxProblem& problem, const Batch& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  for (std::size_t i : batch) {
    if (i >= problem.component_count()) {
      throw std::out_of_range("batch index out of range");
    }
  }
}

// Σ_{i∈B} f_i(x) in batch order.
double BatchSum(const BlackBoxProblem& problem, const Batch& batch,
                const Vector& x, Phase phase) {
  double s = 0.0;
  for (std::size_t i : batch) s += problem.Evaluate(i, x, phase);
  return s;
}

}  // namespace

Batch FullBatch(std::size_t n) {
  Batch b(n);
  std::iota(b.begin(), b.end(), std::size_t{0});
  return b;
}

Batch SampleWithReplacement(std::size_t n, std::size_t size, Rng& rng) {
  if (n == 0) throw std::invalid_argument("cannot sample from empty index set");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  Batch b(size);
  for (auto& i : b) i = pick(rng);
  return b;
}

Batch SampleWithoutReplacement(std::size_t n, std::size_t size, Rng& rng) {
  if (size >= n) return FullBatch(n);
  // Partial Fisher-Yates; keeps the draw count proportional to `size`.
  Batch all = FullBatch(n);
  for (std::size_t k = 0; k < size; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(all[k], all[pick(rng)]);
  }
  all.resize(size);
  return all;
}

Vector SampleUnitSphere(int dimension, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector u(dimension);
  double norm = 0.0;
  do {
    for (int j = 0; j < dimension; ++j) u[j] = normal(rng);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

Vector SampleBall(int dimension, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector u = SampleUnitSphere(dimension, rng);
  return radius * std::pow(unit(rng), 1.0 / dimension) * u;
}

const char* GradVariantName(GradVariant v) {
  switch (v) {
    case GradVariant::kCoordCentral: return "coord-central";
    case GradVariant::kCoordForward: return "coord-forward";
    case GradVariant::kRandCentral: return "rand-central";
  }
  return "unknown";
}

std::uint64_t GradCost(GradVariant variant, int dimension, std::size_t batch) {
  const auto d = static_cast<std::uint64_t>(dimension);
  const auto b = static_cast<std::uint64_t>(batch);
  switch (variant) {
    case GradVariant::kCoordCentral: return 2 * d * b;
    case GradVariant::kCoordForward: return (d + 1) * b;
    case GradVariant::kRandCentral: return 2 * b;
  }
  return 0;
}

GradEstimate CoordGradCentral(const BlackBoxProblem& problem, const Batch& batch,
                              const Vector& x, double mu, Phase phase) {
  RequirePositiveMu(mu);
  RequireBatch(problem, batch);
  const int d = problem.dimension();
  GradEstimate est{Vector(d), GradVariant::kCoordCentral, mu,
                   GradCost(GradVariant::kCoordCentral, d, batch.size()), batch};
  Vector work = x;
  const double scale = 1.0 / (2.0 * mu * static_cast<double>(batch.size()));
  for (int j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i : batch) {
      work[j] = x[j] + mu;
      const double fp = problem.Evaluate(i, work, phase);
      work[j] = x[j] - mu;
      const double fm = problem.Evaluate(i, work, phase);
      acc += fp - fm;
    }
    work[j] = x[j];
    est.g[j] = acc * scale;
  }
  return est;
}

GradEstimate CoordGradForward(const BlackBoxProblem& problem, const Batch& batch,
                              const Vector& x, double mu, Phase phase) {
  RequirePositiveMu(mu);
  RequireBatch(problem, batch);
  const int d = problem.dimension();
  GradEstimate est{Vector::Zero(d), GradVariant::kCoordForward, mu,
                   GradCost(GradVariant::kCoordForward, d, batch.size()), batch};
  Vector work = x;
  for (std::size_t i : batch) {
    const double f0 = problem.Evaluate(i, x, phase);
    for (int j = 0; j < d; ++j) {
      work[j] = x[j] + mu;
      est.g[j] += problem.Evaluate(i, work, phase) - f0;
      work[j] = x[j];
    }
  }
  est.g /= mu * static_cast<double>(batch.size());
  return est;
}

GradEstimate RandGradCentralAlong(const BlackBoxProblem& problem,
                                  const Batch& batch, const Vector& x, double mu,
                                  const Vector& u, Phase phase) {
  RequirePositiveMu(mu);
  RequireBatch(problem, batch);
  const int d = problem.dimension();
  const double b = static_cast<double>(batch.size());
  const double fp = BatchSum(problem, batch, x + mu * u, phase) / b;
  const double fm = BatchSum(problem, batch, x - mu * u, phase) / b;
  GradEstimate est{(d * (fp - fm) / (2.0 * mu)) * u, GradVariant::kRandCentral,
                   mu, GradCost(GradVariant::kRandCentral, d, batch.size()),
                   batch};
  return est;
}

GradEstimate RandGradCentral(const BlackBoxProblem& problem, const Batch& batch,
                             const Vector& x, double mu, Rng& rng, Phase phase) {
  RequirePositiveMu(mu);
  const Vector u = SampleUnitSphere(problem.dimension(), rng);
  return RandGradCentralAlong(problem, batch, x, mu, u, phase);
}

HvCache MakeHvCache(const BlackBoxProblem& problem, const Batch& batch,
                    const Vector& x0, double mu, Phase phase) {
  RequirePositiveMu(mu);
  RequireBatch(problem, batch);
  const int d = problem.dimension();
  HvCache cache{x0, mu, batch, Vector(d), Vector(d)};
  Vector work = x0;
  const double b = static_cast<double>(batch.size());
  for (int j = 0; j < d; ++j) {
    work[j] = x0[j] + mu;
    cache.plus[j] = BatchSum(problem, batch, work, phase) / b;
    work[j] = x0[j] - mu;
    cache.minus[j] = BatchSum(problem, batch, work, phase) / b;
    work[j] = x0[j];
  }
  return cache;
}

HvEstimate EstimateHessianVector(const BlackBoxProblem& problem,
                                 const Batch& batch, const Vector& x0,
                                 const Vector& v, double mu,
                                 const HvCache* cache, Phase phase) {
  RequirePositiveMu(mu);
  RequireBatch(problem, batch);
  const int d = problem.dimension();
  const bool cached = cache != nullptr && cache->mu == mu &&
                      cache->batch == batch && cache->base == x0;
  HvEstimate est{Vector(d), mu, x0, v, HvCost(d, batch.size(), cached)};

  const double b = static_cast<double>(batch.size());
  const Vector shifted = x0 + v;
  Vector at_shift = shifted;
  Vector at_base = x0;
  for (int j = 0; j < d; ++j) {
    at_shift[j] = shifted[j] + mu;
    const double sp = BatchSum(problem, batch, at_shift, phase);
    at_shift[j] = shifted[j] - mu;
    const double sm = BatchSum(problem, batch, at_shift, phase);
    at_shift[j] = shifted[j];
    double bp, bm;
    if (cached) {
      bp = cache->plus[j];
      bm = cache->minus[j];
    } else {
      at_base[j] = x0[j] + mu;
      bp = BatchSum(problem, batch, at_base, phase) / b;
      at_base[j] = x0[j] - mu;
      bm = BatchSum(problem, batch, at_base, phase) / b;
      at_base[j] = x0[j];
    }
    est.hv[j] = ((sp - sm) / b + bm - bp) / (2.0 * mu);
  }
  return est;
}

HvEstimate EstimateHessianVector(const BlackBoxProblem& problem,
                                 std::size_t component, const Vector& x0,
                                 const Vector& v, double mu,
                                 const HvCache* cache, Phase phase) {
  return EstimateHessianVector(problem, Batch{component}, x0, v, mu, cache,
                               phase);
}

double VerifySmoothing(VerifyMode mode, double epsilon, double rho,
                       int dimension) {
  const double denom = (mode == VerifyMode::kDeterministic ? 2.0 : 4.0) *
                       EffectiveRho(rho) * std::sqrt(static_cast<double>(dimension));
  return std::sqrt(3.0 * epsilon / denom);
}

std::size_t OnlineVerifyBatchSize(double sigma, double epsilon,
                                  std::size_t iterations, double p) {
  const double base = std::max(32.0 * sigma * sigma / (epsilon * epsilon), 1.0);
  const double logs =
      std::max(std::log(2.0 * static_cast<double>(iterations) / p), 1.0);
  return static_cast<std::size_t>(std::ceil(base * logs));
}

VerifyResult VerifyGradientNorm(const BlackBoxProblem& problem, const Vector& x,
                                const VerifyOptions& options, Rng& rng,
                                Phase phase) {
  if (!(options.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const auto& s = problem.smoothness();
  const int d = problem.dimension();
  const std::size_t n = problem.component_count();

  VerifyResult result;
  result.threshold = 0.75 * options.epsilon;
  result.mu = options.mu.value_or(
      VerifySmoothing(options.mode, options.epsilon, s.rho, d));

  Batch batch;
  if (options.mode == VerifyMode::kDeterministic) {
    batch = FullBatch(n);
  } else {
    const std::size_t size = options.batch_size.value_or(OnlineVerifyBatchSize(
        s.sigma_var, options.epsilon, options.iterations, options.p));
    batch = SampleWithoutReplacement(n, std::max<std::size_t>(size, 1), rng);
  }
  result.batch_size = batch.size();

  const std::uint64_t before = problem.ledger().total();
  if (options.median_of_means && batch.size() > 1) {
    std::size_t groups = options.mom_groups;
    if (groups == 0) {
      groups = static_cast<std::size_t>(std::ceil(std::log(1.0 / options.p)));
    }
    groups = std::clamp<std::size_t>(groups, 1, batch.size());
    std::vector<Vector> means;
    const std::size_t per = batch.size() / groups;
    for (std::size_t g = 0; g < groups; ++g) {
      const auto first = batch.begin() + static_cast<long>(g * per);
      const auto last = g + 1 == groups ? batch.end() : first + static_cast<long>(per);
      means.push_back(CoordGradCentral(problem, Batch(first, last), x, result.mu,
                                       phase).g);
    }
    result.estimate = Vector(d);
    std::vector<double> column(groups);
    for (int j = 0; j < d; ++j) {
      for (std::size_t g = 0; g < groups; ++g) column[g] = means[g][j];
      std::nth_element(column.begin(), column.begin() + groups / 2, column.end());
      result.estimate[j] = column[groups / 2];
    }
  } else {
    result.estimate = CoordGradCentral(problem, batch, x, result.mu, phase).g;
  }
  result.queries_spent = problem.ledger().total() - before;
  result.estimated_norm = result.estimate.norm();
  // The boundary counts as Large: it triggers another descent step rather
  // than a premature stationarity claim.
  result.verdict = result.estimated_norm >= result.threshold
                       ? GradientVerdict::kLarge
                       : GradientVerdict::kSmall;
  return result;
}

}  // namespace zoncf
