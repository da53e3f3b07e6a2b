#include "zoncf/problems.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace zoncf {
namespace {

constexpr double kSymmetryTolerance = 1e-12;

double SpectralRadius(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Cubic regularizer shared by the deterministic and stochastic instances.
double CubicTerm(double alpha, const Vector& w) {
  const double n = w.norm();
  return alpha / 3.0 * n * n * n;
}

Vector CubicTermGradient(double alpha, const Vector& w) {
  return alpha * w.norm() * w;
}

Matrix CubicTermHessian(double alpha, const Vector& w) {
  const int d = static_cast<int>(w.size());
  const double n = w.norm();
  Matrix h = alpha * n * Matrix::Identity(d, d);
  if (n > 0.0) h += alpha / n * w * w.transpose();
  return h;
}

double Logistic(double s) { return 1.0 / (1.0 + std::exp(-s)); }

}  // namespace

BlackBoxProblem MakeCubicReg(const Matrix& A, const Vector& b, double alpha) {
  if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() == 0) {
    throw std::invalid_argument("cubic-reg: A must be d×d and b a d-vector");
  }
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw std::invalid_argument("cubic-reg: A must be symmetric");
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("cubic-reg: alpha must be >= 0");

  const int d = static_cast<int>(A.rows());
  const bool diagonal = A.isDiagonal(0.0);
  auto Ap = std::make_shared<const Matrix>(A);
  auto diag = std::make_shared<const Vector>(A.diagonal());
  auto bp = std::make_shared<const Vector>(b);

  BlackBoxProblem::ComponentFn fn;
  if (diagonal) {
    fn = [diag, bp, alpha](std::size_t, const Vector& w) {
      return 0.5 * w.dot(diag->cwiseProduct(w)) + bp->dot(w) +
             CubicTerm(alpha, w);
    };
  } else {
    fn = [Ap, bp, alpha](std::size_t, const Vector& w) {
      return 0.5 * w.dot(*Ap * w) + bp->dot(w) + CubicTerm(alpha, w);
    };
  }
  AnalyticHooks hooks;
  hooks.gradient = [Ap, bp, alpha](const Vector& w) {
    return Vector(*Ap * w + *bp + CubicTermGradient(alpha, w));
  };
  hooks.hessian = [Ap, alpha](const Vector& w) {
    return Matrix(*Ap + CubicTermHessian(alpha, w));
  };
  hooks.component_gradient = [g = hooks.gradient](std::size_t,
                                                  const Vector& w) {
    return g(w);
  };

  SmoothnessProfile smooth;
  smooth.ell = 1e2;
  smooth.rho = 1.0;
  return BlackBoxProblem("cubic-det", d, 1, std::move(fn), smooth,
                         std::move(hooks));
}

Vector SampleCubicDiagonal(int dimension, Rng& rng) {
  if (dimension < 1) throw std::invalid_argument("cubic-reg: d must be >= 1");
  std::uniform_real_distribution<double> unit(1.0, 2.0);
  Vector diag(dimension);
  for (int j = 0; j < dimension; ++j) diag[j] = unit(rng);
  std::vector<int> idx(dimension);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const int negatives = static_cast<int>(std::lround(0.1 * dimension));
  for (int k = 0; k < negatives; ++k) diag[idx[k]] = -1.0;
  return diag;
}

BlackBoxProblem SampleCubicRegDeterministic(int dimension, std::uint64_t seed,
                                            double alpha) {
  Rng rng(seed);
  const Vector diag = SampleCubicDiagonal(dimension, rng);
  return MakeCubicReg(diag.asDiagonal().toDenseMatrix(),
                      Vector::Zero(dimension), alpha);
}

CubicStochasticInstance SampleCubicStochasticInstance(int dimension,
                                                      std::uint64_t seed,
                                                      double alpha,
                                                      std::size_t components) {
  if (dimension < 1) throw std::invalid_argument("cubic-reg: d must be >= 1");
  if (components < 1) throw std::invalid_argument("cubic-reg: n must be >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("cubic-reg: alpha must be >= 0");
  Rng rng(seed);
  CubicStochasticInstance inst;
  inst.alpha = alpha;
  inst.base_diagonal = SampleCubicDiagonal(dimension, rng);
  const auto n = static_cast<long>(components);
  inst.diagonal_noise.resize(n, dimension);
  inst.linear_noise.resize(n, dimension);
  std::uniform_real_distribution<double> small(-0.1, 0.1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < dimension; ++j) inst.diagonal_noise(i, j) = small(rng);
    for (int j = 0; j < dimension; ++j) inst.linear_noise(i, j) = unit(rng);
  }
  return inst;
}

std::pair<Matrix, Vector> CubicStochasticMean(
    const CubicStochasticInstance& inst) {
  const Vector diag =
      inst.base_diagonal + inst.diagonal_noise.colwise().mean().transpose();
  const Vector b = inst.linear_noise.colwise().mean().transpose();
  return {diag.asDiagonal().toDenseMatrix(), b};
}

double CubicStochasticSigma(const CubicStochasticInstance& inst) {
  // ∇f_i − ∇f = (D_i − D̄) w + (c_i − c̄), so for ||w|| <= R
  // E||·||² <= 2 R² max_j Var_j(ξ) + 2 E||c_i − c̄||².
  const Eigen::RowVectorXd mean_diag = inst.diagonal_noise.colwise().mean();
  const Eigen::RowVectorXd mean_lin = inst.linear_noise.colwise().mean();
  const Matrix dd = inst.diagonal_noise.rowwise() - mean_diag;
  const Matrix dl = inst.linear_noise.rowwise() - mean_lin;
  const double n = static_cast<double>(inst.diagonal_noise.rows());
  const double max_var = (dd.array().square().colwise().sum() / n).maxCoeff();
  const double lin_var = dl.array().square().sum() / n;
  const double R = inst.variance_radius;
  return std::sqrt(2.0 * R * R * max_var + 2.0 * lin_var);
}

BlackBoxProblem MakeCubicRegStochastic(const CubicStochasticInstance& instance) {
  auto inst = std::make_shared<const CubicStochasticInstance>(instance);
  const int d = static_cast<int>(inst->base_diagonal.size());
  const std::size_t n = static_cast<std::size_t>(inst->diagonal_noise.rows());

  auto fn = [inst](std::size_t i, const Vector& w) {
    const auto row = static_cast<long>(i);
    double quad = 0.0, lin = 0.0;
    for (long j = 0; j < w.size(); ++j) {
      const double a = inst->base_diagonal[j] + inst->diagonal_noise(row, j);
      quad += a * w[j] * w[j];
      lin += inst->linear_noise(row, j) * w[j];
    }
    return 0.5 * quad + lin + CubicTerm(inst->alpha, w);
  };

  const auto [A, b] = CubicStochasticMean(*inst);
  auto Ap = std::make_shared<const Matrix>(A);
  auto bp = std::make_shared<const Vector>(b);
  AnalyticHooks hooks;
  hooks.gradient = [Ap, bp, alpha = inst->alpha](const Vector& w) {
    return Vector(*Ap * w + *bp + CubicTermGradient(alpha, w));
  };
  hooks.hessian = [Ap, alpha = inst->alpha](const Vector& w) {
    return Matrix(*Ap + CubicTermHessian(alpha, w));
  };
  hooks.component_gradient = [inst](std::size_t i, const Vector& w) {
    const auto row = static_cast<long>(i);
    const Vector diag =
        inst->base_diagonal + inst->diagonal_noise.row(row).transpose();
    return Vector(diag.cwiseProduct(w) + inst->linear_noise.row(row).transpose() +
                  CubicTermGradient(inst->alpha, w));
  };

  SmoothnessProfile smooth;
  smooth.ell = 1e2;
  smooth.rho = 1.0;
  smooth.sigma_var = CubicStochasticSigma(*inst);
  return BlackBoxProblem("cubic-stoch", d, n, std::move(fn), smooth,
                         std::move(hooks));
}

BlackBoxProblem SampleCubicRegStochastic(int dimension, std::uint64_t seed,
                                         double alpha, std::size_t components) {
  return MakeCubicRegStochastic(
      SampleCubicStochasticInstance(dimension, seed, alpha, components));
}

BlackBoxProblem MakeRegNls(const LibsvmDataset& data, double lambda,
                           double alpha) {
  if (data.rows() == 0 || data.dims() == 0) {
    throw std::invalid_argument("reg-nls: empty dataset");
  }
  if (!(lambda >= 0.0) || !(alpha >= 0.0)) {
    throw std::invalid_argument("reg-nls: lambda and alpha must be >= 0");
  }
  auto dp = std::make_shared<const LibsvmDataset>(data);
  const int d = static_cast<int>(data.dims());
  const auto n = static_cast<std::size_t>(data.rows());

  auto regularizer = [lambda, alpha](const Vector& w) {
    double r = 0.0;
    for (long j = 0; j < w.size(); ++j) {
      const double w2 = w[j] * w[j];
      r += lambda * w2 / (1.0 + alpha * w2);
    }
    return r;
  };

  auto fn = [dp, regularizer](std::size_t i, const Vector& w) {
    const double s = Logistic(dp->features.row(static_cast<long>(i)).dot(w));
    const double res = dp->labels[static_cast<long>(i)] - s;
    return res * res + regularizer(w);
  };

  auto reg_grad = [lambda, alpha](const Vector& w) {
    Vector g(w.size());
    for (long j = 0; j < w.size(); ++j) {
      const double den = 1.0 + alpha * w[j] * w[j];
      g[j] = 2.0 * lambda * w[j] / (den * den);
    }
    return g;
  };

  AnalyticHooks hooks;
  hooks.component_gradient = [dp, reg_grad](std::size_t i, const Vector& w) {
    const auto row = static_cast<long>(i);
    const double s = Logistic(dp->features.row(row).dot(w));
    const double coef = -2.0 * (dp->labels[row] - s) * s * (1.0 - s);
    Vector g = reg_grad(w);
    g += coef * dp->features.row(row).transpose();
    return g;
  };
  hooks.gradient = [dp, reg_grad](const Vector& w) {
    const Vector margins = dp->features * w;
    Vector coefs(margins.size());
    for (long i = 0; i < margins.size(); ++i) {
      const double s = Logistic(margins[i]);
      coefs[i] = -2.0 * (dp->labels[i] - s) * s * (1.0 - s);
    }
    Vector g = dp->features.transpose() * coefs;
    g /= static_cast<double>(margins.size());
    g += reg_grad(w);
    return g;
  };
  hooks.hessian = [dp, lambda, alpha](const Vector& w) {
    const long d = w.size();
    const Vector margins = dp->features * w;
    Vector weights(margins.size());
    for (long i = 0; i < margins.size(); ++i) {
      const double s = Logistic(margins[i]);
      const double ds = s * (1.0 - s);
      const double dds = ds * (1.0 - 2.0 * s);
      weights[i] = 2.0 * (ds * ds - (dp->labels[i] - s) * dds);
    }
    Matrix X = Matrix(dp->features);
    Matrix h = X.transpose() * weights.asDiagonal() * X;
    h /= static_cast<double>(margins.size());
    for (long j = 0; j < d; ++j) {
      const double w2 = w[j] * w[j];
      const double den = 1.0 + alpha * w2;
      h(j, j) += 2.0 * lambda * (1.0 - 3.0 * alpha * w2) / (den * den * den);
    }
    return h;
  };

  // |2(y − s) s (1 − s)| <= 1/2, so E||∇f_i − ∇f||² <= ¼ mean ||x_i||².
  double mean_sq = 0.0;
  for (long i = 0; i < data.rows(); ++i) mean_sq += data.features.row(i).squaredNorm();
  mean_sq /= static_cast<double>(data.rows());

  SmoothnessProfile smooth;
  smooth.ell = 1e2;
  smooth.rho = 1.0;
  smooth.sigma_var = 0.5 * std::sqrt(mean_sq);
  return BlackBoxProblem("reg-nls", d, n, std::move(fn), smooth,
                         std::move(hooks));
}

BlackBoxProblem MakeQuadratic(const Matrix& H, const Vector& g, double c,
                              double ell) {
  if (H.rows() != H.cols() || H.rows() != g.size() || H.rows() == 0) {
    throw std::invalid_argument("quadratic: H must be d×d and g a d-vector");
  }
  auto Hp = std::make_shared<const Matrix>(0.5 * (H + H.transpose()));
  auto gp = std::make_shared<const Vector>(g);
  auto fn = [Hp, gp, c](std::size_t, const Vector& x) {
    return 0.5 * x.dot(*Hp * x) + gp->dot(x) + c;
  };
  AnalyticHooks hooks;
  hooks.gradient = [Hp, gp](const Vector& x) { return Vector(*Hp * x + *gp); };
  hooks.hessian = [Hp](const Vector&) { return *Hp; };
  hooks.component_gradient = [Hp, gp](std::size_t, const Vector& x) {
    return Vector(*Hp * x + *gp);
  };
  SmoothnessProfile smooth;
  smooth.ell = ell > 0.0 ? ell : std::max(SpectralRadius(*Hp), 1e-12);
  smooth.rho = 0.0;
  return BlackBoxProblem("quadratic", static_cast<int>(H.rows()), 1,
                         std::move(fn), smooth, std::move(hooks));
}

BlackBoxProblem MakeQuadraticSum(std::vector<Matrix> hessians,
                                 std::vector<Vector> linear, double ell) {
  if (hessians.empty() || hessians.size() != linear.size()) {
    throw std::invalid_argument("quadratic-sum: need matching H_i and g_i");
  }
  const long d = hessians.front().rows();
  Matrix mean_h = Matrix::Zero(d, d);
  Vector mean_g = Vector::Zero(d);
  double max_radius = 0.0;
  for (std::size_t i = 0; i < hessians.size(); ++i) {
    if (hessians[i].rows() != d || hessians[i].cols() != d ||
        linear[i].size() != d) {
      throw std::invalid_argument("quadratic-sum: inconsistent dimensions");
    }
    hessians[i] = 0.5 * (hessians[i] + hessians[i].transpose());
    mean_h += hessians[i];
    mean_g += linear[i];
    max_radius = std::max(max_radius, SpectralRadius(hessians[i]));
  }
  const double n = static_cast<double>(hessians.size());
  mean_h /= n;
  mean_g /= n;
  auto hs = std::make_shared<const std::vector<Matrix>>(std::move(hessians));
  auto gs = std::make_shared<const std::vector<Vector>>(std::move(linear));
  auto fn = [hs, gs](std::size_t i, const Vector& x) {
    return 0.5 * x.dot((*hs)[i] * x) + (*gs)[i].dot(x);
  };
  AnalyticHooks hooks;
  hooks.gradient = [mean_h, mean_g](const Vector& x) {
    return Vector(mean_h * x + mean_g);
  };
  hooks.hessian = [mean_h](const Vector&) { return mean_h; };
  hooks.component_gradient = [hs, gs](std::size_t i, const Vector& x) {
    return Vector((*hs)[i] * x + (*gs)[i]);
  };
  SmoothnessProfile smooth;
  smooth.ell = ell > 0.0 ? ell : std::max(max_radius, 1e-12);
  smooth.rho = 0.0;
  return BlackBoxProblem("quadratic-sum", static_cast<int>(d), hs->size(),
                         std::move(fn), smooth, std::move(hooks));
}

BlackBoxProblem MakeSumOfCubes(int dimension) {
  if (dimension < 1) throw std::invalid_argument("sum-of-cubes: d must be >= 1");
  auto fn = [](std::size_t, const Vector& x) { return x.array().cube().sum(); };
  AnalyticHooks hooks;
  hooks.gradient = [](const Vector& x) {
    return Vector(3.0 * x.array().square());
  };
  hooks.hessian = [](const Vector& x) {
    return Matrix((6.0 * x).asDiagonal());
  };
  hooks.component_gradient = [g = hooks.gradient](std::size_t,
                                                  const Vector& x) {
    return g(x);
  };
  SmoothnessProfile smooth;
  smooth.ell = 6.0;  // on the unit ball
  smooth.rho = 6.0;
  return BlackBoxProblem("sum-of-cubes", dimension, 1, std::move(fn), smooth,
                         std::move(hooks));
}

BlackBoxProblem MakePerturbedQuadratic(const Matrix& H, double kappa) {
  if (H.rows() != H.cols() || H.rows() == 0) {
    throw std::invalid_argument("perturbed-quadratic: H must be square");
  }
  auto Hp = std::make_shared<const Matrix>(0.5 * (H + H.transpose()));
  auto fn = [Hp, kappa](std::size_t, const Vector& x) {
    return 0.5 * x.dot(*Hp * x) + kappa / 6.0 * x.array().cube().sum();
  };
  AnalyticHooks hooks;
  hooks.gradient = [Hp, kappa](const Vector& x) {
    return Vector(*Hp * x + 0.5 * kappa * x.array().square().matrix());
  };
  hooks.hessian = [Hp, kappa](const Vector& x) {
    return Matrix(*Hp + Matrix((kappa * x).asDiagonal()));
  };
  hooks.component_gradient = [g = hooks.gradient](std::size_t,
                                                  const Vector& x) {
    return g(x);
  };
  SmoothnessProfile smooth;
  smooth.ell = SpectralRadius(*Hp) + kappa;
  smooth.rho = kappa;
  return BlackBoxProblem("perturbed-quadratic", static_cast<int>(H.rows()), 1,
                         std::move(fn), smooth, std::move(hooks));
}

}  // namespace zoncf
