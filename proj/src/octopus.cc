#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "jet.h"
#include "zoncf/problems.h"

namespace zoncf {
namespace {

using internal::Jet;

// Du et al. build the octopus on a union of tubes around the GD path: zone i
// has |x_j| in [2τ, 6τ] for j < i, |x_i| <= τ and the remaining coordinates
// <= τ, with connecting regions where |x_i| is in [τ, 2τ]. We evaluate the
// same formulas everywhere, blending the connecting region towards the tail
// objective R_{i+1} instead of the fixed −γ x_{i+1}² term. On the original
// tubes the two coincide (w·L + (1 − w)(−γ) is exactly Du et al.'s g2).
class Octopus {
 public:
  explicit Octopus(const OctopusParams& p) : p_(p) {}

  template <typename T>
  T G1(const T& a) const {
    const double tau = p_.tau, L = p_.L, gamma = p_.gamma;
    const T s = a - tau;
    const T s2 = s * s;
    return -gamma * (a * a) + ((-14.0 * L + 10.0 * gamma) / (3.0 * tau)) * (s2 * s) +
           ((5.0 * L - 3.0 * gamma) / (2.0 * tau * tau)) * (s2 * s2);
  }

  // Quintic smoothstep, 1 at a = τ and 0 at a = 2τ, flat at both ends.
  template <typename T>
  T Blend(const T& a) const {
    const T s = (a - 2.0 * p_.tau) / p_.tau;
    const T s3 = s * s * s;
    return -10.0 * s3 - 15.0 * (s3 * s) - 6.0 * (s3 * s * s);
  }

  double Nu() const { return -G1(2.0 * p_.tau) + 4.0 * p_.L * p_.tau * p_.tau; }

  template <typename T>
  T Value(const std::vector<T>& x) const {
    const int d = static_cast<int>(x.size());
    const double tau = p_.tau, L = p_.L, gamma = p_.gamma, nu = Nu();
    std::vector<T> a;
    a.reserve(d);
    for (const T& xi : x) a.push_back(internal::Value(xi) < 0.0 ? T(-xi) : xi);

    // tail[i] = L Σ_{j>i} a_j²
    std::vector<T> tail(d + 1, Zero(x));
    for (int i = d - 1; i >= 0; --i) tail[i] = tail[i + 1] + L * (a[i] * a[i]);

    T r = Zero(x);  // R_{d+1}
    for (int i = d - 1; i >= 0; --i) {
      const double ai = internal::Value(a[i]);
      if (ai <= tau) {
        r = -gamma * (a[i] * a[i]) + tail[i + 1];
      } else if (ai < 2.0 * tau) {
        const T w = Blend(a[i]);
        r = G1(a[i]) + w * tail[i + 1] + (1.0 - w) * r;
      } else {
        const T off = a[i] - 4.0 * tau;
        r = L * (off * off) - nu + r;
      }
    }
    return r;
  }

 private:
  static double Zero(const std::vector<double>&) { return 0.0; }
  static Jet Zero(const std::vector<Jet>& x) {
    return Jet::Constant(0.0, static_cast<int>(x.size()));
  }

  OctopusParams p_;
};

std::vector<Jet> Seed(const Vector& x) {
  const int d = static_cast<int>(x.size());
  std::vector<Jet> jets;
  jets.reserve(d);
  for (int i = 0; i < d; ++i) jets.push_back(Jet::Variable(x[i], i, d));
  return jets;
}

}  // namespace

double OctopusNu(const OctopusParams& params) { return Octopus(params).Nu(); }

double OctopusMinimumValue(const OctopusParams& params) {
  return -params.dimension * OctopusNu(params);
}

BlackBoxProblem MakeOctopus(const OctopusParams& params) {
  if (params.dimension < 2) throw std::invalid_argument("octopus: d must be >= 2");
  if (!(params.tau > 0.0) || !(params.L > 0.0) || !(params.gamma > 0.0)) {
    throw std::invalid_argument("octopus: tau, L, gamma must be positive");
  }
  auto octo = std::make_shared<const Octopus>(params);
  const int d = params.dimension;

  auto fn = [octo](std::size_t, const Vector& x) {
    std::vector<double> xs(x.data(), x.data() + x.size());
    return octo->Value(xs);
  };
  AnalyticHooks hooks;
  hooks.gradient = [octo](const Vector& x) { return octo->Value(Seed(x)).g; };
  hooks.hessian = [octo](const Vector& x) { return octo->Value(Seed(x)).h; };
  hooks.component_gradient = [octo](std::size_t, const Vector& x) {
    return octo->Value(Seed(x)).g;
  };

  // Inside the zones the Hessian is diag(±2L, −2γ); 2·max(L, γ) bounds it.
  SmoothnessProfile smooth;
  smooth.ell = 2.0 * std::max(params.L, params.gamma);
  smooth.rho = std::numbers::e;
  smooth.sigma_var = 0.0;
  return BlackBoxProblem("octopus", d, 1, std::move(fn), smooth,
                         std::move(hooks));
}

BlackBoxProblem MakeOctopus(int dimension, double tau, double L, double gamma) {
  return MakeOctopus(OctopusParams{dimension, tau, L, gamma});
}

}  // namespace zoncf
