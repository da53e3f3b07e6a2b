#ifndef ZONCF_SRC_JET_H_
#define ZONCF_SRC_JET_H_

#include "zoncf/oracle.h"

namespace zoncf::internal {

// Second-order forward-mode number: value, gradient and Hessian with respect
// to a fixed set of d inputs. Only used for the test-only analytic hooks, so
// the O(d²) cost per operation is irrelevant.
struct Jet {
  double v = 0.0;
  Vector g;
  Matrix h;

  static Jet Constant(double value, int d) {
    return {value, Vector::Zero(d), Matrix::Zero(d, d)};
  }
  static Jet Variable(double value, int index, int d) {
    Jet j = Constant(value, d);
    j.g[index] = 1.0;
    return j;
  }
};

inline Jet operator+(Jet a, const Jet& b) {
  a.v += b.v;
  a.g += b.g;
  a.h += b.h;
  return a;
}
inline Jet operator-(Jet a, const Jet& b) {
  a.v -= b.v;
  a.g -= b.g;
  a.h -= b.h;
  return a;
}
inline Jet operator-(Jet a) {
  a.v = -a.v;
  a.g = -a.g;
  a.h = -a.h;
  return a;
}
inline Jet operator+(Jet a, double c) {
  a.v += c;
  return a;
}
inline Jet operator+(double c, Jet a) { return std::move(a) + c; }
inline Jet operator-(Jet a, double c) {
  a.v -= c;
  return a;
}
inline Jet operator-(double c, const Jet& a) { return -a + c; }
inline Jet operator*(Jet a, double c) {
  a.v *= c;
  a.g *= c;
  a.h *= c;
  return a;
}
inline Jet operator*(double c, Jet a) { return std::move(a) * c; }
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
inline Jet operator/(Jet a, double c) { return std::move(a) * (1.0 / c); }

inline double Value(double x) { return x; }
inline double Value(const Jet& x) { return x.v; }

}  // namespace zoncf::internal

#endif  // ZONCF_SRC_JET_H_
