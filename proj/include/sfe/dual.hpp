#pragma once

#include <cmath>

namespace sfe::neural {

/// Forward-mode dual number v + d*eps with eps^2 = 0. Nesting Dual<Dual<double>>
/// carries exact second derivatives along one seeded direction.
template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value) : v(value), d{} {}  // NOLINT: implicit promotion of constants
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
};

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T>
Dual<T> operator*(double s, const Dual<T>& a) { return {s * a.v, s * a.d}; }

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -1.0 * sin(a.v) * a.d};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  return {t, (T(1.0) - t * t) * a.d};
}

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

}  // namespace sfe::neural
