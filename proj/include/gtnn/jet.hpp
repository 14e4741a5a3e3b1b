#pragma once

#include <type_traits>

#include "gtnn/scalar_ops.hpp"
#include "gtnn/tape.hpp"

namespace gtnn {

/// Scalar carrying its value and the first and second derivatives along one
/// direction, propagated by truncated-Taylor arithmetic:
///
///   (f+g)'' = f'' + g''
///   (f*g)'' = f''*g + 2 f'*g' + f*g''
///   (f∘g)'  = f'(g)*g',   (f∘g)'' = f''(g)*g'^2 + f'(g)*g''
///
/// The component type T is double for plain evaluation or Var when the jet
/// components must stay differentiable in the network parameters.
template <class T>
struct Jet2 {
  T v{};   // value
  T d1{};  // first directional derivative
  T d2{};  // second directional derivative

  Jet2() = default;
  Jet2(const T& value) : v(value) {}  // constant lift: d1 = d2 = 0
  Jet2(const T& value, const T& dd1, const T& dd2) : v(value), d1(dd1), d2(dd2) {}

  /// Seed for the coordinate being differentiated: d/dt of t is 1.
  static Jet2 variable(const T& value) { return Jet2(value, T(1.0), T(0.0)); }
};

template <class T>
Jet2<T> operator+(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a) {
  return {-a.v, -a.d1, -a.d2};
}

template <class T>
Jet2<T> operator*(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v * b.v,
          a.v * b.d1 + a.d1 * b.v,
          a.v * b.d2 + T(2.0) * a.d1 * b.d1 + a.d2 * b.v};
}

template <class T>
Jet2<T> operator/(const Jet2<T>& a, const Jet2<T>& b) {
  // w = a/b: from a = w*b, solve for w', w'' level by level.
  const T w = a.v / b.v;
  const T w1 = (a.d1 - w * b.d1) / b.v;
  const T w2 = (a.d2 - w * b.d2 - T(2.0) * w1 * b.d1) / b.v;
  return {w, w1, w2};
}

// Mixed scalar forms; a bare T is a constant jet. type_identity keeps the
// scalar argument out of deduction so plain literals convert.
template <class T>
Jet2<T> operator+(const Jet2<T>& a, const std::type_identity_t<T>& c) {
  return {a.v + c, a.d1, a.d2};
}
template <class T>
Jet2<T> operator+(const std::type_identity_t<T>& c, const Jet2<T>& a) { return a + c; }
template <class T>
Jet2<T> operator-(const Jet2<T>& a, const std::type_identity_t<T>& c) {
  return {a.v - c, a.d1, a.d2};
}
template <class T>
Jet2<T> operator-(const std::type_identity_t<T>& c, const Jet2<T>& a) {
  return {c - a.v, -a.d1, -a.d2};
}
template <class T>
Jet2<T> operator*(const Jet2<T>& a, const std::type_identity_t<T>& c) {
  return {a.v * c, a.d1 * c, a.d2 * c};
}
template <class T>
Jet2<T> operator*(const std::type_identity_t<T>& c, const Jet2<T>& a) { return a * c; }

template <class T>
Jet2<T>& operator+=(Jet2<T>& a, const Jet2<T>& b) { return a = a + b; }

/// Unary chain rule given f(x.v) and its first two derivatives there.
template <class T>
Jet2<T> jet_chain(const Jet2<T>& x, const T& f, const T& df, const T& ddf) {
  return {f, df * x.d1, ddf * x.d1 * x.d1 + df * x.d2};
}

template <class T>
Jet2<T> relu(const Jet2<T>& x) {
  const T m = step(x.v);  // 1 for v >= 0, else 0; second derivative vanishes a.e.
  return {relu(x.v), m * x.d1, m * x.d2};
}

template <class T>
Jet2<T> sigmoid(const Jet2<T>& x) {
  const T s = sigmoid(x.v);
  const T ds = s * (T(1.0) - s);
  const T dds = ds * (T(1.0) - T(2.0) * s);
  return jet_chain(x, s, ds, dds);
}

template <class T>
Jet2<T> exp(const Jet2<T>& x) {
  const T e = exp(x.v);
  return jet_chain(x, e, e, e);
}

template <class T>
Jet2<T> sin(const Jet2<T>& x) {
  const T s = sin(x.v), c = cos(x.v);
  return jet_chain(x, s, c, -s);
}

template <class T>
Jet2<T> cos(const Jet2<T>& x) {
  const T s = sin(x.v), c = cos(x.v);
  return jet_chain(x, c, -s, -c);
}

template <class T>
Jet2<T> square(const Jet2<T>& x) {
  return x * x;
}

enum class UnaryKind { relu, sigmoid, neg, square };

template <class T>
Jet2<T> jet_apply_unary(UnaryKind kind, const Jet2<T>& x) {
  switch (kind) {
    case UnaryKind::relu: return relu(x);
    case UnaryKind::sigmoid: return sigmoid(x);
    case UnaryKind::neg: return -x;
    case UnaryKind::square: return square(x);
  }
  return x;
}

}  // namespace gtnn
