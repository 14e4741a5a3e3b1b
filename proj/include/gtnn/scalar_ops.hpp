#pragma once

#include <cmath>

namespace gtnn {

// Plain-double overloads of the activation primitives. Var and Jet2 provide
// the same names, so templated network code can call them unqualified.

inline double relu(double t) { return t > 0.0 ? t : 0.0; }

/// Derivative indicator of relu; step(0) = 1 by convention.
inline double step(double t) { return t >= 0.0 ? 1.0 : 0.0; }

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double square(double t) { return t * t; }

// std delegates so that unqualified math calls in generic code resolve for
// plain doubles as well as for Var/Jet2 arguments.
inline double exp(double t) { return std::exp(t); }
inline double log(double t) { return std::log(t); }
inline double sqrt(double t) { return std::sqrt(t); }
inline double sin(double t) { return std::sin(t); }
inline double cos(double t) { return std::cos(t); }

/// First three derivatives of the sigmoid, expressed through its value s.
inline double sigmoid_d1(double s) { return s * (1.0 - s); }
inline double sigmoid_d2(double s) { return s * (1.0 - s) * (1.0 - 2.0 * s); }
inline double sigmoid_d3(double s) {
  const double d1 = sigmoid_d1(s);
  return d1 * (1.0 - 2.0 * s) * (1.0 - 2.0 * s) - 2.0 * d1 * d1;
}

}  // namespace gtnn
