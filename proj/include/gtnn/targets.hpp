#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gtnn {

/// Labeled point set; features are stored row-major (size() * dim).
struct Dataset {
  enum class Provenance { analytic, csv, surrogate };

  int dim = 1;
  std::vector<double> X;
  std::vector<double> y;
  Provenance provenance = Provenance::analytic;

  int size() const { return static_cast<int>(y.size()); }
  std::span<const double> point(int n) const {
    return std::span<const double>(X).subspan(static_cast<std::size_t>(n) *
                                                  static_cast<std::size_t>(dim),
                                              static_cast<std::size_t>(dim));
  }
};

// ---- analytic regression targets ----

/// 1-D oscillatory target sin(30 pi x) on [-1,1].
double eval_f1(double x);
/// 5-D smooth target exp(sin(pi * sum x_i)) - 1 on the unit ball.
double eval_f2(std::span<const double> x);
/// 5-D oscillatory target sin(8 pi (|x|^2 - 1)) on the unit ball.
double eval_f3(std::span<const double> x);

// ---- elliptic PDE with manufactured solution ----

/// Superposition of four radial Gaussian modes in R^5:
/// u(x) = sum_i a_i exp(-|x - c_i|^2 / width^2).
struct GaussianMixture {
  static constexpr int dim = 5;
  std::array<double, 4> amplitude;
  std::array<std::array<double, 5>, 4> center;
  double width;

  /// The fixed instance used as the manufactured PDE solution. The mode
  /// width is chosen so the solution decays below 1e-8 everywhere on the
  /// unit sphere, making the zero-boundary ansatz consistent.
  static const GaussianMixture& pde_solution();

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  double laplacian(std::span<const double> x) const;
};

/// Diffusion coefficient a(x) = 1 + |x|^2 / 2 (any dimension).
double pde_coefficient_a(std::span<const double> x);

double pde_exact_u(std::span<const double> x);

/// Right-hand side f = div(a grad u) expanded as a(x) lap(u) + x . grad(u),
/// using the closed-form Gaussian gradient and Laplacian.
double pde_rhs_f(std::span<const double> x);

// ---- domains and sampling ----

struct Domain {
  enum class Kind { interval, ball };
  Kind kind = Kind::interval;
  double lo = -1.0, hi = 1.0;  // interval bounds
  int dim = 1;

  static Domain interval(double lo, double hi);
  static Domain unit_ball(int d);
};

enum class SampleMode { random, even };

/// n points from the domain, row-major n*dim.
///
/// Interval: equispaced including endpoints (even) or i.i.d. uniform
/// (random). Ball: direction from a normalized standard Gaussian and radius
/// U^(1/d); even mode feeds the same transform from a Halton sequence
/// instead of the random stream. Even mode ignores the seed.
std::vector<double> sample_domain(const Domain& domain, int n, SampleMode mode,
                                  std::uint64_t seed);

/// Volume of the d-dimensional unit ball.
double ball_volume(int d);

/// Radical-inverse (Halton) value of index i >= 1 in the given base.
double halton(std::uint64_t index, int base);

/// Inverse standard normal CDF (Acklam's rational approximation).
double inverse_normal_cdf(double p);

// ---- measured / surrogate 1-D data ----

/// Loader for two-column x,y CSV data on [-1,1]; no header. Malformed rows,
/// out-of-domain x, and empty files raise errors naming the line.
Dataset load_case1_csv(const std::string& path);

/// Synthetic stand-in for a shock-flow profile: a smooth ramp carrying
/// amplitude-modulated high-frequency waves on a sub-interval.
double surrogate_shock_value(double x);

/// n equispaced samples of surrogate_shock_value on [-1,1].
Dataset surrogate_shock(int n);

}  // namespace gtnn
