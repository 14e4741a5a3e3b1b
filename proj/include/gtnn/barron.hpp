#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gtnn {

/// Discrete sampling measure: K equal-weight atoms (a, w, b, u, v), each an
/// output-scaled relu ridge over a quadratic pre-activation. The induced
/// target is g(x) = (1/K) sum_i a_i relu((w_i.x + b_i)(u_i.x + v_i)).
struct BarronMeasure {
  int dim = 5;
  int K = 0;
  std::vector<double> a, b, v;  // K each
  std::vector<double> w, u;     // K*dim, row per atom

  /// Value of the equal-weight average over the atoms listed in idx (the
  /// full set when idx is empty), scaled by 1/|set|.
  double eval(std::span<const double> x, std::span<const int> idx = {}) const;
  /// Same, also accumulating the gradient (a.e.) into grad.
  double eval_grad(std::span<const double> x, std::span<double> grad,
                   std::span<const int> idx = {}) const;
};

/// Atoms drawn once: a, b, v ~ U(-1,1); w, u uniform on the unit sphere.
BarronMeasure barron_make_measure(int K, int dim, std::uint64_t seed);

/// Finite-atom upper bound of the squared Barron-type norm:
/// (1/K) sum_i a_i^2 (|w_i| + |b_i|)^2 (|u_i| + |v_i|)^2.
double barron_norm_bound_sq(const BarronMeasure& m);

struct BarronStudyConfig {
  int K = 1024;
  int dim = 5;
  int trials = 32;
  int samples = 20000;  // Monte Carlo points for the H1 integrals
  std::vector<int> widths = {8, 16, 32, 64, 128, 256, 512};
  std::uint64_t seed = 1;
  int jobs = 0;
};

struct BarronWidthResult {
  int M = 0;
  double mean_sq_h1 = 0.0;  // trial average of the squared H1(ball) error
  double rms_h1 = 0.0;      // sqrt of the above
  double bound = 0.0;       // (1/M) * E_pi ||atom||^2_H1 over the K atoms
};

struct BarronStudyResult {
  std::vector<BarronWidthResult> per_width;
  double slope = 0.0;             // least-squares slope of log rms vs log M
  double intercept = 0.0;
  double fit_rms_residual = 0.0;  // rms residual of the log-log fit
  double atom_h1_mean_sq = 0.0;   // E_pi ||atom||^2_H1 (Monte Carlo)
  double norm_bound_sq = 0.0;
};

/// For each width M: draws M atoms i.i.d. from the measure (with
/// replacement), forms the width-M average, and estimates the squared
/// H1 error against g by Monte Carlo over the unit ball; averages over
/// trials and fits the log-log slope of the rms error. Requires at least
/// two widths; every width must be <= K.
BarronStudyResult barron_rate_study(const BarronStudyConfig& cfg);

}  // namespace gtnn
