#include "gtnn/barron.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gtnn/rng.hpp"
#include "gtnn/targets.hpp"

namespace gtnn {

namespace {

// Value and (a.e.) gradient of one atom at x.
inline double atom_eval(const BarronMeasure& m, int i, const double* x, double* grad) {
  const int d = m.dim;
  const double* wi = m.w.data() + static_cast<std::size_t>(i) * d;
  const double* ui = m.u.data() + static_cast<std::size_t>(i) * d;
  double p = m.b[static_cast<std::size_t>(i)];
  double q = m.v[static_cast<std::size_t>(i)];
  for (int j = 0; j < d; ++j) {
    p += wi[j] * x[j];
    q += ui[j] * x[j];
  }
  const double z = p * q;
  const double ai = m.a[static_cast<std::size_t>(i)];
  if (grad) {
    if (z >= 0.0)
      for (int j = 0; j < d; ++j) grad[j] += ai * (q * wi[j] + p * ui[j]);
  }
  return z > 0.0 ? ai * z : 0.0;
}

}  // namespace

double BarronMeasure::eval(std::span<const double> x, std::span<const int> idx) const {
  const int count = idx.empty() ? K : static_cast<int>(idx.size());
  double acc = 0.0;
  for (int t = 0; t < count; ++t) {
    const int i = idx.empty() ? t : idx[static_cast<std::size_t>(t)];
    acc += atom_eval(*this, i, x.data(), nullptr);
  }
  return acc / static_cast<double>(count);
}

double BarronMeasure::eval_grad(std::span<const double> x, std::span<double> grad,
                                std::span<const int> idx) const {
  const int count = idx.empty() ? K : static_cast<int>(idx.size());
  for (int j = 0; j < dim; ++j) grad[static_cast<std::size_t>(j)] = 0.0;
  double acc = 0.0;
  for (int t = 0; t < count; ++t) {
    const int i = idx.empty() ? t : idx[static_cast<std::size_t>(t)];
    acc += atom_eval(*this, i, x.data(), grad.data());
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (int j = 0; j < dim; ++j) grad[static_cast<std::size_t>(j)] *= inv;
  return acc * inv;
}

BarronMeasure barron_make_measure(int K, int dim, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("barron_make_measure: K must be >= 1");
  if (dim < 1) throw std::invalid_argument("barron_make_measure: dim must be >= 1");
  BarronMeasure m;
  m.dim = dim;
  m.K = K;
  m.a.resize(static_cast<std::size_t>(K));
  m.b.resize(static_cast<std::size_t>(K));
  m.v.resize(static_cast<std::size_t>(K));
  m.w.resize(static_cast<std::size_t>(K) * static_cast<std::size_t>(dim));
  m.u.resize(static_cast<std::size_t>(K) * static_cast<std::size_t>(dim));
  Rng rng(seed);
  auto sphere = [&](double* out) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int j = 0; j < dim; ++j) {
        out[j] = rng.normal();
        norm2 += out[j] * out[j];
      }
    } while (norm2 < 1e-24);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < dim; ++j) out[j] *= inv;
  };
  for (int i = 0; i < K; ++i) {
    m.a[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    sphere(m.w.data() + static_cast<std::size_t>(i) * dim);
    m.b[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    sphere(m.u.data() + static_cast<std::size_t>(i) * dim);
    m.v[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
  }
  return m;
}

double barron_norm_bound_sq(const BarronMeasure& m) {
  double acc = 0.0;
  for (int i = 0; i < m.K; ++i) {
    double wn = 0.0, un = 0.0;
    for (int j = 0; j < m.dim; ++j) {
      wn += m.w[static_cast<std::size_t>(i) * m.dim + j] *
            m.w[static_cast<std::size_t>(i) * m.dim + j];
      un += m.u[static_cast<std::size_t>(i) * m.dim + j] *
            m.u[static_cast<std::size_t>(i) * m.dim + j];
    }
    const double tw = std::sqrt(wn) + std::fabs(m.b[static_cast<std::size_t>(i)]);
    const double tu = std::sqrt(un) + std::fabs(m.v[static_cast<std::size_t>(i)]);
    acc += m.a[static_cast<std::size_t>(i)] * m.a[static_cast<std::size_t>(i)] * tw * tw *
           tu * tu;
  }
  return acc / static_cast<double>(m.K);
}

BarronStudyResult barron_rate_study(const BarronStudyConfig& cfg) {
  if (cfg.widths.size() < 2)
    throw std::invalid_argument("barron_rate_study: need >= 2 widths");
  for (int M : cfg.widths)
    if (M < 1 || M > cfg.K)
      throw std::invalid_argument("barron_rate_study: widths must lie in [1, K]");
  if (cfg.trials < 1) throw std::invalid_argument("barron_rate_study: trials must be >= 1");
  if (cfg.dim > 16) throw std::invalid_argument("barron_rate_study: dim too large");

  const BarronMeasure m = barron_make_measure(cfg.K, cfg.dim, cfg.seed);
  const int d = cfg.dim;
  const int S = cfg.samples;
  const double vol = ball_volume(d);
  const int jobs = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();

  // One fixed integration point set for the whole study.
  const std::vector<double> pts =
      sample_domain(Domain::unit_ball(d), S, SampleMode::random, cfg.seed + 101);

  // Target value and gradient at every integration point.
  std::vector<double> gv(static_cast<std::size_t>(S));
  std::vector<double> gg(static_cast<std::size_t>(S) * static_cast<std::size_t>(d));
#pragma omp parallel for schedule(static) num_threads(jobs)
  for (int s = 0; s < S; ++s) {
    gv[static_cast<std::size_t>(s)] = m.eval_grad(
        std::span<const double>(pts).subspan(static_cast<std::size_t>(s) * d,
                                             static_cast<std::size_t>(d)),
        std::span<double>(gg).subspan(static_cast<std::size_t>(s) * d,
                                      static_cast<std::size_t>(d)));
  }

  // E_pi ||atom||^2_H1: Monte Carlo per atom over the same points.
  double atom_h1 = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : atom_h1) num_threads(jobs)
  for (int i = 0; i < cfg.K; ++i) {
    double acc = 0.0;
    double grad[16];
    for (int s = 0; s < S; ++s) {
      const double* x = pts.data() + static_cast<std::size_t>(s) * d;
      for (int j = 0; j < d; ++j) grad[j] = 0.0;
      const double val = atom_eval(m, i, x, grad);
      double g2 = 0.0;
      for (int j = 0; j < d; ++j) g2 += grad[j] * grad[j];
      acc += val * val + g2;
    }
    atom_h1 += acc / static_cast<double>(S);
  }
  atom_h1 = atom_h1 * vol / static_cast<double>(cfg.K);

  BarronStudyResult result;
  result.atom_h1_mean_sq = atom_h1;
  result.norm_bound_sq = barron_norm_bound_sq(m);

  for (std::size_t wi = 0; wi < cfg.widths.size(); ++wi) {
    const int M = cfg.widths[wi];
    double mean_sq = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      Rng trng(cfg.seed + 7919 * (wi + 1) + static_cast<std::uint64_t>(trial));
      std::vector<int> idx(static_cast<std::size_t>(M));
      for (int t = 0; t < M; ++t)
        idx[static_cast<std::size_t>(t)] =
            static_cast<int>(trng.below(static_cast<std::uint64_t>(cfg.K)));
      double err_sq = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : err_sq) num_threads(jobs)
      for (int s = 0; s < S; ++s) {
        const double* x = pts.data() + static_cast<std::size_t>(s) * d;
        double grad[16];
        for (int j = 0; j < d; ++j) grad[j] = 0.0;
        double val = 0.0;
        for (int t = 0; t < M; ++t)
          val += atom_eval(m, idx[static_cast<std::size_t>(t)], x, grad);
        const double inv = 1.0 / static_cast<double>(M);
        val *= inv;
        double acc = (val - gv[static_cast<std::size_t>(s)]) *
                     (val - gv[static_cast<std::size_t>(s)]);
        for (int j = 0; j < d; ++j) {
          const double e = grad[j] * inv - gg[static_cast<std::size_t>(s) * d + j];
          acc += e * e;
        }
        err_sq += acc;
      }
      mean_sq += vol * err_sq / static_cast<double>(S);
    }
    mean_sq /= static_cast<double>(cfg.trials);
    BarronWidthResult r;
    r.M = M;
    r.mean_sq_h1 = mean_sq;
    r.rms_h1 = std::sqrt(mean_sq);
    r.bound = atom_h1 / static_cast<double>(M);
    result.per_width.push_back(r);
  }

  // Least-squares fit of log rms against log M.
  const std::size_t J = result.per_width.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const BarronWidthResult& r : result.per_width) {
    const double lx = std::log(static_cast<double>(r.M));
    const double ly = std::log(r.rms_h1);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double nj = static_cast<double>(J);
  const double denom = nj * sxx - sx * sx;
  result.slope = (nj * sxy - sx * sy) / denom;
  result.intercept = (sy - result.slope * sx) / nj;
  double res = 0.0;
  for (const BarronWidthResult& r : result.per_width) {
    const double lx = std::log(static_cast<double>(r.M));
    const double e = std::log(r.rms_h1) - (result.intercept + result.slope * lx);
    res += e * e;
  }
  result.fit_rms_residual = std::sqrt(res / nj);
  return result;
}

}  // namespace gtnn
