#include "gtnn/batch.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace gtnn {

namespace {

constexpr int kBlock = 128;

inline double act_value(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? z : 0.0) : 1.0 / (1.0 + std::exp(-z));
}

// act'(z) expressed through z and the stored activation s.
inline double act_deriv(Activation act, double z, double s) {
  return act == Activation::relu ? (z >= 0.0 ? 1.0 : 0.0) : s * (1.0 - s);
}

struct LayerView {
  const double *W, *b, *U, *v, *Q;
  int k = 0, m = 0;
  Family fam = Family::fnn;
};

LayerView make_view(const double* th, const LayerSlices& ls, int base, Family fam) {
  LayerView L;
  L.k = ls.fan_in;
  L.m = ls.width;
  L.fam = fam;
  L.W = th + base + ls.W;
  L.b = th + base + ls.b;
  L.U = fam != Family::fnn ? th + base + ls.U : nullptr;
  L.v = fam != Family::fnn ? th + base + ls.v : nullptr;
  L.Q = fam == Family::ctnn ? th + base + ls.Q : nullptr;
  return L;
}

struct LayerGrads {
  double *W, *b, *U, *v, *Q;
};

LayerGrads make_grads(double* g, const LayerSlices& ls, int base, Family fam) {
  LayerGrads G;
  G.W = g + base + ls.W;
  G.b = g + base + ls.b;
  G.U = fam != Family::fnn ? g + base + ls.U : nullptr;
  G.v = fam != Family::fnn ? g + base + ls.v : nullptr;
  G.Q = fam == Family::ctnn ? g + base + ls.Q : nullptr;
  return G;
}

// P = W Y + b, PSI = psi(Y), S = act(P * PSI); arrays are nb-major.
void layer_forward(const LayerView& L, Activation act, const double* Y, int nb,
                   double* P, double* PSI, double* S, double* scratch) {
  for (int i = 0; i < L.m; ++i) {
    double* __restrict p = P + i * nb;
    const double bi = L.b[i];
#pragma omp simd
    for (int n = 0; n < nb; ++n) p[n] = bi;
    for (int j = 0; j < L.k; ++j) {
      const double w = L.W[i * L.k + j];
      const double* __restrict yj = Y + j * nb;
#pragma omp simd
      for (int n = 0; n < nb; ++n) p[n] += w * yj[n];
    }
  }
  if (L.fam != Family::fnn) {
    for (int i = 0; i < L.m; ++i) {
      double* __restrict q = PSI + i * nb;
      const double vi = L.v[i];
#pragma omp simd
      for (int n = 0; n < nb; ++n) q[n] = vi;
      for (int j = 0; j < L.k; ++j) {
        const double u = L.U[i * L.k + j];
        const double* __restrict yj = Y + j * nb;
#pragma omp simd
        for (int n = 0; n < nb; ++n) q[n] += u * yj[n];
      }
      if (L.fam == Family::ctnn) {
        const double* Qi = L.Q + i * L.k * L.k;
        for (int j = 0; j < L.k; ++j) {
          double* __restrict t = scratch + j * nb;
#pragma omp simd
          for (int n = 0; n < nb; ++n) t[n] = 0.0;
          for (int kk = 0; kk < L.k; ++kk) {
            const double qv = Qi[j * L.k + kk];
            const double* __restrict yk = Y + kk * nb;
#pragma omp simd
            for (int n = 0; n < nb; ++n) t[n] += qv * yk[n];
          }
        }
        for (int j = 0; j < L.k; ++j) {
          const double* __restrict yj = Y + j * nb;
          const double* __restrict t = scratch + j * nb;
#pragma omp simd
          for (int n = 0; n < nb; ++n) q[n] += yj[n] * t[n];
        }
      }
    }
    for (int i = 0; i < L.m; ++i) {
      const double* __restrict p = P + i * nb;
      const double* __restrict q = PSI + i * nb;
      double* __restrict s = S + i * nb;
      if (act == Activation::relu) {
#pragma omp simd
        for (int n = 0; n < nb; ++n) {
          const double z = p[n] * q[n];
          s[n] = z > 0.0 ? z : 0.0;
        }
      } else {
        for (int n = 0; n < nb; ++n) s[n] = 1.0 / (1.0 + std::exp(-p[n] * q[n]));
      }
    }
  } else {
    for (int i = 0; i < L.m; ++i) {
      const double* __restrict p = P + i * nb;
      double* __restrict s = S + i * nb;
      if (act == Activation::relu) {
#pragma omp simd
        for (int n = 0; n < nb; ++n) s[n] = p[n] > 0.0 ? p[n] : 0.0;
      } else {
        for (int n = 0; n < nb; ++n) s[n] = 1.0 / (1.0 + std::exp(-p[n]));
      }
    }
  }
}

// Backward for one layer given dS; accumulates parameter gradients and,
// when dY is non-null, overwrites it with the input gradient. dP/dPSI are
// m*nb scratch buffers.
void layer_backward(const LayerView& L, Activation act, const double* Y, int nb,
                    const double* P, const double* PSI, const double* S,
                    const double* dS, double* dY, const LayerGrads& G,
                    double* dP, double* dPSI, double* scratch) {
  // dz then split into dP = dz * psi, dPSI = dz * p.
  for (int i = 0; i < L.m; ++i) {
    const double* __restrict p = P + i * nb;
    const double* __restrict s = S + i * nb;
    const double* __restrict ds = dS + i * nb;
    double* __restrict dp = dP + i * nb;
    if (L.fam == Family::fnn) {
#pragma omp simd
      for (int n = 0; n < nb; ++n) dp[n] = ds[n] * act_deriv(act, p[n], s[n]);
    } else {
      const double* __restrict q = PSI + i * nb;
      double* __restrict dq = dPSI + i * nb;
#pragma omp simd
      for (int n = 0; n < nb; ++n) {
        const double dz = ds[n] * act_deriv(act, p[n] * q[n], s[n]);
        dp[n] = dz * q[n];
        dq[n] = dz * p[n];
      }
    }
  }

  for (int i = 0; i < L.m; ++i) {
    const double* __restrict dp = dP + i * nb;
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (int n = 0; n < nb; ++n) acc += dp[n];
    G.b[i] += acc;
    for (int j = 0; j < L.k; ++j) {
      const double* __restrict yj = Y + j * nb;
      double accw = 0.0;
#pragma omp simd reduction(+ : accw)
      for (int n = 0; n < nb; ++n) accw += dp[n] * yj[n];
      G.W[i * L.k + j] += accw;
    }
  }
  if (L.fam != Family::fnn) {
    for (int i = 0; i < L.m; ++i) {
      const double* __restrict dq = dPSI + i * nb;
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (int n = 0; n < nb; ++n) acc += dq[n];
      G.v[i] += acc;
      for (int j = 0; j < L.k; ++j) {
        const double* __restrict yj = Y + j * nb;
        double accu = 0.0;
#pragma omp simd reduction(+ : accu)
        for (int n = 0; n < nb; ++n) accu += dq[n] * yj[n];
        G.U[i * L.k + j] += accu;
      }
      if (L.fam == Family::ctnn) {
        double* gq = G.Q + i * L.k * L.k;
        for (int j = 0; j < L.k; ++j) {
          const double* __restrict yj = Y + j * nb;
          for (int kk = 0; kk < L.k; ++kk) {
            const double* __restrict yk = Y + kk * nb;
            double accq = 0.0;
#pragma omp simd reduction(+ : accq)
            for (int n = 0; n < nb; ++n) accq += dq[n] * yj[n] * yk[n];
            gq[j * L.k + kk] += accq;
          }
        }
      }
    }
  }

  if (dY) {
    for (int j = 0; j < L.k; ++j) {
      double* __restrict d = dY + j * nb;
#pragma omp simd
      for (int n = 0; n < nb; ++n) d[n] = 0.0;
    }
    for (int i = 0; i < L.m; ++i) {
      const double* __restrict dp = dP + i * nb;
      for (int j = 0; j < L.k; ++j) {
        const double w = L.W[i * L.k + j];
        double* __restrict d = dY + j * nb;
#pragma omp simd
        for (int n = 0; n < nb; ++n) d[n] += w * dp[n];
      }
    }
    if (L.fam != Family::fnn) {
      for (int i = 0; i < L.m; ++i) {
        const double* __restrict dq = dPSI + i * nb;
        for (int j = 0; j < L.k; ++j) {
          const double u = L.U[i * L.k + j];
          double* __restrict d = dY + j * nb;
#pragma omp simd
          for (int n = 0; n < nb; ++n) d[n] += u * dq[n];
        }
        if (L.fam == Family::ctnn) {
          const double* Qi = L.Q + i * L.k * L.k;
          for (int j = 0; j < L.k; ++j) {
            double* __restrict t = scratch + j * nb;
#pragma omp simd
            for (int n = 0; n < nb; ++n) t[n] = 0.0;
            for (int kk = 0; kk < L.k; ++kk) {
              const double c = Qi[j * L.k + kk] + Qi[kk * L.k + j];
              const double* __restrict yk = Y + kk * nb;
#pragma omp simd
              for (int n = 0; n < nb; ++n) t[n] += c * yk[n];
            }
          }
          for (int j = 0; j < L.k; ++j) {
            const double* __restrict t = scratch + j * nb;
            double* __restrict d = dY + j * nb;
#pragma omp simd
            for (int n = 0; n < nb; ++n) d[n] += dq[n] * t[n];
          }
        }
      }
    }
  }
}

// Per-thread working set for one block.
struct Engine {
  NetworkSpec spec;
  ParamLayout lay;
  int nbcap = kBlock;

  // stacked buffers, one entry per hidden layer
  std::vector<std::vector<double>> P, PSI, S, dS;
  std::vector<double> Xb;

  // composed buffers (single branch at a time, plus branch summaries)
  std::vector<double> T, S2, dz2;

  std::vector<double> dP, dPSI, scratch, out, dout;

  Engine(const NetworkSpec& sp, const ParamLayout& la) : spec(sp), lay(la) {
    const std::size_t nb = static_cast<std::size_t>(nbcap);
    if (spec.composed) {
      const int mb = lay.branch_layer.width;
      P.assign(1, std::vector<double>(static_cast<std::size_t>(mb) * nb));
      PSI.assign(1, std::vector<double>(static_cast<std::size_t>(mb) * nb));
      S.assign(1, std::vector<double>(static_cast<std::size_t>(mb) * nb));
      dS.assign(1, std::vector<double>(static_cast<std::size_t>(mb) * nb));
      T.resize(static_cast<std::size_t>(lay.branches) * nb);
      S2.resize(static_cast<std::size_t>(lay.branches) * nb);
      dz2.resize(nb);
      dP.resize(static_cast<std::size_t>(mb) * nb);
      dPSI.resize(static_cast<std::size_t>(mb) * nb);
      scratch.resize(static_cast<std::size_t>(lay.branch_layer.fan_in) * nb);
    } else {
      const std::size_t nl = lay.layers.size();
      P.resize(nl);
      PSI.resize(nl);
      S.resize(nl);
      dS.resize(nl);
      int maxm = 0, maxk = 0;
      for (std::size_t l = 0; l < nl; ++l) {
        const LayerSlices& ls = lay.layers[l];
        P[l].resize(static_cast<std::size_t>(ls.width) * nb);
        PSI[l].resize(static_cast<std::size_t>(ls.width) * nb);
        S[l].resize(static_cast<std::size_t>(ls.width) * nb);
        dS[l].resize(static_cast<std::size_t>(ls.width) * nb);
        maxm = std::max(maxm, ls.width);
        maxk = std::max(maxk, ls.fan_in);
      }
      dP.resize(static_cast<std::size_t>(maxm) * nb);
      dPSI.resize(static_cast<std::size_t>(maxm) * nb);
      scratch.resize(static_cast<std::size_t>(maxk) * nb);
    }
    Xb.resize(static_cast<std::size_t>(spec.input_dim) * nb);
    out.resize(nb);
    dout.resize(nb);
  }

  // Forward over the block; Xb must be filled (input_dim * nb, nb-major).
  void forward(const double* th, int nb) {
    if (spec.composed) {
      const int mb = lay.branch_layer.width;
      for (int n = 0; n < nb; ++n) out[static_cast<std::size_t>(n)] = 0.0;
      for (int br = 0; br < lay.branches; ++br) {
        const int base = br * lay.branch_stride;
        const LayerView L = make_view(th, lay.branch_layer, base, spec.family);
        layer_forward(L, spec.activation, Xb.data(), nb, P[0].data(), PSI[0].data(),
                      S[0].data(), scratch.data());
        const double* ab = th + base + lay.branch_a;
        double* __restrict t = T.data() + static_cast<std::size_t>(br) * nb;
#pragma omp simd
        for (int n = 0; n < nb; ++n) t[n] = 0.0;
        for (int m = 0; m < mb; ++m) {
          const double am = ab[m];
          const double* __restrict sm = S[0].data() + static_cast<std::size_t>(m) * nb;
#pragma omp simd
          for (int n = 0; n < nb; ++n) t[n] += am * sm[n];
        }
        const double beta = th[lay.beta + br];
        const double alpha = th[lay.alpha + br];
        double* __restrict s2 = S2.data() + static_cast<std::size_t>(br) * nb;
        double* __restrict outp = out.data();
        if (spec.activation == Activation::relu) {
#pragma omp simd
          for (int n = 0; n < nb; ++n) {
            const double z = t[n] + beta;
            s2[n] = z > 0.0 ? z : 0.0;
            outp[n] += alpha * s2[n];
          }
        } else {
          for (int n = 0; n < nb; ++n) {
            s2[n] = act_value(spec.activation, t[n] + beta);
            outp[n] += alpha * s2[n];
          }
        }
      }
      return;
    }
    const double* y = Xb.data();
    for (std::size_t l = 0; l < lay.layers.size(); ++l) {
      const LayerView L = make_view(th, lay.layers[l], 0, spec.family);
      layer_forward(L, spec.activation, y, nb, P[l].data(), PSI[l].data(), S[l].data(),
                    scratch.data());
      y = S[l].data();
    }
    const double* aw = th + lay.a;
    const int mlast = lay.layers.back().width;
    for (int n = 0; n < nb; ++n)
      out[static_cast<std::size_t>(n)] = spec.output_bias ? th[lay.c] : 0.0;
    double* __restrict outp = out.data();
    for (int m = 0; m < mlast; ++m) {
      const double am = aw[m];
      const double* __restrict sm = y + static_cast<std::size_t>(m) * nb;
#pragma omp simd
      for (int n = 0; n < nb; ++n) outp[n] += am * sm[n];
    }
  }

  // Backward after forward on the same block; dout holds dLoss/dout.
  void backward(const double* th, int nb, double* g) {
    if (spec.composed) {
      const int mb = lay.branch_layer.width;
      for (int br = 0; br < lay.branches; ++br) {
        const int base = br * lay.branch_stride;
        const LayerView L = make_view(th, lay.branch_layer, base, spec.family);
        // Branch activations are recomputed so the per-branch working set
        // stays cache resident instead of storing every branch.
        layer_forward(L, spec.activation, Xb.data(), nb, P[0].data(), PSI[0].data(),
                      S[0].data(), scratch.data());
        const double beta = th[lay.beta + br];
        const double alpha = th[lay.alpha + br];
        const double* __restrict t = T.data() + static_cast<std::size_t>(br) * nb;
        const double* __restrict s2 = S2.data() + static_cast<std::size_t>(br) * nb;
        double dalpha = 0.0, dbeta = 0.0;
        const double* __restrict doutp = dout.data();
        double* __restrict dz2p = dz2.data();
#pragma omp simd reduction(+ : dalpha, dbeta)
        for (int n = 0; n < nb; ++n) {
          const double dn = doutp[n];
          dalpha += dn * s2[n];
          const double ds2 = alpha * dn;
          const double dz = ds2 * act_deriv(spec.activation, t[n] + beta, s2[n]);
          dz2p[n] = dz;
          dbeta += dz;
        }
        g[lay.alpha + br] += dalpha;
        g[lay.beta + br] += dbeta;
        const double* ab = th + base + lay.branch_a;
        double* ga = g + base + lay.branch_a;
        for (int m = 0; m < mb; ++m) {
          const double* __restrict sm = S[0].data() + static_cast<std::size_t>(m) * nb;
          double* __restrict dsm = dS[0].data() + static_cast<std::size_t>(m) * nb;
          const double am = ab[m];
          double acc = 0.0;
#pragma omp simd reduction(+ : acc)
          for (int n = 0; n < nb; ++n) {
            const double dt = dz2p[n];
            acc += dt * sm[n];
            dsm[n] = am * dt;
          }
          ga[m] += acc;
        }
        const LayerGrads G = make_grads(g, lay.branch_layer, base, spec.family);
        layer_backward(L, spec.activation, Xb.data(), nb, P[0].data(), PSI[0].data(),
                       S[0].data(), dS[0].data(), nullptr, G, dP.data(), dPSI.data(),
                       scratch.data());
      }
      return;
    }

    const int last = static_cast<int>(lay.layers.size()) - 1;
    const double* aw = th + lay.a;
    const int mlast = lay.layers[static_cast<std::size_t>(last)].width;
    const double* slast = S[static_cast<std::size_t>(last)].data();
    const double* __restrict doutp = dout.data();
    if (spec.output_bias) {
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (int n = 0; n < nb; ++n) acc += doutp[n];
      g[lay.c] += acc;
    }
    for (int m = 0; m < mlast; ++m) {
      const double* __restrict sm = slast + static_cast<std::size_t>(m) * nb;
      double* __restrict dsm =
          dS[static_cast<std::size_t>(last)].data() + static_cast<std::size_t>(m) * nb;
      const double am = aw[m];
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (int n = 0; n < nb; ++n) {
        const double dn = doutp[n];
        acc += dn * sm[n];
        dsm[n] = am * dn;
      }
      g[lay.a + m] += acc;
    }
    for (int l = last; l >= 0; --l) {
      const LayerView L = make_view(th, lay.layers[static_cast<std::size_t>(l)], 0, spec.family);
      const LayerGrads G =
          make_grads(g, lay.layers[static_cast<std::size_t>(l)], 0, spec.family);
      const double* y = l == 0 ? Xb.data() : S[static_cast<std::size_t>(l - 1)].data();
      double* dY = l == 0 ? nullptr : dS[static_cast<std::size_t>(l - 1)].data();
      layer_backward(L, spec.activation, y, nb, P[static_cast<std::size_t>(l)].data(),
                     PSI[static_cast<std::size_t>(l)].data(),
                     S[static_cast<std::size_t>(l)].data(),
                     dS[static_cast<std::size_t>(l)].data(), dY, G, dP.data(),
                     dPSI.data(), scratch.data());
    }
  }
};

void fill_block(const double* xt, int n_total, int d, int n0, int nb, double* Xb) {
  for (int j = 0; j < d; ++j)
    std::memcpy(Xb + static_cast<std::size_t>(j) * nb,
                xt + static_cast<std::size_t>(j) * n_total + n0,
                static_cast<std::size_t>(nb) * sizeof(double));
}

std::vector<double> transpose_points(std::span<const double> X, int n, int d) {
  std::vector<double> xt(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      xt[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
         static_cast<std::size_t>(i)] =
          X[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
            static_cast<std::size_t>(j)];
  return xt;
}

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

}  // namespace

void predict_batch(const Network& net, std::span<const double> X, int n,
                   std::span<double> out, int jobs) {
  const int d = net.spec.input_dim;
  if (X.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d) ||
      out.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("predict_batch: size mismatch");
  const ParamLayout& lay = net.params.layout();
  const double* th = net.params.all().data();
  const std::vector<double> xt = transpose_points(X, n, d);
  const int nthreads = resolve_jobs(jobs);
  const int nblocks = (n + kBlock - 1) / kBlock;

#pragma omp parallel num_threads(nthreads)
  {
    Engine eng(net.spec, lay);
#pragma omp for schedule(static)
    for (int blk = 0; blk < nblocks; ++blk) {
      const int n0 = blk * kBlock;
      const int nb = std::min(kBlock, n - n0);
      fill_block(xt.data(), n, d, n0, nb, eng.Xb.data());
      eng.forward(th, nb);
      for (int i = 0; i < nb; ++i) out[static_cast<std::size_t>(n0 + i)] = eng.out[static_cast<std::size_t>(i)];
    }
  }
}

struct RegressionObjective::Impl {
  NetworkSpec spec;
  ParamLayout lay;
  int n = 0, d = 0, jobs = 1;
  std::vector<double> xt, y;
  std::vector<std::unique_ptr<Engine>> engines;
  std::vector<std::vector<double>> gbuf;
  std::vector<double> block_loss;

  double run(const double* th, double* gout, bool want_grad) {
    const int nblocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel num_threads(jobs)
    {
      const int tid = omp_get_thread_num();
      Engine& eng = *engines[static_cast<std::size_t>(tid)];
      double* g = nullptr;
      if (want_grad) {
        std::fill(gbuf[static_cast<std::size_t>(tid)].begin(),
                  gbuf[static_cast<std::size_t>(tid)].end(), 0.0);
        g = gbuf[static_cast<std::size_t>(tid)].data();
      }
#pragma omp for schedule(static)
      for (int blk = 0; blk < nblocks; ++blk) {
        const int n0 = blk * kBlock;
        const int nb = std::min(kBlock, n - n0);
        fill_block(xt.data(), n, d, n0, nb, eng.Xb.data());
        eng.forward(th, nb);
        double acc = 0.0;
        const double scale = 2.0 / static_cast<double>(n);
        for (int i = 0; i < nb; ++i) {
          const double r =
              eng.out[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(n0 + i)];
          acc += r * r;
          eng.dout[static_cast<std::size_t>(i)] = scale * r;
        }
        block_loss[static_cast<std::size_t>(blk)] = acc;
        if (want_grad) eng.backward(th, nb, g);
      }
    }
    double loss = 0.0;
    for (double bl : block_loss) loss += bl;
    loss /= static_cast<double>(n);
    if (want_grad) {
      std::fill(gout, gout + lay.total, 0.0);
      for (const std::vector<double>& g : gbuf)
        for (int i = 0; i < lay.total; ++i) gout[i] += g[static_cast<std::size_t>(i)];
    }
    return loss;
  }
};

RegressionObjective::RegressionObjective(const NetworkSpec& spec, const Dataset& data,
                                         int jobs)
    : impl_(std::make_unique<Impl>()) {
  spec.validate();
  if (data.size() == 0) throw std::invalid_argument("RegressionObjective: empty dataset");
  if (data.dim != spec.input_dim)
    throw std::invalid_argument("RegressionObjective: dimension mismatch");
  impl_->spec = spec;
  impl_->lay = layout_of(spec);
  impl_->n = data.size();
  impl_->d = data.dim;
  impl_->jobs = resolve_jobs(jobs);
  impl_->xt = transpose_points(data.X, data.size(), data.dim);
  impl_->y = data.y;
  impl_->block_loss.resize(static_cast<std::size_t>((impl_->n + kBlock - 1) / kBlock));
  for (int t = 0; t < impl_->jobs; ++t) {
    impl_->engines.push_back(std::make_unique<Engine>(spec, impl_->lay));
    impl_->gbuf.emplace_back(static_cast<std::size_t>(impl_->lay.total), 0.0);
  }
}

RegressionObjective::~RegressionObjective() = default;

std::size_t RegressionObjective::dim() const {
  return static_cast<std::size_t>(impl_->lay.total);
}

double RegressionObjective::eval_grad(std::span<const double> theta,
                                      std::span<double> grad) {
  if (theta.size() != dim() || grad.size() != dim())
    throw std::invalid_argument("RegressionObjective: length mismatch");
  return impl_->run(theta.data(), grad.data(), true);
}

double RegressionObjective::eval(std::span<const double> theta) {
  if (theta.size() != dim())
    throw std::invalid_argument("RegressionObjective: length mismatch");
  return impl_->run(theta.data(), nullptr, false);
}

}  // namespace gtnn
