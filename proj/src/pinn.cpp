#include "gtnn/pinn.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "gtnn/batch.hpp"
#include "gtnn/scalar_ops.hpp"
#include "gtnn/targets.hpp"

namespace gtnn {

namespace {

constexpr int kMaxDim = 8;
constexpr int kChunk = 64;  // points per scheduling chunk

// Multijet: value, d first derivatives, d second derivatives along the
// coordinate axes. Stored per scalar as [v, d1[0..d), d2[0..d)].

struct SigmaDerivs {
  double s, s1, s2, s3;
};

inline SigmaDerivs sigma_derivs(double z) {
  const double s = 1.0 / (1.0 + std::exp(-z));
  const double s1 = s * (1.0 - s);
  const double s2 = s1 * (1.0 - 2.0 * s);
  const double s3 = s1 * (1.0 - 2.0 * s) * (1.0 - 2.0 * s) - 2.0 * s1 * s1;
  return {s, s1, s2, s3};
}

// Stored state of one general layer applied to the raw input point.
// Per neuron: pv, qv, sv scalars and qd1, qd2, zd1, zd2, sd1, sd2 vectors.
struct GeneralLayerState {
  int m = 0, d = 0;
  std::vector<double> pv, qv, sv;
  std::vector<double> qd1, qd2, zd1, zd2, sd1, sd2;  // m*d each

  void resize(int width, int dim) {
    m = width;
    d = dim;
    pv.resize(static_cast<std::size_t>(m));
    qv.resize(static_cast<std::size_t>(m));
    sv.resize(static_cast<std::size_t>(m));
    const std::size_t md = static_cast<std::size_t>(m) * static_cast<std::size_t>(d);
    qd1.resize(md);
    qd2.resize(md);
    zd1.resize(md);
    zd2.resize(md);
    sd1.resize(md);
    sd2.resize(md);
  }
};

struct LayerParamsView {
  const double *W, *b, *U, *v, *Q;
  int k, m;
  Family fam;
};

LayerParamsView view_of(const double* th, const LayerSlices& ls, int base, Family fam) {
  LayerParamsView L;
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

// Forward of sigma((w.x+b)(psi(x))) for one general layer on the raw point.
// The input jets are trivial (d1 = e_i, d2 = 0), which collapses the product
// rules to closed forms.
void general_layer_forward(const LayerParamsView& L, const double* x,
                           GeneralLayerState& st) {
  const int d = L.k;
  st.resize(L.m, d);
  for (int i = 0; i < L.m; ++i) {
    const double* w = L.W + i * d;
    double pv = L.b[i];
    for (int j = 0; j < d; ++j) pv += w[j] * x[j];
    st.pv[static_cast<std::size_t>(i)] = pv;

    double* qd1 = st.qd1.data() + static_cast<std::size_t>(i) * d;
    double* qd2 = st.qd2.data() + static_cast<std::size_t>(i) * d;
    double qv;
    if (L.fam == Family::fnn) {
      qv = 1.0;
      for (int j = 0; j < d; ++j) qd1[j] = 0.0;
      for (int j = 0; j < d; ++j) qd2[j] = 0.0;
    } else {
      const double* u = L.U + i * d;
      qv = L.v[i];
      for (int j = 0; j < d; ++j) qv += u[j] * x[j];
      for (int j = 0; j < d; ++j) qd1[j] = u[j];
      for (int j = 0; j < d; ++j) qd2[j] = 0.0;
      if (L.fam == Family::ctnn) {
        const double* Qi = L.Q + i * d * d;
        for (int r = 0; r < d; ++r) {
          double acc = 0.0;
          for (int c = 0; c < d; ++c) acc += Qi[r * d + c] * x[c];
          qv += x[r] * acc;
          double sym = 0.0;
          for (int c = 0; c < d; ++c) sym += (Qi[r * d + c] + Qi[c * d + r]) * x[c];
          qd1[r] += sym;
          qd2[r] = 2.0 * Qi[r * d + r];
        }
      }
    }
    st.qv[static_cast<std::size_t>(i)] = qv;

    double* zd1 = st.zd1.data() + static_cast<std::size_t>(i) * d;
    double* zd2 = st.zd2.data() + static_cast<std::size_t>(i) * d;
    const double zv = pv * qv;
    for (int j = 0; j < d; ++j) {
      zd1[j] = pv * qd1[j] + w[j] * qv;
      zd2[j] = pv * qd2[j] + 2.0 * w[j] * qd1[j];
    }
    const SigmaDerivs sg = sigma_derivs(zv);
    st.sv[static_cast<std::size_t>(i)] = sg.s;
    double* sd1 = st.sd1.data() + static_cast<std::size_t>(i) * d;
    double* sd2 = st.sd2.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) {
      sd1[j] = sg.s1 * zd1[j];
      sd2[j] = sg.s2 * zd1[j] * zd1[j] + sg.s1 * zd2[j];
    }
  }
}

struct LayerGradsView {
  double *W, *b, *U, *v, *Q;
};

LayerGradsView grads_of(double* g, const LayerSlices& ls, int base, Family fam) {
  LayerGradsView G;
  G.W = g + base + ls.W;
  G.b = g + base + ls.b;
  G.U = fam != Family::fnn ? g + base + ls.U : nullptr;
  G.v = fam != Family::fnn ? g + base + ls.v : nullptr;
  G.Q = fam == Family::ctnn ? g + base + ls.Q : nullptr;
  return G;
}

// Backward of general_layer_forward. sb* hold the adjoints of the stored
// activation jets (per neuron, same layout as st.sv/sd1/sd2).
void general_layer_backward(const LayerParamsView& L, const double* x,
                            const GeneralLayerState& st, const double* sbv,
                            const double* sbd1, const double* sbd2,
                            const LayerGradsView& G) {
  const int d = L.k;
  double zbd1[kMaxDim], zbd2[kMaxDim], qbd1[kMaxDim];
  for (int i = 0; i < L.m; ++i) {
    const double* w = L.W + i * d;
    const double pv = st.pv[static_cast<std::size_t>(i)];
    const double qv = st.qv[static_cast<std::size_t>(i)];
    const double* qd1 = st.qd1.data() + static_cast<std::size_t>(i) * d;
    const double* qd2 = st.qd2.data() + static_cast<std::size_t>(i) * d;
    const double* zd1 = st.zd1.data() + static_cast<std::size_t>(i) * d;
    const double* zd2 = st.zd2.data() + static_cast<std::size_t>(i) * d;
    const SigmaDerivs sg = sigma_derivs(pv * qv);

    // Through the activation jets.
    const double* sv_bar = sbv + i;
    const double* s1_bar = sbd1 + static_cast<std::size_t>(i) * d;
    const double* s2_bar = sbd2 + static_cast<std::size_t>(i) * d;
    double zbv = *sv_bar * sg.s1;
    for (int j = 0; j < d; ++j) {
      zbv += s1_bar[j] * sg.s2 * zd1[j];
      zbv += s2_bar[j] * (sg.s3 * zd1[j] * zd1[j] + sg.s2 * zd2[j]);
      zbd1[j] = s1_bar[j] * sg.s1 + 2.0 * s2_bar[j] * sg.s2 * zd1[j];
      zbd2[j] = s2_bar[j] * sg.s1;
    }

    // Through z = p*q with pd1 = w, pd2 = 0.
    double pbv = zbv * qv;
    double qbv = zbv * pv;
    for (int j = 0; j < d; ++j) {
      pbv += zbd1[j] * qd1[j] + zbd2[j] * qd2[j];
      qbv += zbd1[j] * w[j];
      qbd1[j] = zbd1[j] * pv + 2.0 * zbd2[j] * w[j];
    }

    // Parameter gradients. p = w.x + b contributes through its value and
    // through pd1 = w; q likewise through value, qd1, and (ctnn) qd2.
    G.b[i] += pbv;
    double* gw = G.W + i * d;
    for (int j = 0; j < d; ++j) {
      const double pbd1 = zbd1[j] * qv + 2.0 * zbd2[j] * qd1[j];
      gw[j] += pbv * x[j] + pbd1;
    }
    if (L.fam != Family::fnn) {
      G.v[i] += qbv;
      double* gu = G.U + i * d;
      for (int j = 0; j < d; ++j) gu[j] += qbv * x[j] + qbd1[j];
      if (L.fam == Family::ctnn) {
        double* gq = G.Q + i * d * d;
        const double* zbd2_ = zbd2;
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c)
            gq[r * d + c] += qbv * x[r] * x[c] + qbd1[r] * x[c] + qbd1[c] * x[r];
        for (int r = 0; r < d; ++r) gq[r * d + r] += 2.0 * zbd2_[r] * pv;
      }
    }
  }
}

// Per-layer multijet state for stacked fnn on general (non-trivial) inputs.
struct FnnLayerState {
  int m = 0, nc = 0;
  std::vector<double> z;  // m*nc pre-activation jets
  std::vector<double> s;  // m*nc activation jets

  void resize(int width, int comps) {
    m = width;
    nc = comps;
    z.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(nc));
    s.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(nc));
  }
};

struct PointWork {
  GeneralLayerState gl;                // layer on the raw input
  std::vector<double> sbv, sbd1, sbd2; // adjoints for the general layer
  std::vector<FnnLayerState> fnn;      // stacked fnn layers
  std::vector<double> fnn_in;          // input jets d*nc
  std::vector<double> fnn_bar;         // adjoint ping-pong, max width * nc
  std::vector<double> fnn_bar2;
  std::vector<double> t;               // composed: branch jets B*nc
};

// The sigma chain backward for a single multijet scalar: given the stored
// pre-activation jets z (nc comps) and the adjoint of sigma(z), accumulate
// the adjoint of z.
inline void sigma_jet_backward(int d, const double* z, const double* sbar, double* zbar) {
  const SigmaDerivs sg = sigma_derivs(z[0]);
  double acc = sbar[0] * sg.s1;
  for (int j = 0; j < d; ++j) {
    const double z1 = z[1 + j];
    const double z2 = z[1 + d + j];
    acc += sbar[1 + j] * sg.s2 * z1;
    acc += sbar[1 + d + j] * (sg.s3 * z1 * z1 + sg.s2 * z2);
    zbar[1 + j] = sbar[1 + j] * sg.s1 + 2.0 * sbar[1 + d + j] * sg.s2 * z1;
    zbar[1 + d + j] = sbar[1 + d + j] * sg.s1;
  }
  zbar[0] = acc;
}

inline void sigma_jet_forward(int d, const double* z, double* s) {
  const SigmaDerivs sg = sigma_derivs(z[0]);
  s[0] = sg.s;
  for (int j = 0; j < d; ++j) {
    const double z1 = z[1 + j];
    s[1 + j] = sg.s1 * z1;
    s[1 + d + j] = sg.s2 * z1 * z1 + sg.s1 * z[1 + d + j];
  }
}

}  // namespace

struct PinnObjective::Impl {
  NetworkSpec spec;
  ParamLayout lay;
  int n = 0, d = 0, nc = 0, jobs = 1;
  std::vector<double> pts;  // row-major
  std::vector<double> rhs;
  std::vector<std::vector<double>> gbuf;
  std::vector<PointWork> work;
  std::vector<double> chunk_loss;

  enum class Path { general_l2, composed, fnn_stacked };
  Path path = Path::general_l2;

  double point_loss(const double* th, const double* x, double f, PointWork& w,
                    double* g);
  double run(const double* th, double* gout, bool want_grad);

  // Forward helpers shared by value and gradient paths.
  void phi_jets(const double* th, const double* x, PointWork& w, double* phi);
};

// Computes the multijet of phi at x into phi[0..nc). Stores the per-layer
// state needed by the backward pass in w.
void PinnObjective::Impl::phi_jets(const double* th, const double* x, PointWork& w,
                                   double* phi) {
  if (path == Path::composed) {
    const int mb = lay.branch_layer.width;
    for (int c = 0; c < nc; ++c) phi[c] = 0.0;
    for (int br = 0; br < lay.branches; ++br) {
      const int base = br * lay.branch_stride;
      const LayerParamsView L = view_of(th, lay.branch_layer, base, spec.family);
      general_layer_forward(L, x, w.gl);
      const double* ab = th + base + lay.branch_a;
      double* t = w.t.data() + static_cast<std::size_t>(br) * nc;
      for (int c = 0; c < nc; ++c) t[c] = 0.0;
      for (int m = 0; m < mb; ++m) {
        const double am = ab[m];
        t[0] += am * w.gl.sv[static_cast<std::size_t>(m)];
        const double* sd1 = w.gl.sd1.data() + static_cast<std::size_t>(m) * d;
        const double* sd2 = w.gl.sd2.data() + static_cast<std::size_t>(m) * d;
        for (int j = 0; j < d; ++j) {
          t[1 + j] += am * sd1[j];
          t[1 + d + j] += am * sd2[j];
        }
      }
      // Second-layer neuron: sigma(t + beta), then alpha * that.
      double zfull[2 * kMaxDim + 1];
      for (int c = 0; c < nc; ++c) zfull[c] = t[c];
      zfull[0] += th[lay.beta + br];
      double s2[2 * kMaxDim + 1];
      sigma_jet_forward(d, zfull, s2);
      const double alpha = th[lay.alpha + br];
      for (int c = 0; c < nc; ++c) phi[c] += alpha * s2[c];
    }
    return;
  }

  if (path == Path::general_l2) {
    const LayerParamsView L = view_of(th, lay.layers[0], 0, spec.family);
    general_layer_forward(L, x, w.gl);
    const double* aw = th + lay.a;
    for (int c = 0; c < nc; ++c) phi[c] = 0.0;
    if (spec.output_bias) phi[0] = th[lay.c];
    for (int m = 0; m < L.m; ++m) {
      const double am = aw[m];
      phi[0] += am * w.gl.sv[static_cast<std::size_t>(m)];
      const double* sd1 = w.gl.sd1.data() + static_cast<std::size_t>(m) * d;
      const double* sd2 = w.gl.sd2.data() + static_cast<std::size_t>(m) * d;
      for (int j = 0; j < d; ++j) {
        phi[1 + j] += am * sd1[j];
        phi[1 + d + j] += am * sd2[j];
      }
    }
    return;
  }

  // Stacked fnn of any depth: all layers are affine in the jets.
  // Input jets: x_j has v = x[j], d1 = e_j, d2 = 0.
  for (int j = 0; j < d; ++j) {
    double* in = w.fnn_in.data() + static_cast<std::size_t>(j) * nc;
    for (int c = 0; c < nc; ++c) in[c] = 0.0;
    in[0] = x[j];
    in[1 + j] = 1.0;
  }
  const double* y = w.fnn_in.data();
  int yk = d;
  for (std::size_t l = 0; l < lay.layers.size(); ++l) {
    const LayerSlices& ls = lay.layers[l];
    FnnLayerState& st = w.fnn[l];
    st.resize(ls.width, nc);
    const double* W = th + ls.W;
    const double* b = th + ls.b;
    for (int i = 0; i < ls.width; ++i) {
      double* z = st.z.data() + static_cast<std::size_t>(i) * nc;
      for (int c = 0; c < nc; ++c) z[c] = 0.0;
      z[0] = b[i];
      for (int j = 0; j < yk; ++j) {
        const double wij = W[i * yk + j];
        const double* yj = y + static_cast<std::size_t>(j) * nc;
        for (int c = 0; c < nc; ++c) z[c] += wij * yj[c];
      }
      sigma_jet_forward(d, z, st.s.data() + static_cast<std::size_t>(i) * nc);
    }
    y = st.s.data();
    yk = ls.width;
  }
  const double* aw = th + lay.a;
  for (int c = 0; c < nc; ++c) phi[c] = 0.0;
  if (spec.output_bias) phi[0] = th[lay.c];
  const FnnLayerState& last = w.fnn.back();
  for (int m = 0; m < last.m; ++m) {
    const double am = aw[m];
    const double* s = last.s.data() + static_cast<std::size_t>(m) * nc;
    for (int c = 0; c < nc; ++c) phi[c] += am * s[c];
  }
}

double PinnObjective::Impl::point_loss(const double* th, const double* x, double f,
                                       PointWork& w, double* g) {
  double phi[2 * kMaxDim + 1];
  phi_jets(th, x, w, phi);

  // Ansatz jets: wjet = (1 - |x|^2, -2 x_j, -2).
  double r2 = 0.0;
  for (int j = 0; j < d; ++j) r2 += x[j] * x[j];
  const double wv = 1.0 - r2;

  // u = wjet * phi, then residual = a(x) * sum_j u.d2[j] + sum_j x_j u.d1[j] - f.
  const double ax = 1.0 + 0.5 * r2;
  double residual = -f;
  for (int j = 0; j < d; ++j) {
    const double wd1 = -2.0 * x[j];
    const double ud1 = wv * phi[1 + j] + wd1 * phi[0];
    const double ud2 = wv * phi[1 + d + j] + 2.0 * wd1 * phi[1 + j] - 2.0 * phi[0];
    residual += ax * ud2 + x[j] * ud1;
  }
  const double loss = residual * residual;
  if (!g) return loss;

  // Backward; the caller divides the accumulated gradient by n afterwards.
  const double rbar = 2.0 * residual;
  double phibar[2 * kMaxDim + 1];
  phibar[0] = 0.0;
  for (int j = 0; j < d; ++j) {
    const double wd1 = -2.0 * x[j];
    const double ud1_bar = rbar * x[j];
    const double ud2_bar = rbar * ax;
    // u.d1[j] = wv phi.d1[j] + wd1 phi.v ; u.d2[j] = wv phi.d2[j] + 2 wd1 phi.d1[j] - 2 phi.v
    phibar[1 + j] = ud1_bar * wv + ud2_bar * 2.0 * wd1;
    phibar[1 + d + j] = ud2_bar * wv;
    phibar[0] += ud1_bar * wd1 - 2.0 * ud2_bar;
  }

  if (path == Path::composed) {
    const int mb = lay.branch_layer.width;
    for (int br = 0; br < lay.branches; ++br) {
      const int base = br * lay.branch_stride;
      const LayerParamsView L = view_of(th, lay.branch_layer, base, spec.family);
      // Branch state is recomputed rather than stored for every branch.
      general_layer_forward(L, x, w.gl);
      const double alpha = th[lay.alpha + br];
      double t[2 * kMaxDim + 1];
      const double* ab = th + base + lay.branch_a;
      for (int c = 0; c < nc; ++c) t[c] = 0.0;
      for (int m = 0; m < mb; ++m) {
        const double am = ab[m];
        t[0] += am * w.gl.sv[static_cast<std::size_t>(m)];
        const double* sd1 = w.gl.sd1.data() + static_cast<std::size_t>(m) * d;
        const double* sd2 = w.gl.sd2.data() + static_cast<std::size_t>(m) * d;
        for (int j = 0; j < d; ++j) {
          t[1 + j] += am * sd1[j];
          t[1 + d + j] += am * sd2[j];
        }
      }
      double zfull[2 * kMaxDim + 1];
      for (int c = 0; c < nc; ++c) zfull[c] = t[c];
      zfull[0] += th[lay.beta + br];
      double s2[2 * kMaxDim + 1];
      sigma_jet_forward(d, zfull, s2);

      // dalpha, and the adjoint of s2 jets.
      double s2bar[2 * kMaxDim + 1];
      double dalpha = 0.0;
      for (int c = 0; c < nc; ++c) {
        dalpha += phibar[c] * s2[c];
        s2bar[c] = phibar[c] * alpha;
      }
      g[lay.alpha + br] += dalpha;
      double zbar[2 * kMaxDim + 1];
      sigma_jet_backward(d, zfull, s2bar, zbar);
      g[lay.beta + br] += zbar[0];

      // t adjoints equal zbar; distribute onto readout weights and the
      // activation jets of the branch layer.
      double* ga = g + base + lay.branch_a;
      for (int m = 0; m < mb; ++m) {
        const double* sd1 = w.gl.sd1.data() + static_cast<std::size_t>(m) * d;
        const double* sd2 = w.gl.sd2.data() + static_cast<std::size_t>(m) * d;
        const double am = ab[m];
        double da = zbar[0] * w.gl.sv[static_cast<std::size_t>(m)];
        w.sbv[static_cast<std::size_t>(m)] = zbar[0] * am;
        double* sb1 = w.sbd1.data() + static_cast<std::size_t>(m) * d;
        double* sb2 = w.sbd2.data() + static_cast<std::size_t>(m) * d;
        for (int j = 0; j < d; ++j) {
          da += zbar[1 + j] * sd1[j] + zbar[1 + d + j] * sd2[j];
          sb1[j] = zbar[1 + j] * am;
          sb2[j] = zbar[1 + d + j] * am;
        }
        ga[m] += da;
      }
      const LayerGradsView G = grads_of(g, lay.branch_layer, base, spec.family);
      general_layer_backward(L, x, w.gl, w.sbv.data(), w.sbd1.data(), w.sbd2.data(), G);
    }
    return loss;
  }

  if (path == Path::general_l2) {
    const LayerParamsView L = view_of(th, lay.layers[0], 0, spec.family);
    const double* aw = th + lay.a;
    if (spec.output_bias) g[lay.c] += phibar[0];
    for (int m = 0; m < L.m; ++m) {
      const double am = aw[m];
      const double* sd1 = w.gl.sd1.data() + static_cast<std::size_t>(m) * d;
      const double* sd2 = w.gl.sd2.data() + static_cast<std::size_t>(m) * d;
      double da = phibar[0] * w.gl.sv[static_cast<std::size_t>(m)];
      w.sbv[static_cast<std::size_t>(m)] = phibar[0] * am;
      double* sb1 = w.sbd1.data() + static_cast<std::size_t>(m) * d;
      double* sb2 = w.sbd2.data() + static_cast<std::size_t>(m) * d;
      for (int j = 0; j < d; ++j) {
        da += phibar[1 + j] * sd1[j] + phibar[1 + d + j] * sd2[j];
        sb1[j] = phibar[1 + j] * am;
        sb2[j] = phibar[1 + d + j] * am;
      }
      g[lay.a + m] += da;
    }
    const LayerGradsView G = grads_of(g, lay.layers[0], 0, spec.family);
    general_layer_backward(L, x, w.gl, w.sbv.data(), w.sbd1.data(), w.sbd2.data(), G);
    return loss;
  }

  // Stacked fnn backward.
  const double* aw = th + lay.a;
  if (spec.output_bias) g[lay.c] += phibar[0];
  const FnnLayerState& last = w.fnn.back();
  double* sbar = w.fnn_bar.data();
  for (int m = 0; m < last.m; ++m) {
    const double* s = last.s.data() + static_cast<std::size_t>(m) * nc;
    double* sb = sbar + static_cast<std::size_t>(m) * nc;
    const double am = aw[m];
    double da = 0.0;
    for (int c = 0; c < nc; ++c) {
      da += phibar[c] * s[c];
      sb[c] = phibar[c] * am;
    }
    g[lay.a + m] += da;
  }
  for (int l = static_cast<int>(lay.layers.size()) - 1; l >= 0; --l) {
    const LayerSlices& ls = lay.layers[static_cast<std::size_t>(l)];
    FnnLayerState& st = w.fnn[static_cast<std::size_t>(l)];
    const int yk = ls.fan_in;
    const double* y = l == 0 ? w.fnn_in.data()
                             : w.fnn[static_cast<std::size_t>(l - 1)].s.data();
    const double* W = th + ls.W;
    double* ybar = w.fnn_bar2.data();
    for (int j = 0; j < yk; ++j)
      for (int c = 0; c < nc; ++c) ybar[static_cast<std::size_t>(j) * nc + c] = 0.0;
    for (int i = 0; i < st.m; ++i) {
      const double* z = st.z.data() + static_cast<std::size_t>(i) * nc;
      const double* sb = sbar + static_cast<std::size_t>(i) * nc;
      double zbar[2 * kMaxDim + 1];
      sigma_jet_backward(d, z, sb, zbar);
      g[ls.b + i] += zbar[0];
      for (int j = 0; j < yk; ++j) {
        const double* yj = y + static_cast<std::size_t>(j) * nc;
        double* ybj = ybar + static_cast<std::size_t>(j) * nc;
        const double wij = W[i * yk + j];
        double dw = 0.0;
        for (int c = 0; c < nc; ++c) {
          dw += zbar[c] * yj[c];
          ybj[c] += wij * zbar[c];
        }
        g[ls.W + i * yk + j] += dw;
      }
    }
    std::swap(w.fnn_bar, w.fnn_bar2);
    sbar = w.fnn_bar.data();
  }
  return loss;
}

double PinnObjective::Impl::run(const double* th, double* gout, bool want_grad) {
  const int nchunks = (n + kChunk - 1) / kChunk;
#pragma omp parallel num_threads(jobs)
  {
    const int tid = omp_get_thread_num();
    PointWork& w = work[static_cast<std::size_t>(tid)];
    double* g = nullptr;
    if (want_grad) {
      std::fill(gbuf[static_cast<std::size_t>(tid)].begin(),
                gbuf[static_cast<std::size_t>(tid)].end(), 0.0);
      g = gbuf[static_cast<std::size_t>(tid)].data();
    }
#pragma omp for schedule(static)
    for (int ch = 0; ch < nchunks; ++ch) {
      const int n0 = ch * kChunk;
      const int n1 = std::min(n, n0 + kChunk);
      double acc = 0.0;
      for (int i = n0; i < n1; ++i) {
        acc += point_loss(th, pts.data() + static_cast<std::size_t>(i) * d,
                          rhs[static_cast<std::size_t>(i)], w, g);
      }
      chunk_loss[static_cast<std::size_t>(ch)] = acc;
    }
  }
  double loss = 0.0;
  for (double cl : chunk_loss) loss += cl;
  loss /= static_cast<double>(n);
  if (want_grad) {
    std::fill(gout, gout + lay.total, 0.0);
    for (const std::vector<double>& g : gbuf)
      for (int i = 0; i < lay.total; ++i) gout[i] += g[static_cast<std::size_t>(i)];
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int i = 0; i < lay.total; ++i) gout[i] *= inv_n;
  }
  return loss;
}

PinnObjective::PinnObjective(const NetworkSpec& spec, std::vector<double> points,
                             std::vector<double> rhs, int jobs)
    : impl_(std::make_unique<Impl>()) {
  spec.validate();
  if (spec.activation != Activation::sigmoid)
    throw std::invalid_argument("PinnObjective: requires a sigmoid network");
  const int d = spec.input_dim;
  if (d > kMaxDim) throw std::invalid_argument("PinnObjective: dimension too large");
  if (rhs.empty() || points.size() != rhs.size() * static_cast<std::size_t>(d))
    throw std::invalid_argument("PinnObjective: point/rhs size mismatch");
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double t = points[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
      r2 += t * t;
    }
    if (r2 > 1.0 + 1e-9)
      throw std::invalid_argument("PinnObjective: point outside the unit ball");
  }

  Impl& im = *impl_;
  im.spec = spec;
  im.lay = layout_of(spec);
  im.n = static_cast<int>(rhs.size());
  im.d = d;
  im.nc = 1 + 2 * d;
  im.jobs = jobs > 0 ? jobs : omp_get_max_threads();
  im.pts = std::move(points);
  im.rhs = std::move(rhs);
  im.chunk_loss.resize(static_cast<std::size_t>((im.n + kChunk - 1) / kChunk));

  if (spec.composed) {
    im.path = Impl::Path::composed;
  } else if (spec.family == Family::fnn) {
    im.path = Impl::Path::fnn_stacked;
  } else if (spec.depth == 2) {
    im.path = Impl::Path::general_l2;
  } else {
    throw std::invalid_argument(
        "PinnObjective: stacked qtnn/ctnn deeper than two layers is not supported; "
        "use the composed three-layer form");
  }

  for (int t = 0; t < im.jobs; ++t) {
    PointWork w;
    const int maxw = *std::max_element(spec.widths.begin(), spec.widths.end());
    w.sbv.resize(static_cast<std::size_t>(maxw));
    w.sbd1.resize(static_cast<std::size_t>(maxw) * static_cast<std::size_t>(d));
    w.sbd2.resize(static_cast<std::size_t>(maxw) * static_cast<std::size_t>(d));
    if (im.path == Impl::Path::composed)
      w.t.resize(static_cast<std::size_t>(im.lay.branches) * static_cast<std::size_t>(im.nc));
    if (im.path == Impl::Path::fnn_stacked) {
      w.fnn.resize(im.lay.layers.size());
      w.fnn_in.resize(static_cast<std::size_t>(d) * static_cast<std::size_t>(im.nc));
      w.fnn_bar.resize(static_cast<std::size_t>(maxw) * static_cast<std::size_t>(im.nc));
      w.fnn_bar2.resize(static_cast<std::size_t>(maxw) * static_cast<std::size_t>(im.nc));
    }
    im.work.push_back(std::move(w));
    im.gbuf.emplace_back(static_cast<std::size_t>(im.lay.total), 0.0);
  }
}

PinnObjective::~PinnObjective() = default;

std::size_t PinnObjective::dim() const { return static_cast<std::size_t>(impl_->lay.total); }

double PinnObjective::eval_grad(std::span<const double> theta, std::span<double> grad) {
  if (theta.size() != dim() || grad.size() != dim())
    throw std::invalid_argument("PinnObjective: length mismatch");
  return impl_->run(theta.data(), grad.data(), true);
}

double PinnObjective::eval(std::span<const double> theta) {
  if (theta.size() != dim())
    throw std::invalid_argument("PinnObjective: length mismatch");
  return impl_->run(theta.data(), nullptr, false);
}

void predict_ansatz(const Network& net, std::span<const double> X, int n,
                    std::span<double> out, int jobs) {
  predict_batch(net, X, n, out, jobs);
  const int d = net.spec.input_dim;
  for (int i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double t = X[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
      r2 += t * t;
    }
    out[static_cast<std::size_t>(i)] *= 1.0 - r2;
  }
}

}  // namespace gtnn
