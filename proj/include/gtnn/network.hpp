#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gtnn/jet.hpp"
#include "gtnn/scalar_ops.hpp"
#include "gtnn/tape.hpp"

namespace gtnn {

enum class Family { fnn, qtnn, ctnn };
enum class Activation { relu, sigmoid };

std::string family_name(Family f);
Family family_from_name(std::string_view name);
std::string activation_name(Activation a);
Activation activation_from_name(std::string_view name);

/// Architecture description.
///
/// depth L counts the output layer, so widths holds the L-1 hidden widths.
/// A hidden layer applies sigma((W y + b) * psi(y)) entry-wise, where psi is
/// identically 1 for fnn, an affine map U y + v for qtnn, and a quadratic
/// [y'Q_i y] + U y + v for ctnn.
///
/// With composed set (L == 3 only, no output bias), the network is instead
/// the split form sum_i alpha_i sigma(t_i(x) + beta_i) with widths[1]
/// branches t_i, each branch a full two-layer net of width widths[0] with
/// its own readout weights and no bias.
struct NetworkSpec {
  Family family = Family::fnn;
  int depth = 2;
  std::vector<int> widths;
  int input_dim = 1;
  Activation activation = Activation::relu;
  bool output_bias = true;
  bool composed = false;

  void validate() const;
};

/// Builds the common experiment architectures: hidden widths all M,
/// composed split form for qtnn/ctnn at L == 3.
NetworkSpec make_spec(Family family, int depth, int width, int input_dim,
                      Activation act);

int param_count_per_neuron(Family f, int fan_in);
int param_count(const NetworkSpec& spec);

/// Offsets of the named parameter groups inside the flat array.
///
/// The flat order doubles as the checkpoint layout: per hidden layer
/// W (row-major), b, then U, v for qtnn/ctnn and the Q_i blocks (row-major,
/// one per neuron) for ctnn; after all layers the readout weights a and the
/// optional bias c. Composed networks store the branches consecutively
/// (each branch: its layer then its readout weights), then beta, then alpha.
struct LayerSlices {
  int W = -1, b = -1, U = -1, v = -1, Q = -1;
  int fan_in = 0, width = 0;
};

struct ParamLayout {
  int total = 0;
  // stacked form
  std::vector<LayerSlices> layers;
  int a = -1, c = -1;
  // composed form
  int branches = 0;
  int branch_stride = 0;
  LayerSlices branch_layer;  // offsets relative to the branch base
  int branch_a = -1;         // relative to the branch base
  int beta = -1, alpha = -1;
};

ParamLayout layout_of(const NetworkSpec& spec);

/// Flat parameter store with named slices. Slices are disjoint and cover
/// the array; the total length always equals param_count(spec).
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(const NetworkSpec& spec);

  const NetworkSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> all() { return data_; }
  std::span<const double> all() const { return data_; }

  // Stacked-form slices; layer index l in [0, L-2].
  std::span<double> W(int l) { return slice(layout_.layers.at(l).W, wsize(l)); }
  std::span<double> b(int l) { return slice(layout_.layers.at(l).b, layout_.layers.at(l).width); }
  std::span<double> U(int l) { return slice(layout_.layers.at(l).U, wsize(l)); }
  std::span<double> v(int l) { return slice(layout_.layers.at(l).v, layout_.layers.at(l).width); }
  /// Quadratic block of neuron i in layer l, a fan_in x fan_in matrix.
  std::span<double> Q(int l, int i) {
    const LayerSlices& s = layout_.layers.at(l);
    const int k = s.fan_in;
    return slice(s.Q + i * k * k, k * k);
  }
  std::span<double> a() { return slice(layout_.a, spec_.widths.back()); }
  double& c() {
    if (layout_.c < 0) throw std::logic_error("ParamVector: spec has no output bias");
    return data_[static_cast<std::size_t>(layout_.c)];
  }

  // Composed-form slices; branch index br in [0, branches).
  std::span<double> branch_W(int br) { return bslice(br, layout_.branch_layer.W, bwsize()); }
  std::span<double> branch_b(int br) { return bslice(br, layout_.branch_layer.b, layout_.branch_layer.width); }
  std::span<double> branch_U(int br) { return bslice(br, layout_.branch_layer.U, bwsize()); }
  std::span<double> branch_v(int br) { return bslice(br, layout_.branch_layer.v, layout_.branch_layer.width); }
  std::span<double> branch_Q(int br, int i) {
    const int k = layout_.branch_layer.fan_in;
    return bslice(br, layout_.branch_layer.Q + i * k * k, k * k);
  }
  std::span<double> branch_a(int br) { return bslice(br, layout_.branch_a, layout_.branch_layer.width); }
  std::span<double> beta() { return slice(layout_.beta, layout_.branches); }
  std::span<double> alpha() { return slice(layout_.alpha, layout_.branches); }

 private:
  std::span<double> slice(int off, int len) {
    if (off < 0) throw std::logic_error("ParamVector: slice absent for this family");
    return std::span<double>(data_).subspan(static_cast<std::size_t>(off),
                                            static_cast<std::size_t>(len));
  }
  std::span<double> bslice(int br, int rel, int len) {
    return slice(br * layout_.branch_stride + rel, len);
  }
  int wsize(int l) const {
    return layout_.layers.at(l).width * layout_.layers.at(l).fan_in;
  }
  int bwsize() const {
    return layout_.branch_layer.width * layout_.branch_layer.fan_in;
  }

  NetworkSpec spec_;
  ParamLayout layout_;
  std::vector<double> data_;
};

/// Draws every parameter i.i.d. from U(-1/sqrt(M), 1/sqrt(M)) with M the
/// width of the owning layer (readout uses the last hidden width).
/// Deterministic in the seed; draw order equals the flat layout order.
ParamVector init_params(const NetworkSpec& spec, std::uint64_t seed);

struct Network {
  NetworkSpec spec;
  ParamVector params;
};

Network make_network(const NetworkSpec& spec, std::uint64_t seed);

// ---- generic forward ----
//
// S is the evaluation scalar (double, Var, Jet2<double>, Jet2<Var>); P is
// the parameter scalar (double or Var). All scalar instantiations follow
// the same operation order, so their value components agree exactly.

namespace detail {

template <class S>
S apply_activation(Activation act, const S& z) {
  return act == Activation::relu ? relu(z) : sigmoid(z);
}

template <class S, class P>
S dot_bias(std::span<const P> w, std::span<const S> y, const P& bias) {
  S acc(bias);
  for (std::size_t j = 0; j < y.size(); ++j) acc = acc + w[j] * y[j];
  return acc;
}

template <class S, class P>
std::vector<S> apply_layer(const NetworkSpec& spec, const LayerSlices& ls,
                           std::span<const P> th, std::span<const S> y) {
  const int m = ls.width;
  const int k = ls.fan_in;
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto wrow = th.subspan(static_cast<std::size_t>(ls.W + i * k),
                                 static_cast<std::size_t>(k));
    S pre = dot_bias<S, P>(wrow, y, th[static_cast<std::size_t>(ls.b + i)]);
    if (spec.family != Family::fnn) {
      const auto urow = th.subspan(static_cast<std::size_t>(ls.U + i * k),
                                   static_cast<std::size_t>(k));
      S psi = dot_bias<S, P>(urow, y, th[static_cast<std::size_t>(ls.v + i)]);
      if (spec.family == Family::ctnn) {
        const auto q = th.subspan(static_cast<std::size_t>(ls.Q + i * k * k),
                                  static_cast<std::size_t>(k * k));
        S quad{};
        for (int r = 0; r < k; ++r)
          for (int s = 0; s < k; ++s)
            quad = quad + q[static_cast<std::size_t>(r * k + s)] *
                              (y[static_cast<std::size_t>(r)] * y[static_cast<std::size_t>(s)]);
        psi = psi + quad;
      }
      pre = pre * psi;
    }
    out.push_back(apply_activation(spec.activation, pre));
  }
  return out;
}

}  // namespace detail

template <class S, class P>
S forward_generic(const NetworkSpec& spec, const ParamLayout& lay,
                  std::span<const P> th, std::span<const S> x) {
  if (static_cast<int>(x.size()) != spec.input_dim)
    throw std::invalid_argument("forward: input dimension mismatch");
  if (static_cast<int>(th.size()) != lay.total)
    throw std::invalid_argument("forward: parameter length mismatch");

  if (spec.composed) {
    const int mb = lay.branch_layer.width;
    S out{};
    for (int br = 0; br < lay.branches; ++br) {
      const int base = br * lay.branch_stride;
      LayerSlices ls = lay.branch_layer;
      ls.W += base;
      ls.b += base;
      ls.U += base;
      ls.v += base;
      if (ls.Q >= 0) ls.Q += base;
      std::vector<S> h = detail::apply_layer<S, P>(spec, ls, th, x);
      const auto arow = th.subspan(static_cast<std::size_t>(base + lay.branch_a),
                                   static_cast<std::size_t>(mb));
      S t{};
      for (int m = 0; m < mb; ++m)
        t = t + arow[static_cast<std::size_t>(m)] * h[static_cast<std::size_t>(m)];
      S z = t + th[static_cast<std::size_t>(lay.beta + br)];
      out = out + th[static_cast<std::size_t>(lay.alpha + br)] *
                      detail::apply_activation(spec.activation, z);
    }
    return out;
  }

  std::vector<S> y(x.begin(), x.end());
  for (const LayerSlices& ls : lay.layers)
    y = detail::apply_layer<S, P>(spec, ls, th, y);
  const auto aw = th.subspan(static_cast<std::size_t>(lay.a),
                             static_cast<std::size_t>(spec.widths.back()));
  S out{};
  for (std::size_t m = 0; m < y.size(); ++m) out = out + aw[m] * y[m];
  if (spec.output_bias) out = out + th[static_cast<std::size_t>(lay.c)];
  return out;
}

/// Plain evaluation.
double forward(const Network& net, std::span<const double> x);

/// Second-order jet of the output along coordinate axis at x.
Jet2<double> forward_jet(const Network& net, std::span<const double> x, int axis);

/// Registers every parameter as a leaf on the tape, in flat layout order.
std::vector<Var> make_param_leaves(Tape& tape, const ParamVector& params);

// ---- profile emission ----

enum class ProfileFamily { piecewise_quad, piecewise_cubic, qtnn2, ctnn2 };

ProfileFamily profile_family_from_name(std::string_view name);

/// Evaluates a random-coefficient instance of the family on the grid.
/// Piecewise polynomials live on 10 equal cells of [-5,5] with coefficients
/// from U(-2,2); qtnn2/ctnn2 are width-8 two-layer relu nets with all
/// parameters from U(-2,2). Grid points must lie in [-5,5].
std::vector<std::pair<double, double>> profile_emit(ProfileFamily family,
                                                    std::uint64_t seed,
                                                    std::span<const double> grid);

// ---- checkpoints ----

void save_checkpoint(const std::string& path, const Network& net);
Network load_checkpoint(const std::string& path);

}  // namespace gtnn
