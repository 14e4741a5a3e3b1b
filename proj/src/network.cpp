#include "gtnn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "gtnn/rng.hpp"

namespace gtnn {

std::string family_name(Family f) {
  switch (f) {
    case Family::fnn: return "fnn";
    case Family::qtnn: return "qtnn";
    case Family::ctnn: return "ctnn";
  }
  return "?";
}

Family family_from_name(std::string_view name) {
  if (name == "fnn") return Family::fnn;
  if (name == "qtnn") return Family::qtnn;
  if (name == "ctnn") return Family::ctnn;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

std::string activation_name(Activation a) {
  return a == Activation::relu ? "relu" : "sigmoid";
}

Activation activation_from_name(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw std::invalid_argument("unknown activation: " + std::string(name));
}

void NetworkSpec::validate() const {
  if (depth < 2) throw std::invalid_argument("NetworkSpec: depth must be >= 2");
  if (static_cast<int>(widths.size()) != depth - 1)
    throw std::invalid_argument("NetworkSpec: need depth-1 hidden widths");
  for (int m : widths)
    if (m < 1) throw std::invalid_argument("NetworkSpec: widths must be positive");
  if (input_dim < 1) throw std::invalid_argument("NetworkSpec: input_dim must be >= 1");
  if (composed) {
    if (depth != 3) throw std::invalid_argument("NetworkSpec: composed form requires depth 3");
    if (output_bias)
      throw std::invalid_argument("NetworkSpec: composed form has no output bias");
    if (family == Family::fnn)
      throw std::invalid_argument("NetworkSpec: composed form is defined for qtnn/ctnn only");
  }
}

NetworkSpec make_spec(Family family, int depth, int width, int input_dim, Activation act) {
  NetworkSpec spec;
  spec.family = family;
  spec.depth = depth;
  spec.widths.assign(static_cast<std::size_t>(depth - 1), width);
  spec.input_dim = input_dim;
  spec.activation = act;
  spec.composed = (family != Family::fnn && depth == 3);
  spec.output_bias = !spec.composed;
  spec.validate();
  return spec;
}

int param_count_per_neuron(Family f, int fan_in) {
  switch (f) {
    case Family::fnn: return fan_in + 1;
    case Family::qtnn: return 2 * fan_in + 2;
    case Family::ctnn: return fan_in * fan_in + 2 * fan_in + 2;
  }
  return 0;
}

namespace {

// Lays out one hidden layer starting at offset; returns the next offset.
int lay_layer(Family family, int fan_in, int width, int off, LayerSlices& ls) {
  ls.fan_in = fan_in;
  ls.width = width;
  ls.W = off;
  off += width * fan_in;
  ls.b = off;
  off += width;
  if (family != Family::fnn) {
    ls.U = off;
    off += width * fan_in;
    ls.v = off;
    off += width;
    if (family == Family::ctnn) {
      ls.Q = off;
      off += width * fan_in * fan_in;
    }
  }
  return off;
}

}  // namespace

ParamLayout layout_of(const NetworkSpec& spec) {
  spec.validate();
  ParamLayout lay;
  if (spec.composed) {
    const int mb = spec.widths[0];
    lay.branches = spec.widths[1];
    int off = lay_layer(spec.family, spec.input_dim, mb, 0, lay.branch_layer);
    lay.branch_a = off;
    off += mb;
    lay.branch_stride = off;
    lay.beta = lay.branch_stride * lay.branches;
    lay.alpha = lay.beta + lay.branches;
    lay.total = lay.alpha + lay.branches;
    return lay;
  }
  int off = 0;
  int fan_in = spec.input_dim;
  lay.layers.resize(spec.widths.size());
  for (std::size_t l = 0; l < spec.widths.size(); ++l) {
    off = lay_layer(spec.family, fan_in, spec.widths[l], off, lay.layers[l]);
    fan_in = spec.widths[l];
  }
  lay.a = off;
  off += spec.widths.back();
  if (spec.output_bias) {
    lay.c = off;
    off += 1;
  }
  lay.total = off;
  return lay;
}

int param_count(const NetworkSpec& spec) { return layout_of(spec).total; }

ParamVector::ParamVector(const NetworkSpec& spec)
    : spec_(spec), layout_(layout_of(spec)),
      data_(static_cast<std::size_t>(layout_.total), 0.0) {}

ParamVector init_params(const NetworkSpec& spec, std::uint64_t seed) {
  ParamVector p(spec);
  Rng rng(seed);
  const ParamLayout& lay = p.layout();
  auto fill = [&](std::span<double> s, int width) {
    const double r = 1.0 / std::sqrt(static_cast<double>(width));
    for (double& x : s) x = rng.uniform(-r, r);
  };
  std::span<double> all = p.all();
  if (spec.composed) {
    const int mb = lay.branch_layer.width;
    for (int br = 0; br < lay.branches; ++br) {
      const int base = br * lay.branch_stride;
      fill(all.subspan(static_cast<std::size_t>(base),
                       static_cast<std::size_t>(lay.branch_stride)),
           mb);
    }
    fill(all.subspan(static_cast<std::size_t>(lay.beta),
                     static_cast<std::size_t>(2 * lay.branches)),
         lay.branches);
    return p;
  }
  for (std::size_t l = 0; l < lay.layers.size(); ++l) {
    const LayerSlices& ls = lay.layers[l];
    const int layer_len = (l + 1 < lay.layers.size() ? lay.layers[l + 1].W : lay.a) - ls.W;
    fill(all.subspan(static_cast<std::size_t>(ls.W),
                     static_cast<std::size_t>(layer_len)),
         ls.width);
  }
  const int tail = lay.total - lay.a;
  fill(all.subspan(static_cast<std::size_t>(lay.a), static_cast<std::size_t>(tail)),
       spec.widths.back());
  return p;
}

Network make_network(const NetworkSpec& spec, std::uint64_t seed) {
  return Network{spec, init_params(spec, seed)};
}

double forward(const Network& net, std::span<const double> x) {
  return forward_generic<double, double>(net.spec, net.params.layout(),
                                         net.params.all(), x);
}

Jet2<double> forward_jet(const Network& net, std::span<const double> x, int axis) {
  std::vector<Jet2<double>> xj(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    xj[i] = (static_cast<int>(i) == axis) ? Jet2<double>::variable(x[i])
                                          : Jet2<double>(x[i]);
  return forward_generic<Jet2<double>, double>(net.spec, net.params.layout(),
                                               net.params.all(), xj);
}

std::vector<Var> make_param_leaves(Tape& tape, const ParamVector& params) {
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (double x : params.all()) leaves.push_back(tape.leaf(x));
  return leaves;
}

// ---- profiles ----

ProfileFamily profile_family_from_name(std::string_view name) {
  if (name == "piecewise_quad") return ProfileFamily::piecewise_quad;
  if (name == "piecewise_cubic") return ProfileFamily::piecewise_cubic;
  if (name == "qtnn2") return ProfileFamily::qtnn2;
  if (name == "ctnn2") return ProfileFamily::ctnn2;
  throw std::invalid_argument("unknown profile family: " + std::string(name));
}

std::vector<std::pair<double, double>> profile_emit(ProfileFamily family,
                                                    std::uint64_t seed,
                                                    std::span<const double> grid) {
  for (double x : grid)
    if (x < -5.0 || x > 5.0)
      throw std::invalid_argument("profile_emit: grid point outside [-5,5]");
  Rng rng(seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());

  if (family == ProfileFamily::piecewise_quad || family == ProfileFamily::piecewise_cubic) {
    const int cells = 10;
    const int degree = family == ProfileFamily::piecewise_quad ? 2 : 3;
    std::vector<double> coef(static_cast<std::size_t>(cells * (degree + 1)));
    for (double& c : coef) c = rng.uniform(-2.0, 2.0);
    for (double x : grid) {
      int cell = static_cast<int>((x + 5.0));  // unit cells on [-5,5]
      if (cell >= cells) cell = cells - 1;
      const double t = x + 5.0 - cell;  // local coordinate in [0,1]
      double y = 0.0;
      for (int k = degree; k >= 0; --k)
        y = y * t + coef[static_cast<std::size_t>(cell * (degree + 1) + k)];
      out.emplace_back(x, y);
    }
    return out;
  }

  const Family fam = family == ProfileFamily::qtnn2 ? Family::qtnn : Family::ctnn;
  NetworkSpec spec = make_spec(fam, 2, 8, 1, Activation::relu);
  ParamVector params(spec);
  for (double& x : params.all()) x = rng.uniform(-2.0, 2.0);
  const Network net{spec, params};
  for (double x : grid) out.emplace_back(x, forward(net, std::span<const double>(&x, 1)));
  return out;
}

}  // namespace gtnn
