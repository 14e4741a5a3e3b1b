#include "gtnn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace gtnn {

double rel_l2(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("rel_l2: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("rel_l2: empty sample");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = predicted[i] - truth[i];
    num += e * e;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw std::domain_error("rel_l2: truth is identically zero");
  return std::sqrt(num / den);
}

double loss_ls_value(const Network& net, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("loss_ls: empty dataset");
  double acc = 0.0;
  for (int n = 0; n < data.size(); ++n) {
    const double p = forward(net, data.point(n));
    if (!std::isfinite(p)) throw std::runtime_error("loss_ls: non-finite network output");
    const double e = p - data.y[static_cast<std::size_t>(n)];
    acc += e * e;
  }
  return acc / static_cast<double>(data.size());
}

double loss_ls_grad_tape(const Network& net, const Dataset& data,
                         std::span<double> grad) {
  if (data.size() == 0) throw std::invalid_argument("loss_ls: empty dataset");
  if (grad.size() != net.params.size())
    throw std::invalid_argument("loss_ls: gradient length mismatch");
  Tape tape;
  const std::vector<Var> theta = make_param_leaves(tape, net.params);
  const std::span<const Var> th(theta);
  Var acc;
  for (int n = 0; n < data.size(); ++n) {
    const auto xn = data.point(n);
    std::vector<Var> x(xn.begin(), xn.end());  // untracked constants
    const Var p = forward_generic<Var, Var>(net.spec, net.params.layout(), th, x);
    if (!std::isfinite(p.value()))
      throw std::runtime_error("loss_ls: non-finite network output");
    acc += square(p - data.y[static_cast<std::size_t>(n)]);
  }
  const Var loss = acc * (1.0 / static_cast<double>(data.size()));
  const std::vector<double> g = tape.gradient(loss);
  for (std::size_t i = 0; i < g.size(); ++i) grad[i] = g[i];
  return loss.value();
}

PhiJetFn phi_jet_of(const Network& net) {
  return [&net](std::span<const double> x, int axis) {
    return forward_jet(net, x, axis);
  };
}

AnsatzJets ansatz_value_grad_lap(const PhiJetFn& phi, std::span<const double> x) {
  const int d = static_cast<int>(x.size());
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  AnsatzJets out;
  out.grad.resize(static_cast<std::size_t>(d));
  out.lap_diag.resize(static_cast<std::size_t>(d));
  for (int axis = 0; axis < d; ++axis) {
    const Jet2<double> w(1.0 - r2, -2.0 * x[static_cast<std::size_t>(axis)], -2.0);
    const Jet2<double> u = w * phi(x, axis);
    if (axis == 0) out.value = u.v;
    out.grad[static_cast<std::size_t>(axis)] = u.d1;
    out.lap_diag[static_cast<std::size_t>(axis)] = u.d2;
  }
  return out;
}

AnsatzJets ansatz_value_grad_lap(const Network& net, std::span<const double> x) {
  return ansatz_value_grad_lap(phi_jet_of(net), x);
}

double pinn_residual_at(const PhiJetFn& phi, std::span<const double> x, double rhs) {
  const AnsatzJets jets = ansatz_value_grad_lap(phi, x);
  double advect = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) advect += x[j] * jets.grad[j];
  return pde_coefficient_a(x) * jets.laplacian() + advect - rhs;
}

namespace {

void check_pinn_inputs(const Network& net, std::span<const double> points, int dim,
                       std::span<const double> rhs) {
  if (net.spec.activation != Activation::sigmoid)
    throw std::invalid_argument("loss_pinn: requires a sigmoid network");
  if (dim != net.spec.input_dim)
    throw std::invalid_argument("loss_pinn: dimension mismatch");
  if (rhs.empty() || points.size() != rhs.size() * static_cast<std::size_t>(dim))
    throw std::invalid_argument("loss_pinn: point/rhs size mismatch");
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    double r2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double t = points[n * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
      r2 += t * t;
    }
    if (r2 > 1.0 + 1e-9)
      throw std::invalid_argument("loss_pinn: collocation point outside the unit ball");
  }
}

}  // namespace

double loss_pinn_value(const Network& net, std::span<const double> points, int dim,
                       std::span<const double> rhs) {
  check_pinn_inputs(net, points, dim, rhs);
  const PhiJetFn phi = phi_jet_of(net);
  double acc = 0.0;
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    const auto x = points.subspan(n * static_cast<std::size_t>(dim),
                                  static_cast<std::size_t>(dim));
    const double r = pinn_residual_at(phi, x, rhs[n]);
    if (!std::isfinite(r)) throw std::runtime_error("loss_pinn: non-finite residual");
    acc += r * r;
  }
  return acc / static_cast<double>(rhs.size());
}

double loss_pinn_grad_tape(const Network& net, std::span<const double> points,
                           int dim, std::span<const double> rhs,
                           std::span<double> grad) {
  check_pinn_inputs(net, points, dim, rhs);
  if (grad.size() != net.params.size())
    throw std::invalid_argument("loss_pinn: gradient length mismatch");
  Tape tape;
  const std::vector<Var> theta = make_param_leaves(tape, net.params);
  const std::span<const Var> th(theta);
  Var acc;
  std::vector<Jet2<Var>> xj(static_cast<std::size_t>(dim));
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    const auto x = points.subspan(n * static_cast<std::size_t>(dim),
                                  static_cast<std::size_t>(dim));
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    Var lap_term;   // sum of second derivatives of u_hat
    Var advect;     // x . grad(u_hat)
    for (int axis = 0; axis < dim; ++axis) {
      for (int j = 0; j < dim; ++j)
        xj[static_cast<std::size_t>(j)] =
            (j == axis) ? Jet2<Var>(Var(x[static_cast<std::size_t>(j)]), Var(1.0), Var(0.0))
                        : Jet2<Var>(Var(x[static_cast<std::size_t>(j)]));
      const Jet2<Var> w(Var(1.0 - r2), Var(-2.0 * x[static_cast<std::size_t>(axis)]),
                        Var(-2.0));
      const Jet2<Var> phi =
          forward_generic<Jet2<Var>, Var>(net.spec, net.params.layout(), th, xj);
      const Jet2<Var> u = w * phi;
      lap_term += u.d2;
      advect += Var(x[static_cast<std::size_t>(axis)]) * u.d1;
    }
    const Var residual = Var(pde_coefficient_a(x)) * lap_term + advect - rhs[n];
    if (!std::isfinite(residual.value()))
      throw std::runtime_error("loss_pinn: non-finite residual");
    acc += square(residual);
  }
  const Var loss = acc * (1.0 / static_cast<double>(rhs.size()));
  const std::vector<double> g = tape.gradient(loss);
  for (std::size_t i = 0; i < g.size(); ++i) grad[i] = g[i];
  return loss.value();
}

}  // namespace gtnn
