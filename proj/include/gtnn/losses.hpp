#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gtnn/network.hpp"
#include "gtnn/targets.hpp"

namespace gtnn {

/// Relative l2 error sqrt(sum |p-t|^2 / sum |t|^2) over paired samples.
/// Throws if the truth values are identically zero.
double rel_l2(std::span<const double> predicted, std::span<const double> truth);

/// Mean squared error over the dataset.
double loss_ls_value(const Network& net, const Dataset& data);

/// Reverse-mode gradient of the mean squared error through a scalar tape;
/// returns the loss. Reference implementation used to validate the batched
/// training kernels.
double loss_ls_grad_tape(const Network& net, const Dataset& data,
                         std::span<double> grad);

/// phi evaluated as a second-order jet along one coordinate axis; realized
/// by networks and by closed-form test functions alike.
using PhiJetFn =
    std::function<Jet2<double>(std::span<const double> x, int axis)>;

PhiJetFn phi_jet_of(const Network& net);

/// Boundary-conforming value u_hat = (1 - |x|^2) phi with its gradient and
/// per-coordinate second derivatives, assembled from one jet pass per axis.
struct AnsatzJets {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> lap_diag;

  double laplacian() const {
    double s = 0.0;
    for (double t : lap_diag) s += t;
    return s;
  }
};

AnsatzJets ansatz_value_grad_lap(const PhiJetFn& phi, std::span<const double> x);
AnsatzJets ansatz_value_grad_lap(const Network& net, std::span<const double> x);

/// Pointwise residual div(a grad u_hat) - rhs, expanded as
/// a(x) lap(u_hat) + x . grad(u_hat) - rhs since grad(a) = x.
double pinn_residual_at(const PhiJetFn& phi, std::span<const double> x, double rhs);

/// Mean squared PDE residual over collocation points (row-major n*dim).
double loss_pinn_value(const Network& net, std::span<const double> points, int dim,
                       std::span<const double> rhs);

/// Tape-based parameter gradient of the mean squared residual; returns the
/// loss. The jet components are tape Vars, so one reverse sweep
/// differentiates through all second-derivative computations.
double loss_pinn_grad_tape(const Network& net, std::span<const double> points,
                           int dim, std::span<const double> rhs,
                           std::span<double> grad);

}  // namespace gtnn
