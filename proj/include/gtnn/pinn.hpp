#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gtnn/network.hpp"
#include "gtnn/optim.hpp"

namespace gtnn {

/// Full-batch physics-informed objective: the mean squared residual of
/// div(a grad u_hat) - f with u_hat = (1 - |x|^2) phi(x).
///
/// The forward pass propagates, per scalar, the value plus all d first and
/// d diagonal-second derivatives in one fused sweep, and the backward pass
/// differentiates that computation in the parameters. Covers the sigmoid
/// architectures used by the PDE experiments: fnn of any depth, two-layer
/// qtnn/ctnn, and the composed three-layer qtnn/ctnn. Validated against the
/// tape path.
class PinnObjective final : public Objective {
 public:
  /// points: row-major n*dim collocation set inside the unit ball.
  /// rhs: f values at the points.
  PinnObjective(const NetworkSpec& spec, std::vector<double> points,
                std::vector<double> rhs, int jobs = 0);
  ~PinnObjective() override;

  std::size_t dim() const override;
  double eval_grad(std::span<const double> theta, std::span<double> grad) override;
  double eval(std::span<const double> theta) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Batched u_hat = (1 - |x|^2) phi values on row-major points.
void predict_ansatz(const Network& net, std::span<const double> X, int n,
                    std::span<double> out, int jobs = 0);

}  // namespace gtnn
