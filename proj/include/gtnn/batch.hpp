#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gtnn/network.hpp"
#include "gtnn/optim.hpp"
#include "gtnn/targets.hpp"

namespace gtnn {

/// Batched value-path forward over row-major points (n * input_dim).
/// Matches forward() per point; used for evaluation on large test sets.
void predict_batch(const Network& net, std::span<const double> X, int n,
                   std::span<double> out, int jobs = 0);

/// Full-batch mean-squared-error objective with hand-written batched
/// forward/backward kernels. Point blocks run in parallel; the loss is
/// reduced in block order, so it is independent of the thread count, and
/// gradients are reduced in thread order, so a fixed jobs value gives
/// bitwise-reproducible training. Validated against the tape path.
class RegressionObjective final : public Objective {
 public:
  RegressionObjective(const NetworkSpec& spec, const Dataset& data, int jobs = 0);
  ~RegressionObjective() override;

  std::size_t dim() const override;
  double eval_grad(std::span<const double> theta, std::span<double> grad) override;
  double eval(std::span<const double> theta) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gtnn
