#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtnn/network.hpp"

namespace gtnn {

/// Training protocol: full-batch Adam with a linearly decaying step size.
struct TrainConfig {
  int iterations = 20000;
  double lr_start = 1e-2;
  double lr_end = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int n_seeds = 10;
  double divergence_threshold = 1e8;

  void validate() const;
};

/// Learning rate of step t: linear from lr_start at t=0 to lr_end at the
/// final step. Throws if t is outside [0, iterations).
double lr_at(const TrainConfig& cfg, int t);

struct AdamState {
  std::vector<double> m, v;
  long t = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place. Throws on non-finite gradients.
void adam_step(AdamState& state, std::span<double> theta,
               std::span<const double> grad, double lr, const TrainConfig& cfg);

/// Full-batch objective: loss plus parameter gradient.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dim() const = 0;
  /// Returns the loss at theta and fills grad (same length as theta).
  virtual double eval_grad(std::span<const double> theta, std::span<double> grad) = 0;
  /// Loss only; used by finite-difference checks.
  virtual double eval(std::span<const double> theta) = 0;
};

struct TrainResult {
  std::vector<double> loss_history;  // loss at the start of each iteration
  bool diverged = false;
  int divergence_iteration = -1;
  std::string message;
};

/// Runs cfg.iterations Adam steps on theta. The loss history has one entry
/// per completed iteration; on divergence (non-finite or above the
/// threshold) the run stops early and the result says where.
TrainResult train(std::span<double> theta, Objective& objective, const TrainConfig& cfg);

/// Initializes the network from the seed, then trains it in place.
TrainResult train_network(Network& net, Objective& objective, const TrainConfig& cfg,
                          std::uint64_t seed);

/// Loss-history CSV: header "iteration,lr,loss", one row per iteration.
void write_loss_history_csv(const std::string& path, const TrainConfig& cfg,
                            const std::vector<double>& history);

}  // namespace gtnn
