#include "gtnn/optim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace gtnn {

void TrainConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("TrainConfig: iterations must be >= 0");
  if (!(lr_start >= lr_end) || !(lr_end > 0.0))
    throw std::invalid_argument("TrainConfig: need lr_start >= lr_end > 0");
  if (n_seeds < 1) throw std::invalid_argument("TrainConfig: n_seeds must be >= 1");
}

double lr_at(const TrainConfig& cfg, int t) {
  if (t < 0 || t >= cfg.iterations)
    throw std::out_of_range("lr_at: step outside [0, iterations)");
  if (t == 0 || cfg.iterations == 1) return cfg.lr_start;
  if (t == cfg.iterations - 1) return cfg.lr_end;  // endpoint exact
  const double frac = static_cast<double>(t) / static_cast<double>(cfg.iterations - 1);
  return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * frac;
}

void adam_step(AdamState& state, std::span<double> theta,
               std::span<const double> grad, double lr, const TrainConfig& cfg) {
  if (theta.size() != grad.size() || theta.size() != state.m.size())
    throw std::invalid_argument("adam_step: length mismatch");
  state.t += 1;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    theta[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

TrainResult train(std::span<double> theta, Objective& objective, const TrainConfig& cfg) {
  cfg.validate();
  if (theta.size() != objective.dim())
    throw std::invalid_argument("train: objective dimension mismatch");
  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.iterations));
  AdamState state(theta.size());
  std::vector<double> grad(theta.size());
  for (int t = 0; t < cfg.iterations; ++t) {
    const double loss = objective.eval_grad(theta, grad);
    result.loss_history.push_back(loss);
    if (!std::isfinite(loss) || loss > cfg.divergence_threshold) {
      result.diverged = true;
      result.divergence_iteration = t;
      result.message = "loss diverged at iteration " + std::to_string(t) +
                       " (loss=" + std::to_string(loss) + ")";
      return result;
    }
    try {
      adam_step(state, theta, grad, lr_at(cfg, t), cfg);
    } catch (const std::runtime_error&) {
      result.diverged = true;
      result.divergence_iteration = t;
      result.message = "non-finite gradient at iteration " + std::to_string(t);
      return result;
    }
  }
  return result;
}

TrainResult train_network(Network& net, Objective& objective, const TrainConfig& cfg,
                          std::uint64_t seed) {
  net.params = init_params(net.spec, seed);
  return train(net.params.all(), objective, cfg);
}

void write_loss_history_csv(const std::string& path, const TrainConfig& cfg,
                            const std::vector<double>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_loss_history_csv: cannot open " + path);
  out << "iteration,lr,loss\n";
  out.precision(17);
  for (std::size_t t = 0; t < history.size(); ++t)
    out << t << ',' << lr_at(cfg, static_cast<int>(t)) << ',' << history[t] << '\n';
}

}  // namespace gtnn
