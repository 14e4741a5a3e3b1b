#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gtnn/batch.hpp"
#include "gtnn/optim.hpp"
#include "gtnn/targets.hpp"

using namespace gtnn;

namespace {

// Fixed quadratic bowl used to exercise the optimizer in isolation.
class Bowl final : public Objective {
 public:
  explicit Bowl(std::vector<double> target) : target_(std::move(target)) {}
  std::size_t dim() const override { return target_.size(); }
  double eval_grad(std::span<const double> th, std::span<double> g) override {
    double acc = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double e = th[i] - target_[i];
      g[i] = 2.0 * e;
      acc += e * e;
    }
    return acc;
  }
  double eval(std::span<const double> th) override {
    double acc = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double e = th[i] - target_[i];
      acc += e * e;
    }
    return acc;
  }

 private:
  std::vector<double> target_;
};

class ConstantLoss final : public Objective {
 public:
  ConstantLoss(std::size_t n, double value) : n_(n), value_(value) {}
  std::size_t dim() const override { return n_; }
  double eval_grad(std::span<const double>, std::span<double> g) override {
    for (double& x : g) x = 0.0;
    return value_;
  }
  double eval(std::span<const double>) override { return value_; }

 private:
  std::size_t n_;
  double value_;
};

}  // namespace

TEST_CASE("learning-rate schedule endpoints and midpoint") {
  TrainConfig cfg;
  cfg.iterations = 20000;
  CHECK(lr_at(cfg, 0) == 1e-2);
  CHECK(lr_at(cfg, cfg.iterations - 1) == 1e-3);
  TrainConfig odd;
  odd.iterations = 21;
  CHECK(lr_at(odd, 10) == doctest::Approx(5.5e-3).epsilon(1e-15));
  // monotone non-increasing
  double prev = lr_at(cfg, 0);
  for (int t = 1; t < cfg.iterations; t += 97) {
    const double cur = lr_at(cfg, t);
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK_THROWS_AS(lr_at(cfg, -1), std::out_of_range);
  CHECK_THROWS_AS(lr_at(cfg, cfg.iterations), std::out_of_range);
  TrainConfig one;
  one.iterations = 1;
  CHECK(lr_at(one, 0) == 1e-2);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.lr_end = 2e-2;  // above lr_start
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.iterations = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("adam step behavior") {
  TrainConfig cfg;
  // zero gradient leaves parameters unchanged
  {
    AdamState st(3);
    std::vector<double> theta = {1.0, -2.0, 0.5};
    const std::vector<double> saved = theta;
    const std::vector<double> g = {0.0, 0.0, 0.0};
    adam_step(st, theta, g, 1e-2, cfg);
    CHECK(theta == saved);
  }
  // first step moves by about lr * sign(g)
  {
    AdamState st(2);
    std::vector<double> theta = {0.0, 0.0};
    const std::vector<double> g = {3.7, -0.02};
    adam_step(st, theta, g, 1e-2, cfg);
    CHECK(theta[0] == doctest::Approx(-1e-2).epsilon(1e-5));
    CHECK(theta[1] == doctest::Approx(1e-2).epsilon(1e-3));
  }
  // non-finite gradient raises
  {
    AdamState st(1);
    std::vector<double> theta = {0.0};
    const std::vector<double> g = {std::nan("")};
    CHECK_THROWS_AS(adam_step(st, theta, g, 1e-2, cfg), std::runtime_error);
  }
  // coordinate-wise rule is permutation equivariant
  {
    AdamState st1(2), st2(2);
    std::vector<double> a = {0.3, -0.8}, b = {-0.8, 0.3};
    adam_step(st1, a, std::vector<double>{1.0, -2.0}, 1e-2, cfg);
    adam_step(st2, b, std::vector<double>{-2.0, 1.0}, 1e-2, cfg);
    CHECK(a[0] == b[1]);
    CHECK(a[1] == b[0]);
  }
}

TEST_CASE("train on a quadratic bowl converges and is deterministic") {
  Bowl bowl({0.7, -0.3, 1.2});
  TrainConfig cfg;
  cfg.iterations = 2000;
  std::vector<double> th1 = {0.0, 0.0, 0.0};
  const TrainResult r1 = train(th1, bowl, cfg);
  CHECK_FALSE(r1.diverged);
  CHECK(r1.loss_history.size() == 2000);
  CHECK(r1.loss_history.back() < 1e-8);
  std::vector<double> th2 = {0.0, 0.0, 0.0};
  const TrainResult r2 = train(th2, bowl, cfg);
  CHECK(th1 == th2);
  CHECK(r1.loss_history == r2.loss_history);
}

TEST_CASE("zero iterations returns the initialized network unchanged") {
  const NetworkSpec spec = make_spec(Family::fnn, 2, 5, 1, Activation::relu);
  Dataset data = surrogate_shock(32);
  RegressionObjective obj(spec, data, 1);
  Network net{spec, ParamVector(spec)};
  TrainConfig cfg;
  cfg.iterations = 0;
  const TrainResult r = train_network(net, obj, cfg, 9);
  CHECK(r.loss_history.empty());
  CHECK_FALSE(r.diverged);
  const ParamVector fresh = init_params(spec, 9);
  CHECK(std::equal(net.params.all().begin(), net.params.all().end(),
                   fresh.all().begin()));
}

TEST_CASE("easy regression run reaches a small loss") {
  // 1-D linear target with a small relu network.
  Dataset data;
  data.dim = 1;
  data.X = sample_domain(Domain::interval(-1.0, 1.0), 64, SampleMode::even, 0);
  data.y.resize(64);
  for (int i = 0; i < 64; ++i)
    data.y[static_cast<std::size_t>(i)] = 0.7 * data.X[static_cast<std::size_t>(i)] + 0.2;
  const NetworkSpec spec = make_spec(Family::fnn, 2, 5, 1, Activation::relu);
  RegressionObjective obj(spec, data, 2);
  Network net{spec, ParamVector(spec)};
  TrainConfig cfg;
  cfg.iterations = 2000;
  const TrainResult r = train_network(net, obj, cfg, 3);
  CHECK_FALSE(r.diverged);
  CHECK(r.loss_history.back() < 1e-4);
  for (double loss : r.loss_history) CHECK(std::isfinite(loss));
}

TEST_CASE("divergence guard aborts with a report") {
  ConstantLoss bad(4, 1e9);
  TrainConfig cfg;
  cfg.iterations = 100;
  std::vector<double> th(4, 0.0);
  const TrainResult r = train(th, bad, cfg);
  CHECK(r.diverged);
  CHECK(r.divergence_iteration == 0);
  CHECK(r.loss_history.size() == 1);
  CHECK(!r.message.empty());
}

TEST_CASE("loss history CSV layout") {
  TrainConfig cfg;
  cfg.iterations = 3;
  const std::vector<double> history = {1.0, 0.5, 0.25};
  const std::string path =
      (std::filesystem::temp_directory_path() / "gtnn_loss_test.csv").string();
  write_loss_history_csv(path, cfg, history);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,lr,loss");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  std::filesystem::remove(path);
}
