#include <doctest.h>

#include <cmath>
#include <vector>

#include "gtnn/gradcheck.hpp"
#include "gtnn/jet.hpp"
#include "gtnn/network.hpp"
#include "gtnn/rng.hpp"
#include "gtnn/tape.hpp"

using namespace gtnn;

TEST_CASE("jet unary rules on frozen examples") {
  // square at (3,1,0): d/dt t^2 = 2t, d2 = 2.
  const Jet2<double> sq = jet_apply_unary(UnaryKind::square, Jet2<double>::variable(3.0));
  CHECK(sq.v == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(sq.d1 == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(sq.d2 == doctest::Approx(2.0).epsilon(1e-15));

  // sigmoid at 0: value 1/2, slope 1/4, curvature 0.
  const Jet2<double> sg = jet_apply_unary(UnaryKind::sigmoid, Jet2<double>::variable(0.0));
  CHECK(sg.v == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sg.d1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sg.d2 == doctest::Approx(0.0).epsilon(1e-15));

  // relu in the inactive region zeroes everything.
  const Jet2<double> rl = jet_apply_unary(UnaryKind::relu, Jet2<double>::variable(-2.0));
  CHECK(rl.v == 0.0);
  CHECK(rl.d1 == 0.0);
  CHECK(rl.d2 == 0.0);

  // relu passes jets through where active.
  const Jet2<double> rp = relu(Jet2<double>(1.5, 2.0, 3.0));
  CHECK(rp.v == 1.5);
  CHECK(rp.d1 == 2.0);
  CHECK(rp.d2 == 3.0);

  const Jet2<double> ng = jet_apply_unary(UnaryKind::neg, Jet2<double>(1.0, 2.0, 3.0));
  CHECK(ng.v == -1.0);
  CHECK(ng.d1 == -2.0);
  CHECK(ng.d2 == -3.0);
}

TEST_CASE("jets are exact on cubic polynomials") {
  // p(t) = (2t + 1)(t^2 - 3t + 2), expanded p(t) = 2t^3 - 5t^2 + t + 2.
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = rng.uniform(-3.0, 3.0);
    const Jet2<double> x = Jet2<double>::variable(t);
    const Jet2<double> p = (x * 2.0 + 1.0) * (x * x - x * 3.0 + 2.0);
    const double val = 2 * t * t * t - 5 * t * t + t + 2;
    const double d1 = 6 * t * t - 10 * t + 1;
    const double d2 = 12 * t - 10;
    CHECK(p.v == doctest::Approx(val).epsilon(1e-14));
    CHECK(p.d1 == doctest::Approx(d1).epsilon(1e-13));
    CHECK(p.d2 == doctest::Approx(d2).epsilon(1e-13));
  }
}

TEST_CASE("jet division and transcendental chain rules vs finite differences") {
  Rng rng(11);
  auto f = [](double t) { return std::exp(std::sin(t)) / (t * t + 2.0); };
  for (int trial = 0; trial < 20; ++trial) {
    const double t = rng.uniform(-2.0, 2.0);
    const Jet2<double> x = Jet2<double>::variable(t);
    const Jet2<double> y = exp(sin(x)) / (x * x + 2.0);
    const double h = 1e-5;
    const double d1 = (f(t + h) - f(t - h)) / (2 * h);
    const double d2 = (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
    CHECK(y.v == doctest::Approx(f(t)).epsilon(1e-13));
    CHECK(y.d1 == doctest::Approx(d1).epsilon(1e-8));
    CHECK(y.d2 == doctest::Approx(d2).epsilon(1e-4));
  }
}

TEST_CASE("tape gradients on frozen examples") {
  // product rule
  {
    Tape tape;
    const Var x = tape.leaf(2.0);
    const Var y = tape.leaf(3.0);
    const Var r = x * y;
    const std::vector<double> g = tape.gradient(r);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == doctest::Approx(3.0));
    CHECK(g[1] == doctest::Approx(2.0));
  }
  // sigmoid slope at 0
  {
    Tape tape;
    const Var x = tape.leaf(0.0);
    const Var s = sigmoid(x);
    const std::vector<double> g = tape.gradient(s);
    CHECK(g[0] == doctest::Approx(0.25).epsilon(1e-15));
  }
  // sum of squares
  {
    Tape tape;
    const Var x = tape.leaf(1.0);
    const Var y = tape.leaf(2.0);
    const Var r = square(x) + square(y);
    const std::vector<double> g = tape.gradient(r);
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(4.0));
  }
}

TEST_CASE("tape errors and reset") {
  Tape tape;
  const Var x = tape.leaf(1.0);
  CHECK(tape.size() == 1);
  CHECK(tape.leaf_count() == 1);

  Tape other;
  const Var y = other.leaf(2.0);
  CHECK_THROWS_AS((void)(x * y), std::invalid_argument);        // mixing tapes
  CHECK_THROWS_AS((void)tape.gradient(Var(1.0)), std::invalid_argument);
  CHECK_THROWS_AS((void)tape.gradient(y), std::invalid_argument);

  tape.reset();
  CHECK(tape.size() == 0);
  CHECK(tape.leaf_count() == 0);
}

TEST_CASE("constants are not tracked") {
  Tape tape;
  const Var x = tape.leaf(2.0);
  const std::size_t before = tape.size();
  const Var c = Var(3.0) * Var(4.0);  // constant folding, no nodes
  CHECK(tape.size() == before);
  CHECK(c.value() == doctest::Approx(12.0));
  const Var y = x * 5.0;  // one node, constant folded into the partial
  CHECK(tape.size() == before + 1);
  const std::vector<double> g = tape.gradient(y);
  CHECK(g[0] == doctest::Approx(5.0));
}

TEST_CASE("backward is linear in the root") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const double xv = rng.uniform(-2.0, 2.0);
    const double a = rng.uniform(-3.0, 3.0);
    const double b = rng.uniform(-3.0, 3.0);
    Tape t1, t2, t3;
    auto build_f = [&](Tape& t, const Var& x) { return sigmoid(x * 1.7) + square(x); };
    auto build_g = [&](Tape& t, const Var& x) { return exp(x * 0.3) * sin(x); };
    const Var x1 = t1.leaf(xv);
    const double gf = t1.gradient(build_f(t1, x1))[0];
    const Var x2 = t2.leaf(xv);
    const double gg = t2.gradient(build_g(t2, x2))[0];
    const Var x3 = t3.leaf(xv);
    const Var combo = build_f(t3, x3) * a + build_g(t3, x3) * b;
    const double gc = t3.gradient(combo)[0];
    CHECK(gc == doctest::Approx(a * gf + b * gg).epsilon(1e-12));
  }
}

TEST_CASE("relu subgradient convention at zero") {
  Tape tape;
  const Var x = tape.leaf(0.0);
  const Var r = relu(x);
  CHECK(tape.gradient(r)[0] == 1.0);
  CHECK(step(0.0) == 1.0);
}

TEST_CASE("grad_check against analytic gradients") {
  // Quadratic: central differences are exact up to roundoff.
  {
    auto f = [](std::span<const double> th) {
      double acc = 0.0;
      for (std::size_t i = 0; i < th.size(); ++i)
        acc += (2.0 + static_cast<double>(i)) * th[i] * th[i];
      return acc;
    };
    std::vector<double> theta = {0.3, -1.2, 2.5};
    std::vector<double> grad(3);
    for (std::size_t i = 0; i < 3; ++i)
      grad[i] = 2.0 * (2.0 + static_cast<double>(i)) * theta[i];
    const GradCheckResult r = grad_check(f, theta, grad, 1e-5);
    CHECK(r.max_rel_error < 1e-8);
  }
  // Random sigmoid fnn via the tape.
  {
    const NetworkSpec spec = make_spec(Family::fnn, 2, 10, 5, Activation::sigmoid);
    Network net = make_network(spec, 17);
    std::vector<double> x = {0.2, -0.4, 0.1, 0.7, -0.3};
    auto f = [&](std::span<const double> th) {
      return forward_generic<double, double>(spec, net.params.layout(), th,
                                             std::span<const double>(x));
    };
    Tape tape;
    const std::vector<Var> leaves = make_param_leaves(tape, net.params);
    std::vector<Var> xv(x.begin(), x.end());
    const Var out = forward_generic<Var, Var>(spec, net.params.layout(),
                                              std::span<const Var>(leaves), xv);
    const std::vector<double> grad = tape.gradient(out);
    const GradCheckResult r = grad_check(f, net.params.all(), grad, 1e-5);
    CHECK(r.max_rel_error < 1e-6);
  }
  // relu network evaluated away from kinks.
  {
    const NetworkSpec spec = make_spec(Family::qtnn, 2, 8, 2, Activation::relu);
    Network net = make_network(spec, 23);
    std::vector<double> x = {0.37, -0.61};
    auto f = [&](std::span<const double> th) {
      return forward_generic<double, double>(spec, net.params.layout(), th,
                                             std::span<const double>(x));
    };
    Tape tape;
    const std::vector<Var> leaves = make_param_leaves(tape, net.params);
    std::vector<Var> xv(x.begin(), x.end());
    const Var out = forward_generic<Var, Var>(spec, net.params.layout(),
                                              std::span<const Var>(leaves), xv);
    const std::vector<double> grad = tape.gradient(out);
    const GradCheckResult r = grad_check(f, net.params.all(), grad, 1e-6);
    CHECK(r.max_rel_error < 1e-6);
  }
  // Non-finite values are reported.
  {
    auto f = [](std::span<const double> th) { return std::log(th[0]); };
    std::vector<double> theta = {1e-7};
    std::vector<double> grad = {1e7};
    CHECK_THROWS_AS(grad_check(f, theta, grad, 1e-5), std::runtime_error);
  }
}

TEST_CASE("jets of tape vars differentiate through second derivatives") {
  // f(x; c) = sigmoid(c * x): the jet carries x-derivatives, the tape carries
  // the c-derivative of those jets. Check d/dc of (d2 f/dx2) by finite
  // differences in c.
  auto d2_at = [](double c) {
    const Jet2<double> x = Jet2<double>::variable(0.7);
    return sigmoid(x * c).d2;
  };
  Tape tape;
  const Var c = tape.leaf(1.3);
  const Jet2<Var> x(Var(0.7), Var(1.0), Var(0.0));
  const Jet2<Var> y = sigmoid(x * c);
  const std::vector<double> g = tape.gradient(y.d2);
  const double h = 1e-6;
  const double fd = (d2_at(1.3 + h) - d2_at(1.3 - h)) / (2 * h);
  CHECK(g[0] == doctest::Approx(fd).epsilon(1e-5));
  // Value components agree with the plain-jet evaluation exactly.
  CHECK(y.v.value() == doctest::Approx(sigmoid(Jet2<double>::variable(0.7) * 1.3).v));
}
