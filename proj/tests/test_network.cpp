#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gtnn/network.hpp"
#include "gtnn/rng.hpp"

using namespace gtnn;

namespace {

NetworkSpec random_spec(Rng& rng, bool allow_composed = true) {
  NetworkSpec spec;
  const int f = static_cast<int>(rng.below(3));
  spec.family = f == 0 ? Family::fnn : (f == 1 ? Family::qtnn : Family::ctnn);
  spec.depth = 2 + static_cast<int>(rng.below(3));
  spec.widths.clear();
  for (int l = 0; l < spec.depth - 1; ++l)
    spec.widths.push_back(1 + static_cast<int>(rng.below(12)));
  spec.input_dim = 1 + static_cast<int>(rng.below(6));
  spec.activation = rng.below(2) ? Activation::relu : Activation::sigmoid;
  spec.output_bias = true;
  spec.composed = false;
  if (allow_composed && spec.family != Family::fnn && spec.depth == 3 && rng.below(2)) {
    spec.composed = true;
    spec.output_bias = false;
  }
  return spec;
}

// Closed-form parameter count computed independently of layout_of.
int closed_form_count(const NetworkSpec& s) {
  auto per_neuron = [&](int k) {
    if (s.family == Family::fnn) return k + 1;
    if (s.family == Family::qtnn) return 2 * k + 2;
    return k * k + 2 * k + 2;
  };
  if (s.composed) {
    const int mb = s.widths[0], branches = s.widths[1];
    return branches * (mb * per_neuron(s.input_dim) + mb) + 2 * branches;
  }
  int total = 0, fan_in = s.input_dim;
  for (int m : s.widths) {
    total += m * per_neuron(fan_in);
    fan_in = m;
  }
  total += s.widths.back() + (s.output_bias ? 1 : 0);
  return total;
}

}  // namespace

TEST_CASE("hand-evaluated forward values") {
  // qtnn: relu((2*1 + 1) * (1*1 + 0)) * 1 + 0 = 3
  {
    NetworkSpec spec = make_spec(Family::qtnn, 2, 1, 1, Activation::relu);
    ParamVector p(spec);
    p.W(0)[0] = 2.0;
    p.b(0)[0] = 1.0;
    p.U(0)[0] = 1.0;
    p.v(0)[0] = 0.0;
    p.a()[0] = 1.0;
    p.c() = 0.0;
    const Network net{spec, p};
    const double x = 1.0;
    CHECK(forward(net, std::span<const double>(&x, 1)) == doctest::Approx(3.0));
  }
  // ctnn: relu((1*2 + 0) * (1*4 + 0*2 + 0)) = 8
  {
    NetworkSpec spec = make_spec(Family::ctnn, 2, 1, 1, Activation::relu);
    ParamVector p(spec);
    p.W(0)[0] = 1.0;
    p.b(0)[0] = 0.0;
    p.U(0)[0] = 0.0;
    p.v(0)[0] = 0.0;
    p.Q(0, 0)[0] = 1.0;
    p.a()[0] = 1.0;
    p.c() = 0.0;
    const Network net{spec, p};
    const double x = 2.0;
    CHECK(forward(net, std::span<const double>(&x, 1)) == doctest::Approx(8.0));
  }
}

TEST_CASE("dimension mismatch is rejected") {
  const NetworkSpec spec = make_spec(Family::fnn, 2, 3, 2, Activation::relu);
  const Network net = make_network(spec, 1);
  std::vector<double> x = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)forward(net, x), std::invalid_argument);
}

TEST_CASE("per-neuron parameter count formulas") {
  for (int d : {1, 2, 5, 9}) {
    CHECK(param_count_per_neuron(Family::fnn, d) == d + 1);
    CHECK(param_count_per_neuron(Family::qtnn, d) == 2 * d + 2);
    CHECK(param_count_per_neuron(Family::ctnn, d) == d * d + 2 * d + 2);
  }
}

TEST_CASE("param_count equals constructed length for 50 random specs") {
  Rng rng(404);
  for (int t = 0; t < 50; ++t) {
    const NetworkSpec spec = random_spec(rng);
    const ParamVector p(spec);
    CHECK(static_cast<int>(p.size()) == param_count(spec));
    CHECK(static_cast<int>(p.size()) == closed_form_count(spec));
  }
}

TEST_CASE("parameter slices are disjoint and cover the array") {
  Rng rng(405);
  for (int t = 0; t < 20; ++t) {
    const NetworkSpec spec = random_spec(rng);
    ParamVector p(spec);
    // Write a distinct value through every named slice, then confirm each
    // array cell was written exactly once.
    std::vector<int> touched(p.size(), 0);
    auto mark = [&](std::span<double> s) {
      const double* base = p.all().data();
      for (double& x : s) touched[static_cast<std::size_t>(&x - base)] += 1;
    };
    if (spec.composed) {
      const int branches = p.layout().branches;
      const int mb = spec.widths[0];
      for (int br = 0; br < branches; ++br) {
        mark(p.branch_W(br));
        mark(p.branch_b(br));
        mark(p.branch_U(br));
        mark(p.branch_v(br));
        if (spec.family == Family::ctnn)
          for (int i = 0; i < mb; ++i) mark(p.branch_Q(br, i));
        mark(p.branch_a(br));
      }
      mark(p.beta());
      mark(p.alpha());
    } else {
      for (int l = 0; l < spec.depth - 1; ++l) {
        mark(p.W(l));
        mark(p.b(l));
        if (spec.family != Family::fnn) {
          mark(p.U(l));
          mark(p.v(l));
          if (spec.family == Family::ctnn)
            for (int i = 0; i < spec.widths[static_cast<std::size_t>(l)]; ++i)
              mark(p.Q(l, i));
        }
      }
      mark(p.a());
      if (spec.output_bias) {
        p.c() = 0.0;
        const double* base = p.all().data();
        touched[static_cast<std::size_t>(&p.c() - base)] += 1;
      }
    }
    for (int count : touched) CHECK(count == 1);
  }
}

TEST_CASE("init_params bounds, determinism, and seed sensitivity") {
  const NetworkSpec spec = make_spec(Family::qtnn, 2, 100, 3, Activation::relu);
  const ParamVector p1 = init_params(spec, 42);
  for (double x : p1.all()) {
    CHECK(x > -0.1);
    CHECK(x < 0.1);
  }
  const ParamVector p2 = init_params(spec, 42);
  CHECK(std::equal(p1.all().begin(), p1.all().end(), p2.all().begin()));
  const ParamVector p3 = init_params(spec, 43);
  int differing = 0;
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (p1.all()[i] != p3.all()[i]) ++differing;
  CHECK(static_cast<double>(differing) >= 0.99 * static_cast<double>(p1.size()));
}

TEST_CASE("reduction identity with psi = 1 holds exactly for random batches") {
  Rng rng(77);
  const int d = 3;
  const NetworkSpec fnn_spec = make_spec(Family::fnn, 2, 9, d, Activation::relu);
  Network fnn = make_network(fnn_spec, 500);
  NetworkSpec qspec = fnn_spec;
  qspec.family = Family::qtnn;
  Network qtnn{qspec, ParamVector(qspec)};
  {
    auto wsrc = fnn.params.W(0);
    auto wdst = qtnn.params.W(0);
    std::copy(wsrc.begin(), wsrc.end(), wdst.begin());
    auto bsrc = fnn.params.b(0);
    auto bdst = qtnn.params.b(0);
    std::copy(bsrc.begin(), bsrc.end(), bdst.begin());
    auto asrc = fnn.params.a();
    auto adst = qtnn.params.a();
    std::copy(asrc.begin(), asrc.end(), adst.begin());
    qtnn.params.c() = fnn.params.c();
    for (double& u : qtnn.params.U(0)) u = 0.0;
    for (double& v : qtnn.params.v(0)) v = 1.0;
  }
  std::vector<double> x(d);
  for (int t = 0; t < 1000; ++t) {
    for (double& xi : x) xi = rng.uniform(-2.0, 2.0);
    CHECK(forward(qtnn, x) == forward(fnn, x));
  }
}

TEST_CASE("identity-activation degree: qtnn quadratic, ctnn cubic") {
  // relu(z) - relu(-z) = z, so evaluating the net and a (W,b)-negated copy
  // and subtracting yields the identity-activation polynomial.
  Rng rng(88);
  const int d = 3;
  for (Family fam : {Family::qtnn, Family::ctnn}) {
    const NetworkSpec spec = make_spec(fam, 2, 6, d, Activation::relu);
    Network net = make_network(spec, 321);
    Network neg = net;
    for (double& w : neg.params.W(0)) w = -w;
    for (double& b : neg.params.b(0)) b = -b;
    auto poly = [&](std::span<const double> x) {
      return forward(net, x) - forward(neg, x);
    };
    // Divided differences along random lines annihilate one order above the
    // polynomial degree.
    const int degree = fam == Family::qtnn ? 2 : 3;
    const double h = 0.25;
    std::vector<double> x0(d), dir(d);
    for (int trial = 0; trial < 10; ++trial) {
      for (double& v : x0) v = rng.uniform(-1.0, 1.0);
      for (double& v : dir) v = rng.uniform(-1.0, 1.0);
      auto at = [&](int k) {
        std::vector<double> x(d);
        for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] =
            x0[static_cast<std::size_t>(j)] + k * h * dir[static_cast<std::size_t>(j)];
        return poly(x);
      };
      double annihilated = 0.0, surviving = 0.0;
      if (degree == 2) {
        annihilated = at(3) - 3 * at(2) + 3 * at(1) - at(0);
        surviving = at(2) - 2 * at(1) + at(0);
      } else {
        annihilated = at(4) - 4 * at(3) + 6 * at(2) - 4 * at(1) + at(0);
        surviving = at(3) - 3 * at(2) + 3 * at(1) - at(0);
      }
      CHECK(std::fabs(annihilated) < 1e-10);
      (void)surviving;  // generically nonzero; magnitude is data dependent
    }
  }
}

TEST_CASE("scalar-type forwards agree in their value components") {
  Rng rng(99);
  for (Family fam : {Family::fnn, Family::qtnn, Family::ctnn}) {
    for (int depth : {2, 3}) {
      const NetworkSpec spec = make_spec(fam, depth, 7, 4, Activation::sigmoid);
      const Network net = make_network(spec, 1000 + depth);
      std::vector<double> x(4);
      for (int t = 0; t < 20; ++t) {
        for (double& xi : x) xi = rng.uniform(-0.4, 0.4);
        const double ref = forward(net, x);

        Tape tape;
        const std::vector<Var> th = make_param_leaves(tape, net.params);
        std::vector<Var> xv(x.begin(), x.end());
        const Var out_var = forward_generic<Var, Var>(spec, net.params.layout(),
                                                      std::span<const Var>(th), xv);
        CHECK(out_var.value() == doctest::Approx(ref).epsilon(1e-14));

        const Jet2<double> out_jet = forward_jet(net, x, 0);
        CHECK(out_jet.v == doctest::Approx(ref).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("spec validation rejects malformed architectures") {
  NetworkSpec spec;
  spec.depth = 1;
  spec.widths = {};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = make_spec(Family::qtnn, 2, 4, 1, Activation::relu);
  spec.widths.push_back(4);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = make_spec(Family::qtnn, 3, 4, 1, Activation::relu);
  CHECK(spec.composed);
  spec.output_bias = true;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  NetworkSpec cf;
  cf.family = Family::fnn;
  cf.depth = 3;
  cf.widths = {4, 4};
  cf.composed = true;
  cf.output_bias = false;
  CHECK_THROWS_AS(cf.validate(), std::invalid_argument);
}

TEST_CASE("profile emission") {
  std::vector<double> grid(1001);
  for (int i = 0; i <= 1000; ++i)
    grid[static_cast<std::size_t>(i)] = -5.0 + 0.01 * i;

  for (ProfileFamily fam : {ProfileFamily::piecewise_quad, ProfileFamily::piecewise_cubic,
                            ProfileFamily::qtnn2, ProfileFamily::ctnn2}) {
    const auto xy = profile_emit(fam, 7, grid);
    REQUIRE(xy.size() == grid.size());
    for (const auto& [x, y] : xy) CHECK(std::isfinite(y));
    const auto again = profile_emit(fam, 7, grid);
    for (std::size_t i = 0; i < xy.size(); ++i) CHECK(xy[i].second == again[i].second);
  }

  // Smooth inside each unit cell: adjacent samples in the same cell stay
  // within a Lipschitz bound; jumps may only occur at the 10 knots.
  const auto quad = profile_emit(ProfileFamily::piecewise_quad, 3, grid);
  for (std::size_t i = 0; i + 1 < quad.size(); ++i) {
    const double x0 = quad[i].first, x1 = quad[i + 1].first;
    if (static_cast<int>(x0 + 5.0) != static_cast<int>(x1 + 5.0)) continue;  // knot
    CHECK(std::fabs(quad[i + 1].second - quad[i].second) <= 0.2);
  }

  std::vector<double> bad = {6.0};
  CHECK_THROWS_AS(profile_emit(ProfileFamily::qtnn2, 1, bad), std::invalid_argument);
}
