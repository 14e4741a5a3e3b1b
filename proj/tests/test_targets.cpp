#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gtnn/jet.hpp"
#include "gtnn/rng.hpp"
#include "gtnn/targets.hpp"

using namespace gtnn;

namespace {

// Closed-form solution evaluated through jet arithmetic along one axis;
// independent route for validating the analytic gradient and Laplacian.
Jet2<double> mixture_jet(const GaussianMixture& gm, std::span<const double> x, int axis) {
  Jet2<double> u(0.0);
  for (int i = 0; i < 4; ++i) {
    Jet2<double> r2(0.0);
    for (int j = 0; j < GaussianMixture::dim; ++j) {
      Jet2<double> xi = (j == axis) ? Jet2<double>::variable(x[static_cast<std::size_t>(j)])
                                    : Jet2<double>(x[static_cast<std::size_t>(j)]);
      const Jet2<double> t = xi - gm.center[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      r2 = r2 + t * t;
    }
    u = u + exp(r2 * (-1.0 / (gm.width * gm.width))) * gm.amplitude[static_cast<std::size_t>(i)];
  }
  return u;
}

double rhs_via_jets(std::span<const double> x) {
  const GaussianMixture& gm = GaussianMixture::pde_solution();
  double lap = 0.0, advect = 0.0;
  for (int axis = 0; axis < GaussianMixture::dim; ++axis) {
    const Jet2<double> u = mixture_jet(gm, x, axis);
    lap += u.d2;
    advect += x[static_cast<std::size_t>(axis)] * u.d1;
  }
  return pde_coefficient_a(x) * lap + advect;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("analytic target values") {
  CHECK(eval_f1(0.0) == 0.0);
  CHECK(eval_f1(0.05) == doctest::Approx(std::sin(1.5 * 3.14159265358979323846)));
  std::vector<double> zero(5, 0.0);
  CHECK(eval_f2(zero) == 0.0);
  CHECK(std::fabs(eval_f3(zero)) < 1e-12);  // sin(-8 pi) up to roundoff of pi
  std::vector<double> x = {0.1, -0.2, 0.3, 0.0, 0.1};
  double s = 0.0, r2 = 0.0;
  for (double xi : x) {
    s += xi;
    r2 += xi * xi;
  }
  const double pi = 3.14159265358979323846;
  CHECK(eval_f2(x) == doctest::Approx(std::exp(std::sin(pi * s)) - 1.0));
  CHECK(eval_f3(x) == doctest::Approx(std::sin(8.0 * pi * (r2 - 1.0))));
}

TEST_CASE("exact solution vanishes on the unit sphere to 1e-8") {
  Rng rng(31);
  double worst = 0.0;
  std::vector<double> x(5);
  for (int t = 0; t < 10000; ++t) {
    double norm2 = 0.0;
    for (double& xi : x) {
      xi = rng.normal();
      norm2 += xi * xi;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& xi : x) xi *= inv;
    worst = std::max(worst, std::fabs(pde_exact_u(x)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("single-mode peak and zero gradient at the center") {
  GaussianMixture gm = GaussianMixture::pde_solution();
  gm.amplitude = {3.5, 0.0, 0.0, 0.0};
  const auto& c = gm.center[0];
  std::vector<double> x(c.begin(), c.end());
  CHECK(gm.value(x) == doctest::Approx(3.5).epsilon(1e-15));
  std::vector<double> grad(5);
  gm.gradient(x, grad);
  for (double gj : grad) CHECK(gj == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("analytic rhs agrees with the jet route to 1e-8") {
  Rng rng(77);
  const std::vector<double> pts =
      sample_domain(Domain::unit_ball(5), 1000, SampleMode::random, 5150);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto x = std::span<const double>(pts).subspan(static_cast<std::size_t>(n) * 5, 5);
    worst = std::max(worst, std::fabs(pde_rhs_f(x) - rhs_via_jets(x)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("csv loader") {
  // well-formed file with 2000 rows
  {
    Dataset src = surrogate_shock(2000);
    std::ofstream out(std::filesystem::temp_directory_path() / "gtnn_case1.csv");
    out.precision(17);
    for (int i = 0; i < src.size(); ++i)
      out << src.X[static_cast<std::size_t>(i)] << ',' << src.y[static_cast<std::size_t>(i)] << '\n';
    out.close();
    const Dataset ds = load_case1_csv(
        (std::filesystem::temp_directory_path() / "gtnn_case1.csv").string());
    CHECK(ds.size() == 2000);
    CHECK(ds.provenance == Dataset::Provenance::csv);
    CHECK(ds.X[0] == doctest::Approx(-1.0));
  }
  // empty file
  {
    const std::string path = write_temp("gtnn_empty.csv", "");
    CHECK_THROWS_WITH_AS(load_case1_csv(path),
                         doctest::Contains("no data rows"), std::runtime_error);
  }
  // malformed row names its line
  {
    const std::string path = write_temp("gtnn_bad.csv", "0.1,1.0\n0.2,2.0\nnope\n");
    CHECK_THROWS_WITH_AS(load_case1_csv(path), doctest::Contains("line 3"),
                         std::runtime_error);
  }
  // out-of-domain x names its line
  {
    const std::string path = write_temp("gtnn_dom.csv", "0.1,1.0\n1.5,2.0\n");
    CHECK_THROWS_WITH_AS(load_case1_csv(path), doctest::Contains("line 2"),
                         std::runtime_error);
  }
  // missing file
  CHECK_THROWS_AS(load_case1_csv("/nonexistent/gtnn.csv"), std::runtime_error);
}

TEST_CASE("surrogate profile: finite with at least 10 oscillations") {
  const Dataset ds = surrogate_shock(2000);
  CHECK(ds.size() == 2000);
  for (double y : ds.y) CHECK(std::isfinite(y));
  // Detrend with a coarse moving average, then count sign changes inside the
  // modulated window.
  const int half = 40;
  int sign_changes = 0;
  double prev = 0.0;
  bool have_prev = false;
  for (int i = half; i < ds.size() - half; ++i) {
    const double x = ds.X[static_cast<std::size_t>(i)];
    if (x < -0.2 || x > 0.5) continue;
    double avg = 0.0;
    for (int k = -half; k <= half; ++k) avg += ds.y[static_cast<std::size_t>(i + k)];
    avg /= 2 * half + 1;
    const double detrended = ds.y[static_cast<std::size_t>(i)] - avg;
    if (have_prev && detrended * prev < 0.0) ++sign_changes;
    if (detrended != 0.0) {
      prev = detrended;
      have_prev = true;
    }
  }
  CHECK(sign_changes >= 10);
}

TEST_CASE("interval sampling") {
  const std::vector<double> even =
      sample_domain(Domain::interval(-1.0, 1.0), 3, SampleMode::even, 0);
  REQUIRE(even.size() == 3);
  CHECK(even[0] == -1.0);
  CHECK(even[1] == 0.0);
  CHECK(even[2] == 1.0);

  const std::vector<double> r1 =
      sample_domain(Domain::interval(-1.0, 1.0), 100, SampleMode::random, 8);
  const std::vector<double> r2 =
      sample_domain(Domain::interval(-1.0, 1.0), 100, SampleMode::random, 8);
  CHECK(r1 == r2);
  for (double x : r1) {
    CHECK(x >= -1.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("ball sampling: radius law and direction uniformity") {
  const int n = 20000, d = 5;
  for (SampleMode mode : {SampleMode::random, SampleMode::even}) {
    const std::vector<double> pts = sample_domain(Domain::unit_ball(d), n, mode, 99);
    int le_half = 0, le_08 = 0;
    std::vector<double> mean_dir(d, 0.0);
    for (int i = 0; i < n; ++i) {
      double r2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double xi = pts[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
        r2 += xi * xi;
      }
      const double r = std::sqrt(r2);
      CHECK(r <= 1.0 + 1e-12);
      if (r <= 0.5) ++le_half;
      if (r <= 0.8) ++le_08;
      if (r > 0.0)
        for (int j = 0; j < d; ++j)
          mean_dir[static_cast<std::size_t>(j)] +=
              pts[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)] / r;
    }
    const double f_half = static_cast<double>(le_half) / n;
    const double f_08 = static_cast<double>(le_08) / n;
    CHECK(std::fabs(f_half - std::pow(0.5, 5)) < 0.02);
    CHECK(std::fabs(f_08 - std::pow(0.8, 5)) < 0.02);
    double dir_norm = 0.0;
    for (int j = 0; j < d; ++j) {
      const double m = mean_dir[static_cast<std::size_t>(j)] / n;
      dir_norm += m * m;
    }
    CHECK(std::sqrt(dir_norm) < 0.02);
  }
  // determinism
  const auto a = sample_domain(Domain::unit_ball(d), 64, SampleMode::random, 5);
  const auto b = sample_domain(Domain::unit_ball(d), 64, SampleMode::random, 5);
  CHECK(a == b);
}

TEST_CASE("halton and the inverse normal cdf") {
  CHECK(halton(1, 2) == 0.5);
  CHECK(halton(2, 2) == 0.25);
  CHECK(halton(3, 2) == 0.75);
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959964).epsilon(1e-5));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
}

TEST_CASE("ball volume") {
  CHECK(ball_volume(2) == doctest::Approx(3.14159265358979323846));
  CHECK(ball_volume(3) == doctest::Approx(4.18879020478639098462));
  CHECK(ball_volume(5) == doctest::Approx(5.26378901391432287658));
}
