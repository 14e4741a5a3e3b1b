// Command-line front end: train/eval the experiment grid, run the sampling
// rate study, emit profile data, and run the self-checks.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "gtnn/barron.hpp"
#include "gtnn/batch.hpp"
#include "gtnn/config.hpp"
#include "gtnn/experiments.hpp"
#include "gtnn/gradcheck.hpp"
#include "gtnn/losses.hpp"
#include "gtnn/pinn.hpp"
#include "gtnn/rng.hpp"

namespace {

using namespace gtnn;

// Flags beat config keys beat built-in defaults.
struct Merged {
  const CLI::App* cmd;
  const Config* cfg;

  template <class T>
  T pick(const std::string& flag, const std::string& key, T cli_value, T dflt) const {
    if (cmd->count(flag) > 0) return cli_value;
    if constexpr (std::is_same_v<T, int>) return cfg->get_int(key, dflt);
    else if constexpr (std::is_same_v<T, double>) return cfg->get_double(key, dflt);
    else if constexpr (std::is_same_v<T, std::string>) return cfg->get_string(key, dflt);
    else return dflt;
  }
};

int cmd_train(const CLI::App* cmd, const Config& cfg, const std::string& case_id_cli,
              const std::string& family_cli, int L_cli, int M_cli, int iters_cli,
              int seeds_cli, int seed_base_cli, int n_train_cli, int n_eval_cli,
              double lr_start_cli, double lr_end_cli, const std::string& data_cli,
              const std::string& out_cli, int jobs_cli, int eval_seed_cli,
              int data_seed_cli, bool no_checkpoints) {
  Merged m{cmd, &cfg};
  ExperimentSpec ex;
  ex.case_id = m.pick<std::string>("--case", "case", case_id_cli, "2.1");
  ex.family = family_from_name(m.pick<std::string>("--family", "family", family_cli, "qtnn"));
  ex.depth = m.pick<int>("--L", "L", L_cli, 3);
  ex.width = m.pick<int>("--M", "M", M_cli, 100);
  ex.train.iterations = m.pick<int>("--iterations", "iterations", iters_cli, 20000);
  ex.train.n_seeds = m.pick<int>("--seeds", "seeds", seeds_cli, 10);
  ex.train.lr_start = m.pick<double>("--lr-start", "lr_start", lr_start_cli, 1e-2);
  ex.train.lr_end = m.pick<double>("--lr-end", "lr_end", lr_end_cli, 1e-3);
  ex.seed_base = static_cast<std::uint64_t>(
      m.pick<int>("--seed-base", "seed_base", seed_base_cli, 1));
  ex.n_train = m.pick<int>("--n-train", "n_train", n_train_cli,
                           ex.case_id == "1" ? 2000 : 20000);
  ex.n_eval = m.pick<int>("--n-eval", "n_eval", n_eval_cli, 20000);
  ex.eval_seed = static_cast<std::uint64_t>(
      m.pick<int>("--eval-seed", "eval_seed", eval_seed_cli, 424242));
  ex.data_seed = static_cast<std::uint64_t>(
      m.pick<int>("--data-seed", "data_seed", data_seed_cli, 777));
  ex.jobs = m.pick<int>("--jobs", "jobs", jobs_cli, 0);
  ex.case1_csv = m.pick<std::string>("--data", "data", data_cli, "");
  ex.write_checkpoints = !no_checkpoints;
  const std::string out = m.pick<std::string>("--out", "out", out_cli, "out");

  const EvalReport report = run_case(ex, out);
  std::printf("case %s %s L=%d M=%d: best rel_l2 %.6e, average %.6e (%zu runs)\n",
              ex.case_id.c_str(), family_name(ex.family).c_str(), ex.depth, ex.width,
              report.best, report.average, report.runs.size());
  for (const RunResult& r : report.runs) {
    if (r.diverged)
      std::printf("  seed %llu: diverged (final loss %.3e)\n",
                  static_cast<unsigned long long>(r.seed), r.final_loss);
    else
      std::printf("  seed %llu: rel_l2 %.6e loss %.6e (%.1fs)\n",
                  static_cast<unsigned long long>(r.seed), r.rel_l2, r.final_loss,
                  r.wall_seconds);
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& case_id, int n_eval,
             int eval_seed, const std::string& data, int jobs) {
  const Network net = load_checkpoint(checkpoint);
  const int d = case_dim(case_id);
  if (d != net.spec.input_dim)
    throw std::runtime_error("eval: checkpoint dimension does not match the case");
  std::vector<double> X;
  std::vector<double> truth;
  int n = 0;
  if (case_id == "1" && !data.empty()) {
    const Dataset ds = load_case1_csv(data);
    X = ds.X;
    truth = ds.y;
    n = ds.size();
  } else {
    const Domain dom = d == 1 ? Domain::interval(-1.0, 1.0) : Domain::unit_ball(d);
    X = sample_domain(dom, n_eval, SampleMode::random,
                      static_cast<std::uint64_t>(eval_seed));
    n = n_eval;
    truth.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      truth[static_cast<std::size_t>(i)] = case_truth_value(
          case_id, std::span<const double>(X).subspan(static_cast<std::size_t>(i) * d,
                                                      static_cast<std::size_t>(d)));
  }
  std::vector<double> pred(static_cast<std::size_t>(n));
  if (case_id == "3")
    predict_ansatz(net, X, n, pred, jobs);
  else
    predict_batch(net, X, n, pred, jobs);
  std::printf("rel_l2 = %.6e over %d points\n", rel_l2(pred, truth), n);
  return 0;
}

int cmd_barron(const CLI::App* cmd, const Config& cfg, int K_cli, int dim_cli,
               const std::string& widths_cli, int trials_cli, int samples_cli,
               int seed_cli, const std::string& out_cli, int jobs_cli) {
  Merged m{cmd, &cfg};
  BarronStudyConfig bc;
  bc.K = m.pick<int>("--K", "barron_K", K_cli, 1024);
  bc.dim = m.pick<int>("--dim", "barron_dim", dim_cli, 5);
  bc.trials = m.pick<int>("--trials", "barron_trials", trials_cli, 32);
  bc.samples = m.pick<int>("--samples", "barron_samples", samples_cli, 20000);
  bc.seed = static_cast<std::uint64_t>(m.pick<int>("--seed", "barron_seed", seed_cli, 1));
  bc.jobs = m.pick<int>("--jobs", "jobs", jobs_cli, 0);
  const std::string widths_str =
      m.pick<std::string>("--widths", "barron_widths", widths_cli, "8,16,32,64,128,256,512");
  {
    Config tmp;
    tmp.set("w", widths_str);
    bc.widths = tmp.get_int_list("w", {});
  }
  if (bc.widths.size() < 2) {
    std::fprintf(stderr, "error: need >= 2 widths\n");
    return 2;
  }
  if (bc.trials == 1)
    std::fprintf(stderr, "warning: a single trial per width gives a noisy slope\n");

  const BarronStudyResult r = barron_rate_study(bc);
  const std::string out = m.pick<std::string>("--out", "barron_out", out_cli, "");
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << "M,mean_sq_h1,rms_h1,bound\n";
    f.precision(12);
    for (const BarronWidthResult& wr : r.per_width)
      f << wr.M << ',' << wr.mean_sq_h1 << ',' << wr.rms_h1 << ',' << wr.bound << '\n';
  }
  for (const BarronWidthResult& wr : r.per_width)
    std::printf("M=%4d  rms_h1 %.6e  mean_sq %.6e  bound %.6e\n", wr.M, wr.rms_h1,
                wr.mean_sq_h1, wr.bound);
  std::printf("slope %.4f (fit rms residual %.4f), atom H1 mean sq %.6e, norm bound sq %.6e\n",
              r.slope, r.fit_rms_residual, r.atom_h1_mean_sq, r.norm_bound_sq);
  return 0;
}

int cmd_profile(const std::string& family, int seed, const std::string& out, int points) {
  const ProfileFamily fam = profile_family_from_name(family);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        -5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(points - 1);
  const auto xy = profile_emit(fam, static_cast<std::uint64_t>(seed), grid);
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f.precision(17);
  for (const auto& [x, y] : xy) f << x << ',' << y << '\n';
  std::printf("wrote %zu rows to %s\n", xy.size(), out.c_str());
  return 0;
}

int cmd_reduction_check() {
  const ReductionReport report = reduction_suite();
  for (const ReductionCheck& c : report.checks)
    std::printf("%-28s max |diff| = %.3e\n", c.name.c_str(), c.max_abs_diff);
  std::printf("%s (worst %.3e, tolerance 1e-14)\n", report.pass ? "PASS" : "FAIL",
              report.worst);
  return report.pass ? 0 : 1;
}

int cmd_gradcheck(int jobs) {
  // Regression: batched and tape gradients against central differences.
  double worst_reg = 0.0;
  Rng rng(4242);
  for (int t = 0; t < 6; ++t) {
    const Family fam = t % 3 == 0 ? Family::fnn : (t % 3 == 1 ? Family::qtnn : Family::ctnn);
    const int d = t % 2 == 0 ? 1 : 5;
    const int depth = t < 3 ? 2 : 3;
    const NetworkSpec spec = make_spec(fam, depth, 6, d, Activation::sigmoid);
    Dataset data;
    data.dim = d;
    const int n = 16;
    data.X = sample_domain(d == 1 ? Domain::interval(-1.0, 1.0) : Domain::unit_ball(d),
                           n, SampleMode::random, 100 + static_cast<std::uint64_t>(t));
    data.y.resize(n);
    for (int i = 0; i < n; ++i)
      data.y[static_cast<std::size_t>(i)] = std::sin(3.0 * data.point(i)[0]);
    Network net = make_network(spec, 500 + static_cast<std::uint64_t>(t));
    RegressionObjective obj(spec, data, jobs);
    std::vector<double> grad(net.params.size());
    obj.eval_grad(net.params.all(), grad);
    const auto f = [&](std::span<const double> th) { return obj.eval(th); };
    const GradCheckResult r = grad_check(f, net.params.all(), grad, 1e-5);
    worst_reg = std::max(worst_reg, r.max_rel_error);
  }
  // PDE residual objective, downsized instance.
  double worst_pinn = 0.0;
  for (int t = 0; t < 3; ++t) {
    const Family fam = t == 0 ? Family::fnn : (t == 1 ? Family::qtnn : Family::ctnn);
    const NetworkSpec spec = make_spec(fam, 2, 5, 2, Activation::sigmoid);
    const int n = 12;
    std::vector<double> pts =
        sample_domain(Domain::unit_ball(2), n, SampleMode::random,
                      300 + static_cast<std::uint64_t>(t));
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i)
      rhs[static_cast<std::size_t>(i)] = std::cos(2.0 * pts[static_cast<std::size_t>(2 * i)]);
    Network net = make_network(spec, 900 + static_cast<std::uint64_t>(t));
    PinnObjective obj(spec, pts, rhs, jobs);
    std::vector<double> grad(net.params.size());
    obj.eval_grad(net.params.all(), grad);
    const auto f = [&](std::span<const double> th) { return obj.eval(th); };
    const GradCheckResult r = grad_check(f, net.params.all(), grad, 1e-5);
    worst_pinn = std::max(worst_pinn, r.max_rel_error);
  }
  std::printf("regression gradients vs central differences: max rel error %.3e\n",
              worst_reg);
  std::printf("pde residual gradients vs central differences: max rel error %.3e\n",
              worst_pinn);
  const bool pass = worst_reg < 1e-6 && worst_pinn < 1e-4;
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"General transformation network experiments"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  // train
  auto* train = app.add_subcommand("train", "train one (case, family, L, M) cell");
  std::string t_case = "2.1", t_family = "qtnn", t_data, t_out = "out";
  int t_L = 3, t_M = 100, t_iters = 20000, t_seeds = 10, t_seed_base = 1;
  int t_ntrain = 0, t_neval = 20000, t_jobs = 0, t_eval_seed = 424242, t_data_seed = 777;
  double t_lr0 = 1e-2, t_lr1 = 1e-3;
  bool t_nockpt = false;
  train->add_option("--case", t_case, "case id: 1, 2.1, 2.2, 2.3, 3");
  train->add_option("--family", t_family, "fnn | qtnn | ctnn");
  train->add_option("--L", t_L, "depth");
  train->add_option("--M", t_M, "hidden width");
  train->add_option("--iterations", t_iters, "optimizer steps");
  train->add_option("--seeds", t_seeds, "number of random seeds");
  train->add_option("--seed-base", t_seed_base, "first seed value");
  train->add_option("--n-train", t_ntrain, "training or collocation points");
  train->add_option("--n-eval", t_neval, "test points");
  train->add_option("--lr-start", t_lr0, "initial learning rate");
  train->add_option("--lr-end", t_lr1, "final learning rate");
  train->add_option("--data", t_data, "case 1 CSV file");
  train->add_option("--out", t_out, "output directory");
  train->add_option("--jobs", t_jobs, "worker threads (0 = all cores)");
  train->add_option("--eval-seed", t_eval_seed, "test set seed");
  train->add_option("--data-seed", t_data_seed, "collocation seed");
  train->add_flag("--no-checkpoints", t_nockpt, "skip checkpoint files");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a case's test set");
  std::string e_ckpt, e_case = "2.1", e_data;
  int e_neval = 20000, e_seed = 424242, e_jobs = 0;
  eval->add_option("--checkpoint", e_ckpt, "checkpoint file")->required();
  eval->add_option("--case", e_case, "case id");
  eval->add_option("--n-eval", e_neval, "test points");
  eval->add_option("--eval-seed", e_seed, "test set seed");
  eval->add_option("--data", e_data, "case 1 CSV file");
  eval->add_option("--jobs", e_jobs, "worker threads");

  // barron
  auto* barron = app.add_subcommand("barron", "Monte Carlo width-rate study");
  int b_K = 1024, b_dim = 5, b_trials = 32, b_samples = 20000, b_seed = 1, b_jobs = 0;
  std::string b_widths = "8,16,32,64,128,256,512", b_out;
  barron->add_option("--K", b_K, "atoms in the sampling measure");
  barron->add_option("--dim", b_dim, "input dimension");
  barron->add_option("--widths", b_widths, "comma-separated widths");
  barron->add_option("--trials", b_trials, "trials per width");
  barron->add_option("--samples", b_samples, "integration points");
  barron->add_option("--seed", b_seed, "measure seed");
  barron->add_option("--out", b_out, "per-width CSV output");
  barron->add_option("--jobs", b_jobs, "worker threads");

  // profile
  auto* profile = app.add_subcommand("profile", "emit x,y profile data on [-5,5]");
  std::string p_family = "qtnn2", p_out = "profile.csv";
  int p_seed = 1, p_points = 1001;
  profile->add_option("--family", p_family,
                      "piecewise_quad | piecewise_cubic | qtnn2 | ctnn2");
  profile->add_option("--seed", p_seed, "coefficient seed");
  profile->add_option("--out", p_out, "output CSV");
  profile->add_option("--points", p_points, "grid size")->check(CLI::Range(2, 1000000));

  auto* reduction = app.add_subcommand("reduction-check", "exact psi=1 reduction identities");
  (void)reduction;

  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  int g_jobs = 0;
  gradcheck_cmd->add_option("--jobs", g_jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Config cfg;
  if (!config_path.empty()) {
    try {
      cfg = Config::from_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  try {
    if (train->parsed())
      return cmd_train(train, cfg, t_case, t_family, t_L, t_M, t_iters, t_seeds,
                       t_seed_base, t_ntrain, t_neval, t_lr0, t_lr1, t_data, t_out,
                       t_jobs, t_eval_seed, t_data_seed, t_nockpt);
    if (eval->parsed()) return cmd_eval(e_ckpt, e_case, e_neval, e_seed, e_data, e_jobs);
    if (barron->parsed())
      return cmd_barron(barron, cfg, b_K, b_dim, b_widths, b_trials, b_samples, b_seed,
                        b_out, b_jobs);
    if (profile->parsed()) return cmd_profile(p_family, p_seed, p_out, p_points);
    if (reduction->parsed()) return cmd_reduction_check();
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(g_jobs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
