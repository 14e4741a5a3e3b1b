#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtnn/network.hpp"
#include "gtnn/optim.hpp"
#include "gtnn/targets.hpp"

namespace gtnn {

/// One (case, family, L, M) cell of the reproduction grid.
struct ExperimentSpec {
  std::string case_id = "2.1";  // "1", "2.1", "2.2", "2.3", "3"
  Family family = Family::qtnn;
  int depth = 3;
  int width = 100;
  TrainConfig train;
  int n_train = 20000;           // case 1 default is 2000
  std::uint64_t seed_base = 1;   // run i uses seed seed_base + i
  std::uint64_t data_seed = 777; // random collocation sets (case 3)
  std::uint64_t eval_seed = 424242;
  int n_eval = 20000;
  int jobs = 0;
  std::string case1_csv;  // when set, case 1 reads this file instead of the surrogate
  bool write_checkpoints = true;
};

struct RunResult {
  int seed_index = 0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double rel_l2 = 0.0;  // NaN when diverged
  double wall_seconds = 0.0;
  bool diverged = false;
};

struct EvalReport {
  std::vector<RunResult> runs;
  double best = 0.0;     // min rel_l2 over completed runs
  double average = 0.0;  // mean rel_l2 over completed runs
  std::vector<std::vector<double>> loss_histories;
};

/// Input dimension of a case id ("1", "2.1", "2.2", "2.3", "3").
int case_dim(const std::string& case_id);

/// Closed-form target of the case at x (exact PDE solution for case 3).
double case_truth_value(const std::string& case_id, std::span<const double> x);

/// Builds the case's network spec (activation, composed form) from the
/// experiment description.
NetworkSpec case_network_spec(const ExperimentSpec& ex);

/// Trains n_seeds independent runs of the cell and evaluates each on the
/// case's fixed test set. When out_dir is nonempty, writes per-run rows to
/// results.csv, one summary row to summary.csv, loss histories, and
/// checkpoints there. Throws if every seed diverges.
EvalReport run_case(const ExperimentSpec& ex, const std::string& out_dir = "");

// ---- exact reduction identities ----

struct ReductionCheck {
  std::string name;
  double max_abs_diff = 0.0;
};

struct ReductionReport {
  std::vector<ReductionCheck> checks;
  double worst = 0.0;
  bool pass = false;  // every check <= 1e-14
};

/// Embeds random fnn parameters into qtnn (U=0, v=1) and ctnn (Q=0, U=0,
/// v=1) networks and checks that outputs coincide on random inputs, for
/// depths 2, 3, and 4.
ReductionReport reduction_suite();

}  // namespace gtnn
