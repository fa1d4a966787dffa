#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inverseset/auglag.hpp"
#include "inverseset/problem.hpp"
#include "inverseset/rng.hpp"
#include "inverseset/types.hpp"

namespace inverseset {

struct WalkOptions {
  double beta = 1e-2;
  /// <= 0 selects the default budget of 50 * ceil(n / K) steps.
  long max_walk_steps = -1;
  /// Repulse against every accepted sample instead of the latest
  /// feasible batch only (cost grows with the sample count).
  bool repulse_history = false;
  /// Accepted codes closer than this to an earlier accepted code are
  /// flagged as duplicates in the run metadata.
  double duplicate_eps = 1e-9;
};

struct SampleRecord {
  Vec code;
  Vec activations;     // f_k(G(code)) at acceptance, constraint order
  int step_index = 0;  // 0 for seeds, then the walk step that accepted it
  bool duplicate = false;
};

struct RunAccounting {
  long seed_batch_steps = 0;
  long seed_code_evals = 0;
  int seed_outer_iters = 0;
  long walk_steps = 0;
  long walk_code_evals = 0;
  long total_code_evals() const { return seed_code_evals + walk_code_evals; }
};

struct SampleSet {
  std::string fingerprint;  // problem fingerprint, set by the runner
  std::vector<SampleRecord> samples;
  std::size_t requested_n = 0;
  std::size_t K = 0;
  FeasibilityMode mode = FeasibilityMode::paper_one_sided;
  DiversityKind diversity = DiversityKind::encoded;
  AugLagSchedule schedule;
  double walk_beta = 0.0;
  Mat seed_codes;
  Mat lambda_star;
  double mu_star = 0.0;
  std::vector<TraceRow> seed_trace;
  RunAccounting accounting;
  bool jitter_applied = false;
};

struct WalkBudgetExhausted : Error {
  WalkBudgetExhausted(const std::string& what, SampleSet partial_set)
      : Error(Errc::walk_budget_exhausted, what), partial(std::move(partial_set)) {}
  SampleSet partial;
};

/// State of the incremental walk. The multipliers and penalty are frozen
/// at the seed solver's terminal values and never change afterwards;
/// anchors hold the latest feasible batch (or the full history).
struct WalkState {
  Mat C;   // current codes, K x d
  Mat C0;  // anchor codes
  std::vector<Vec> anchor_enc;  // E(G(anchor)) rows, kept in sync with C0
  Mat slacks;                   // K x p, refreshed each step
  Mat lambda_star;              // frozen
  double mu_star = 0.0;         // frozen
  DiversityKind diversity = DiversityKind::encoded;
  bool repulse_history = false;
  double duplicate_eps = 1e-9;
  int step_index = 0;
  long code_grad_evals = 0;
  std::vector<SampleRecord> accepted;  // seeds first, then walk acceptances

  WalkState(const InverseSetProblem& problem, const SeedResult& seed,
            DiversityKind kind, const WalkOptions& options);
};

/// Gradient of the walk objective at the current codes and slacks;
/// anchors are treated as constants.
Mat sample_objective_grad(const WalkState& state, const InverseSetProblem& problem);

/// Walk objective value at the current codes and slacks (finite-difference
/// oracle hook; the walk itself only ever uses the gradient).
double sample_objective_value(const WalkState& state,
                              const InverseSetProblem& problem);

/// One walk step: closed-form slack refresh with the frozen multipliers,
/// a single gradient step on the codes, acceptance of the feasible ones
/// (appended to the sample list and swapped into their anchor slots).
/// Infeasible codes stay in C and are pulled back by the penalty later.
void walk_step(WalkState& state, const InverseSetProblem& problem, double beta);

/// Seeds via find_seeds (the seeds count as the first K samples), then
/// walk steps until n samples are accepted. Throws WalkBudgetExhausted
/// with the partial set when the step budget runs out.
SampleSet run_sampler(const InverseSetProblem& problem, std::size_t n,
                      const Mat& init, const AugLagSchedule& schedule,
                      const WalkOptions& walk, const AugLagOptions& options,
                      Rng& rng);

/// Reference solver: optimizes all n codes jointly with the seed
/// procedure and returns them all. With n == K and identical inputs this
/// is bit-identical to the seed phase of run_sampler.
SampleSet full_batch_solve(const InverseSetProblem& problem, std::size_t n,
                           const Mat& init, const AugLagSchedule& schedule,
                           const AugLagOptions& options, Rng& rng);

struct MaximizeResult {
  Vec code;
  Vec activation_history;  // f(G(c)) after every ascent step
};

/// Gradient-ascent baseline on f(G(c)) - weight * ||c||^2 for
/// single-constraint problems.
MaximizeResult maximize_activation(const InverseSetProblem& problem, Vec init,
                                   int steps, double beta,
                                   double regularizer_weight);

/// run_sampler with raw-code repulsion ||c_i - c_j||^2 (no encoder).
SampleSet ablate_code_space(const InverseSetProblem& problem, std::size_t n,
                            const Mat& init, const AugLagSchedule& schedule,
                            const WalkOptions& walk, const AugLagOptions& options,
                            Rng& rng);

/// run_sampler with no repulsion at all (constraint terms only).
SampleSet ablate_feasibility_only(const InverseSetProblem& problem, std::size_t n,
                                  const Mat& init, const AugLagSchedule& schedule,
                                  const WalkOptions& walk,
                                  const AugLagOptions& options, Rng& rng);

}  // namespace inverseset
