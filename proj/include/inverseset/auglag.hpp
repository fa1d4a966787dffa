#pragma once

#include <vector>

#include "inverseset/problem.hpp"
#include "inverseset/rng.hpp"
#include "inverseset/types.hpp"

namespace inverseset {

/// Which pairwise-repulsion objective drives the codes apart.
///   encoded:    squared distances between E(G(c)) encodings
///   code_space: squared distances between raw codes (no encoder)
///   none:       pure feasibility, no repulsion
enum class DiversityKind { encoded, code_space, none };

const char* diversity_kind_name(DiversityKind k);

struct AugLagSchedule {
  double mu0 = 10.0;
  double alpha = 10.0;  // geometric penalty growth, > 1
  int inner_steps = 100;
  double step_length_beta = 1e-2;
  int max_outer_iters = 50;
};

void validate_schedule(const AugLagSchedule& schedule);

struct AugLagOptions {
  /// Paper-literal multiplier update drops the slack from the residual;
  /// setting this uses lambda <- max(lambda - mu*(eps0 - z2 + f - s), 0).
  bool multiplier_residual_with_slack = false;
  /// -1 auto (jitter only when all initial codes are identical),
  /// 0 never, 1 always.
  int symmetry_jitter = -1;
  double jitter_magnitude = 1e-6;
  DiversityKind diversity = DiversityKind::encoded;
};

/// Solver state for the seed search: K codes with one slack and one
/// multiplier per (code, constraint) pair and a shared penalty weight.
struct AugLagState {
  Mat codes;        // K x d
  Mat slacks;       // K x p, >= 0
  Mat multipliers;  // K x p, >= 0
  double mu = 0.0;
  int outer_iter = 0;
  long grad_step_count = 0;  // batch gradient-descent iterations so far
};

struct TraceRow {
  int outer_iter = 0;
  int inner_step = 0;  // 0 = state before any step of this outer iteration
  double mu = 0.0;
  double objective = 0.0;
  Vec min_activation;  // per constraint, min over codes
  int feasible_count = 0;
  long cumulative_grad_steps = 0;
};

struct SeedResult {
  Mat seeds;        // K x d, all feasible in the run's mode
  Mat lambda_star;  // K x p, frozen for the subsequent walk
  double mu_star = 0.0;
  std::vector<TraceRow> trace;
  int outer_iters_used = 0;
  long total_grad_steps = 0;  // batch iterations
  long total_code_evals = 0;  // per-code gradient evaluations (steps * K)
  bool jitter_applied = false;
};

struct MaxOuterIterationsExceeded : Error {
  MaxOuterIterationsExceeded(const std::string& what, SeedResult best)
      : Error(Errc::max_outer_iterations, what), best_so_far(std::move(best)) {}
  SeedResult best_so_far;
};

/// Shared per-batch forward evaluations: x = G(c), enc = E(x) and the
/// constraint activations f_k(x).
struct BatchEval {
  std::vector<Vec> x;
  std::vector<Vec> enc;
  Mat acts;  // K x p
};

BatchEval evaluate_batch(const InverseSetProblem& problem, const Mat& codes);

int count_feasible(const InverseSetProblem& problem, const BatchEval& eval);

/// Sum over ordered pairs of squared encoding distances
/// ||E(G(c_i)) - E(G(c_j))||^2 (each unordered pair counts twice). When
/// grad is non-null it receives d(diversity)/dC.
double diversity_objective(const Mat& codes, const InverseSetProblem& problem,
                           Mat* grad = nullptr);

/// Closed-form minimizer of the Lagrangian over the nonnegative slacks:
/// s_ik = max(0, eps0_k - z2_k + f_k(G(c_i)) - lambda_ik / mu).
void slack_update(AugLagState& state, const InverseSetProblem& problem);

/// Value of the seed Lagrangian at the state's codes and slacks:
/// -diversity + sum_ik [ -lambda_ik r_ik + mu/2 r_ik^2 ],
/// r_ik = eps0_k - z2_k + f_k(G(c_i)) - s_ik.
double lagrangian_value(const AugLagState& state, const InverseSetProblem& problem,
                        DiversityKind kind = DiversityKind::encoded);

double lagrangian_value_and_grad(const AugLagState& state,
                                 const InverseSetProblem& problem, Mat& grad,
                                 DiversityKind kind = DiversityKind::encoded);

/// Projected multiplier step, lambda <- max(lambda - mu * residual, 0).
/// The residual omits the slack unless residual_with_slack is set.
void multiplier_update(AugLagState& state, const InverseSetProblem& problem,
                       bool residual_with_slack = false);

/// mu <- alpha * mu.
void penalty_update(AugLagState& state, const AugLagSchedule& schedule);

/// Coordinate-descent seed search: closed-form slack step, inner gradient
/// descent on the codes, projected multiplier update, geometric penalty
/// growth. Stops the first time every code is feasible in the problem's
/// mode (checked before the first step and after every inner step).
/// Throws MaxOuterIterationsExceeded with the best state seen when the
/// band is never reached.
SeedResult find_seeds(const InverseSetProblem& problem, Mat init,
                      const AugLagSchedule& schedule, const AugLagOptions& options,
                      Rng& rng);

/// K rows drawn uniformly from [-radius, radius]^d.
Mat random_init(Rng& rng, std::size_t K, std::size_t dim, double radius);
/// One uniform row copied K times (the shared-initialization experiment).
Mat shared_init(Rng& rng, std::size_t K, std::size_t dim, double radius);

namespace detail {

/// Core evaluator shared by the seed solver and the walk. Computes the
/// augmented-Lagrangian value (and optionally the gradient w.r.t. codes)
/// with optional anchor repulsion. anchor_enc/anchor_codes supply the
/// constant anchor terms for encoded/code_space diversity respectively.
double auglag_eval(const InverseSetProblem& problem, const Mat& codes,
                   const BatchEval& eval, const Mat& slacks, const Mat& lambda,
                   double mu, DiversityKind kind,
                   const std::vector<Vec>* anchor_enc, const Mat* anchor_codes,
                   Mat* grad_out);

}  // namespace detail

}  // namespace inverseset
