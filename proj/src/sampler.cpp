#include "inverseset/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace inverseset {

namespace {

long default_walk_budget(std::size_t n, std::size_t K) {
  long batches = static_cast<long>((n + K - 1) / K);
  return 50 * std::max<long>(1, batches);
}

bool near_duplicate(const std::vector<SampleRecord>& accepted, const Vec& code,
                    double eps) {
  for (const auto& rec : accepted) {
    double d2 = 0.0;
    for (std::size_t t = 0; t < code.size(); ++t) {
      double diff = rec.code[t] - code[t];
      d2 += diff * diff;
    }
    if (std::sqrt(d2) < eps) return true;
  }
  return false;
}

void accept(std::vector<SampleRecord>& accepted, Vec code, Vec activations,
            int step, double duplicate_eps) {
  SampleRecord rec;
  rec.duplicate = near_duplicate(accepted, code, duplicate_eps);
  rec.code = std::move(code);
  rec.activations = std::move(activations);
  rec.step_index = step;
  accepted.push_back(std::move(rec));
}

SampleSet make_sample_set(const InverseSetProblem& problem, std::size_t n,
                          std::size_t K, const SeedResult& seed,
                          const AugLagSchedule& schedule,
                          const WalkOptions& walk, DiversityKind kind) {
  SampleSet set;
  set.requested_n = n;
  set.K = K;
  set.mode = problem.mode();
  set.diversity = kind;
  set.schedule = schedule;
  set.walk_beta = walk.beta;
  set.seed_codes = seed.seeds;
  set.lambda_star = seed.lambda_star;
  set.mu_star = seed.mu_star;
  set.seed_trace = seed.trace;
  set.accounting.seed_batch_steps = seed.total_grad_steps;
  set.accounting.seed_code_evals = seed.total_code_evals;
  set.accounting.seed_outer_iters = seed.outer_iters_used;
  set.jitter_applied = seed.jitter_applied;
  return set;
}

SampleSet run_pipeline(const InverseSetProblem& problem, std::size_t n,
                       const Mat& init, const AugLagSchedule& schedule,
                       const WalkOptions& walk, AugLagOptions options,
                       DiversityKind kind, Rng& rng) {
  std::size_t K = init.rows;
  require(n >= K && K >= 1, Errc::invalid_argument,
          "run_sampler: need n >= K >= 1");
  options.diversity = kind;

  SeedResult seed = find_seeds(problem, init, schedule, options, rng);
  SampleSet set = make_sample_set(problem, n, K, seed, schedule, walk, kind);

  WalkState state(problem, seed, kind, walk);
  while (state.accepted.size() < n) {
    long budget = walk.max_walk_steps > 0 ? walk.max_walk_steps
                                          : default_walk_budget(n, K);
    if (state.step_index >= budget) {
      set.samples = state.accepted;
      set.accounting.walk_steps = state.step_index;
      set.accounting.walk_code_evals = state.code_grad_evals;
      throw WalkBudgetExhausted(
          "walk budget of " + std::to_string(budget) + " steps exhausted with " +
              std::to_string(state.accepted.size()) + " of " +
              std::to_string(n) + " samples accepted",
          std::move(set));
    }
    walk_step(state, problem, walk.beta);
  }

  state.accepted.resize(n);  // seeds count toward n; keep exactly the first n
  set.samples = std::move(state.accepted);
  set.accounting.walk_steps = state.step_index;
  set.accounting.walk_code_evals = state.code_grad_evals;
  return set;
}

}  // namespace

WalkState::WalkState(const InverseSetProblem& problem, const SeedResult& seed,
                     DiversityKind kind, const WalkOptions& options)
    : C(seed.seeds),
      C0(seed.seeds),
      slacks(seed.seeds.rows, problem.constraint_count()),
      lambda_star(seed.lambda_star),
      mu_star(seed.mu_star),
      diversity(kind),
      repulse_history(options.repulse_history),
      duplicate_eps(options.duplicate_eps) {
  BatchEval eval = evaluate_batch(problem, C0);
  anchor_enc = eval.enc;
  for (std::size_t i = 0; i < C0.rows; ++i)
    accept(accepted, Vec(C0.row(i).begin(), C0.row(i).end()),
           Vec(eval.acts.row(i).begin(), eval.acts.row(i).end()), 0,
           duplicate_eps);
}

namespace {

// Anchor views for the walk objective: history mode repulses against
// every accepted sample, otherwise against the current anchor batch.
struct AnchorView {
  std::vector<Vec> enc;
  Mat codes;
};

AnchorView anchor_view(const WalkState& state, const InverseSetProblem& problem) {
  AnchorView view;
  if (!state.repulse_history) {
    view.enc = state.anchor_enc;
    view.codes = state.C0;
    return view;
  }
  view.codes = Mat(state.accepted.size(), state.C.cols);
  for (std::size_t i = 0; i < state.accepted.size(); ++i)
    std::copy(state.accepted[i].code.begin(), state.accepted[i].code.end(),
              view.codes.row(i).begin());
  if (state.diversity == DiversityKind::encoded) {
    view.enc.reserve(state.accepted.size());
    for (const auto& rec : state.accepted)
      view.enc.push_back(problem.E().forward(problem.G().forward(rec.code)));
  }
  return view;
}

double walk_eval(const WalkState& state, const InverseSetProblem& problem,
                 Mat* grad) {
  BatchEval eval = evaluate_batch(problem, state.C);
  AnchorView anchors = anchor_view(state, problem);
  return detail::auglag_eval(problem, state.C, eval, state.slacks,
                             state.lambda_star, state.mu_star, state.diversity,
                             &anchors.enc, &anchors.codes, grad);
}

}  // namespace

double sample_objective_value(const WalkState& state,
                              const InverseSetProblem& problem) {
  return walk_eval(state, problem, nullptr);
}

Mat sample_objective_grad(const WalkState& state,
                          const InverseSetProblem& problem) {
  Mat grad(state.C.rows, state.C.cols);
  walk_eval(state, problem, &grad);
  return grad;
}

void walk_step(WalkState& state, const InverseSetProblem& problem, double beta) {
  std::size_t K = state.C.rows, p = problem.constraint_count();

  // Slack refresh with the frozen multipliers (closed form).
  BatchEval eval = evaluate_batch(problem, state.C);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t k = 0; k < p; ++k) {
      const ActivationBand& band = problem.constraints()[k].band;
      double s = band.epsilon0() - band.z2 + eval.acts(i, k) -
                 state.lambda_star(i, k) / state.mu_star;
      state.slacks(i, k) = std::max(0.0, s);
    }

  Mat grad(K, state.C.cols);
  AnchorView anchors = anchor_view(state, problem);
  detail::auglag_eval(problem, state.C, eval, state.slacks, state.lambda_star,
                      state.mu_star, state.diversity, &anchors.enc,
                      &anchors.codes, &grad);
  state.code_grad_evals += static_cast<long>(K);

  Mat next = state.C;
  for (std::size_t t = 0; t < next.data.size(); ++t)
    next.data[t] -= beta * grad.data[t];

  ++state.step_index;

  BatchEval next_eval = evaluate_batch(problem, next);
  for (std::size_t i = 0; i < K; ++i) {
    auto verdict = feasibility_from_activations(problem, next_eval.acts.row(i));
    if (!verdict.all_feasible) continue;
    Vec code(next.row(i).begin(), next.row(i).end());
    accept(state.accepted, code, verdict.activations, state.step_index,
           state.duplicate_eps);
    std::copy(code.begin(), code.end(), state.C0.row(i).begin());
    state.anchor_enc[i] = next_eval.enc[i];
  }
  state.C = std::move(next);
}

SampleSet run_sampler(const InverseSetProblem& problem, std::size_t n,
                      const Mat& init, const AugLagSchedule& schedule,
                      const WalkOptions& walk, const AugLagOptions& options,
                      Rng& rng) {
  return run_pipeline(problem, n, init, schedule, walk, options,
                      DiversityKind::encoded, rng);
}

SampleSet ablate_code_space(const InverseSetProblem& problem, std::size_t n,
                            const Mat& init, const AugLagSchedule& schedule,
                            const WalkOptions& walk, const AugLagOptions& options,
                            Rng& rng) {
  return run_pipeline(problem, n, init, schedule, walk, options,
                      DiversityKind::code_space, rng);
}

SampleSet ablate_feasibility_only(const InverseSetProblem& problem, std::size_t n,
                                  const Mat& init, const AugLagSchedule& schedule,
                                  const WalkOptions& walk,
                                  const AugLagOptions& options, Rng& rng) {
  return run_pipeline(problem, n, init, schedule, walk, options,
                      DiversityKind::none, rng);
}

SampleSet full_batch_solve(const InverseSetProblem& problem, std::size_t n,
                           const Mat& init, const AugLagSchedule& schedule,
                           const AugLagOptions& options, Rng& rng) {
  require(init.rows == n, Errc::invalid_argument,
          "full_batch_solve: init must supply one row per requested sample");
  AugLagOptions opts = options;
  SeedResult seed = find_seeds(problem, init, schedule, opts, rng);
  WalkOptions no_walk;
  no_walk.beta = 0.0;
  SampleSet set =
      make_sample_set(problem, n, n, seed, schedule, no_walk, opts.diversity);
  BatchEval eval = evaluate_batch(problem, seed.seeds);
  for (std::size_t i = 0; i < n; ++i)
    accept(set.samples, Vec(seed.seeds.row(i).begin(), seed.seeds.row(i).end()),
           Vec(eval.acts.row(i).begin(), eval.acts.row(i).end()), 0,
           no_walk.duplicate_eps);
  return set;
}

MaximizeResult maximize_activation(const InverseSetProblem& problem, Vec init,
                                   int steps, double beta,
                                   double regularizer_weight) {
  require(problem.constraint_count() == 1, Errc::invalid_argument,
          "maximize_activation: single-constraint problems only");
  require(init.size() == problem.code_dim(), Errc::dimension_mismatch,
          "maximize_activation: init length != code dimension");
  require(steps >= 0, Errc::invalid_argument, "maximize_activation: steps < 0");

  const DiffMap& G = problem.G();
  const DiffMap& f = problem.constraints()[0].f;

  MaximizeResult result;
  result.code = std::move(init);
  result.activation_history.reserve(steps);
  for (int t = 0; t < steps; ++t) {
    Vec x = G.forward(result.code);
    Vec fx_grad = f.vjp(x, std::array{1.0});
    Vec grad = G.vjp(result.code, fx_grad);
    for (std::size_t j = 0; j < result.code.size(); ++j) {
      result.code[j] +=
          beta * (grad[j] - 2.0 * regularizer_weight * result.code[j]);
      require(std::isfinite(result.code[j]), Errc::nonfinite_value,
              "maximize_activation: iterate overflowed");
    }
    result.activation_history.push_back(f.forward(G.forward(result.code))[0]);
  }
  return result;
}

}  // namespace inverseset
