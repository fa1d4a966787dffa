#include "inverseset/auglag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace inverseset {

const char* diversity_kind_name(DiversityKind k) {
  switch (k) {
    case DiversityKind::encoded: return "encoded";
    case DiversityKind::code_space: return "code_space";
    case DiversityKind::none: return "none";
  }
  return "?";
}

void validate_schedule(const AugLagSchedule& s) {
  require(s.mu0 > 0, Errc::invalid_argument, "schedule: mu0 must be positive");
  require(s.alpha > 1, Errc::invalid_argument, "schedule: alpha must exceed 1");
  require(s.inner_steps > 0, Errc::invalid_argument,
          "schedule: inner_steps must be positive");
  require(s.step_length_beta > 0, Errc::invalid_argument,
          "schedule: step_length_beta must be positive");
  require(s.max_outer_iters > 0, Errc::invalid_argument,
          "schedule: max_outer_iters must be positive");
}

BatchEval evaluate_batch(const InverseSetProblem& problem, const Mat& codes) {
  require(codes.cols == problem.code_dim(), Errc::dimension_mismatch,
          "evaluate_batch: code dim mismatch");
  std::size_t K = codes.rows, p = problem.constraint_count();
  BatchEval eval;
  eval.x.resize(K);
  eval.enc.resize(K);
  eval.acts = Mat(K, p);
  for (std::size_t i = 0; i < K; ++i) {
    eval.x[i] = problem.G().forward(codes.row(i));
    eval.enc[i] = problem.E().forward(eval.x[i]);
    for (std::size_t k = 0; k < p; ++k)
      eval.acts(i, k) = problem.constraints()[k].f.forward(eval.x[i])[0];
  }
  return eval;
}

int count_feasible(const InverseSetProblem& problem, const BatchEval& eval) {
  int count = 0;
  for (std::size_t i = 0; i < eval.acts.rows; ++i)
    if (feasibility_from_activations(problem, eval.acts.row(i)).all_feasible)
      ++count;
  return count;
}

namespace detail {

double auglag_eval(const InverseSetProblem& problem, const Mat& codes,
                   const BatchEval& eval, const Mat& slacks, const Mat& lambda,
                   double mu, DiversityKind kind,
                   const std::vector<Vec>* anchor_enc, const Mat* anchor_codes,
                   Mat* grad_out) {
  std::size_t K = codes.rows, d = codes.cols, p = problem.constraint_count();
  if (grad_out) *grad_out = Mat(K, d);

  double diversity = 0.0;

  // Pairwise repulsion among the batch plus (optionally) against the
  // fixed anchors. Sums over ordered pairs, matching the objective.
  std::vector<Vec> enc_cotangent;  // per-code, encoding-space cotangent of -L
  Vec self_sum, anchor_sum;
  if (kind == DiversityKind::encoded) {
    std::size_t e = problem.encoding_dim();
    self_sum.assign(e, 0.0);
    for (const Vec& v : eval.enc)
      for (std::size_t t = 0; t < e; ++t) self_sum[t] += v[t];
    double sq_sum = 0.0;
    for (const Vec& v : eval.enc)
      for (double t : v) sq_sum += t * t;
    // sum_{i,j} ||e_i - e_j||^2 = 2K sum ||e_i||^2 - 2 ||sum e_i||^2
    double self_norm2 = 0.0;
    for (double t : self_sum) self_norm2 += t * t;
    diversity += 2.0 * static_cast<double>(K) * sq_sum - 2.0 * self_norm2;

    if (anchor_enc) {
      anchor_sum.assign(e, 0.0);
      double a_sq = 0.0;
      for (const Vec& a : *anchor_enc) {
        for (std::size_t t = 0; t < e; ++t) anchor_sum[t] += a[t];
        for (double t : a) a_sq += t * t;
      }
      double m = static_cast<double>(anchor_enc->size());
      for (const Vec& v : eval.enc) {
        double vv = 0.0, va = 0.0;
        for (std::size_t t = 0; t < e; ++t) {
          vv += v[t] * v[t];
          va += v[t] * anchor_sum[t];
        }
        diversity += m * vv - 2.0 * va + a_sq;
      }
    }

    if (grad_out) {
      enc_cotangent.resize(K);
      double m = anchor_enc ? static_cast<double>(anchor_enc->size()) : 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        const Vec& v = eval.enc[i];
        Vec u(v.size());
        for (std::size_t t = 0; t < v.size(); ++t) {
          double g = 4.0 * (static_cast<double>(K) * v[t] - self_sum[t]);
          if (anchor_enc) g += 2.0 * (m * v[t] - anchor_sum[t]);
          u[t] = -g;  // objective carries -diversity
        }
        enc_cotangent[i] = std::move(u);
      }
    }
  } else if (kind == DiversityKind::code_space) {
    self_sum.assign(d, 0.0);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t t = 0; t < d; ++t) self_sum[t] += codes(i, t);
    double sq_sum = 0.0;
    for (double t : codes.data) sq_sum += t * t;
    double self_norm2 = 0.0;
    for (double t : self_sum) self_norm2 += t * t;
    diversity += 2.0 * static_cast<double>(K) * sq_sum - 2.0 * self_norm2;

    if (anchor_codes) {
      anchor_sum.assign(d, 0.0);
      double a_sq = 0.0;
      for (std::size_t y = 0; y < anchor_codes->rows; ++y) {
        auto row = anchor_codes->row(y);
        for (std::size_t t = 0; t < d; ++t) anchor_sum[t] += row[t];
        for (double t : row) a_sq += t * t;
      }
      double m = static_cast<double>(anchor_codes->rows);
      for (std::size_t i = 0; i < K; ++i) {
        double vv = 0.0, va = 0.0;
        for (std::size_t t = 0; t < d; ++t) {
          vv += codes(i, t) * codes(i, t);
          va += codes(i, t) * anchor_sum[t];
        }
        diversity += m * vv - 2.0 * va + a_sq;
      }
    }
  }

  // Constraint blocks: -lambda r + mu/2 r^2 per (code, constraint).
  double constraint_value = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    Vec x_cotangent;  // input-space cotangent accumulated for code i
    if (grad_out) x_cotangent.assign(problem.input_dim(), 0.0);
    for (std::size_t k = 0; k < p; ++k) {
      const ActivationBand& band = problem.constraints()[k].band;
      double r = band.epsilon0() - band.z2 + eval.acts(i, k) - slacks(i, k);
      constraint_value += -lambda(i, k) * r + 0.5 * mu * r * r;
      if (grad_out) {
        double coeff = -lambda(i, k) + mu * r;
        if (coeff != 0.0) {
          Vec fgrad =
              problem.constraints()[k].f.vjp(eval.x[i], std::array{1.0});
          for (std::size_t t = 0; t < fgrad.size(); ++t)
            x_cotangent[t] += coeff * fgrad[t];
        }
      }
    }
    if (grad_out) {
      if (kind == DiversityKind::encoded) {
        Vec ue = problem.E().vjp(eval.x[i], enc_cotangent[i]);
        for (std::size_t t = 0; t < ue.size(); ++t) x_cotangent[t] += ue[t];
      }
      Vec code_grad = problem.G().vjp(codes.row(i), x_cotangent);
      if (kind == DiversityKind::code_space) {
        double m = anchor_codes ? static_cast<double>(anchor_codes->rows) : 0.0;
        for (std::size_t t = 0; t < d; ++t) {
          double g = 4.0 * (static_cast<double>(K) * codes(i, t) - self_sum[t]);
          if (anchor_codes) g += 2.0 * (m * codes(i, t) - anchor_sum[t]);
          code_grad[t] -= g;
        }
      }
      std::copy(code_grad.begin(), code_grad.end(), grad_out->row(i).begin());
    }
  }

  double value = -diversity + constraint_value;
  require(std::isfinite(value), Errc::nonfinite_value,
          "augmented Lagrangian overflowed to a non-finite value");
  if (grad_out)
    for (double g : grad_out->data)
      require(std::isfinite(g), Errc::nonfinite_value,
              "augmented Lagrangian gradient overflowed");
  return value;
}

}  // namespace detail

double diversity_objective(const Mat& codes, const InverseSetProblem& problem,
                           Mat* grad) {
  BatchEval eval = evaluate_batch(problem, codes);
  // Reuse the core evaluator with zeroed constraint terms.
  Mat zeros(codes.rows, problem.constraint_count());
  double neg = detail::auglag_eval(problem, codes, eval, zeros, zeros, 0.0,
                                   DiversityKind::encoded, nullptr, nullptr, grad);
  if (grad)
    for (double& g : grad->data) g = -g;
  return -neg;
}

void slack_update(AugLagState& state, const InverseSetProblem& problem) {
  require(state.mu > 0, Errc::invalid_argument, "slack_update: mu must be positive");
  BatchEval eval = evaluate_batch(problem, state.codes);
  for (std::size_t i = 0; i < state.codes.rows; ++i)
    for (std::size_t k = 0; k < problem.constraint_count(); ++k) {
      const ActivationBand& band = problem.constraints()[k].band;
      double s = band.epsilon0() - band.z2 + eval.acts(i, k) -
                 state.multipliers(i, k) / state.mu;
      state.slacks(i, k) = std::max(0.0, s);
    }
}

double lagrangian_value(const AugLagState& state, const InverseSetProblem& problem,
                        DiversityKind kind) {
  BatchEval eval = evaluate_batch(problem, state.codes);
  return detail::auglag_eval(problem, state.codes, eval, state.slacks,
                             state.multipliers, state.mu, kind, nullptr, nullptr,
                             nullptr);
}

double lagrangian_value_and_grad(const AugLagState& state,
                                 const InverseSetProblem& problem, Mat& grad,
                                 DiversityKind kind) {
  BatchEval eval = evaluate_batch(problem, state.codes);
  return detail::auglag_eval(problem, state.codes, eval, state.slacks,
                             state.multipliers, state.mu, kind, nullptr, nullptr,
                             &grad);
}

void multiplier_update(AugLagState& state, const InverseSetProblem& problem,
                       bool residual_with_slack) {
  BatchEval eval = evaluate_batch(problem, state.codes);
  for (std::size_t i = 0; i < state.codes.rows; ++i)
    for (std::size_t k = 0; k < problem.constraint_count(); ++k) {
      const ActivationBand& band = problem.constraints()[k].band;
      double r = band.epsilon0() - band.z2 + eval.acts(i, k);
      if (residual_with_slack) r -= state.slacks(i, k);
      state.multipliers(i, k) =
          std::max(state.multipliers(i, k) - state.mu * r, 0.0);
    }
}

void penalty_update(AugLagState& state, const AugLagSchedule& schedule) {
  state.mu *= schedule.alpha;
}

Mat random_init(Rng& rng, std::size_t K, std::size_t dim, double radius) {
  return rng.uniform_mat(K, dim, -radius, radius);
}

Mat shared_init(Rng& rng, std::size_t K, std::size_t dim, double radius) {
  Vec row = rng.uniform_vec(dim, -radius, radius);
  Mat m(K, dim);
  for (std::size_t i = 0; i < K; ++i)
    std::copy(row.begin(), row.end(), m.row(i).begin());
  return m;
}

namespace {

bool rows_all_identical(const Mat& m) {
  for (std::size_t i = 1; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (m(i, j) != m(0, j)) return false;
  return m.rows > 1;
}

Vec column_min(const Mat& acts) {
  Vec mins(acts.cols, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < acts.rows; ++i)
    for (std::size_t k = 0; k < acts.cols; ++k)
      mins[k] = std::min(mins[k], acts(i, k));
  return mins;
}

}  // namespace

SeedResult find_seeds(const InverseSetProblem& problem, Mat init,
                      const AugLagSchedule& schedule, const AugLagOptions& options,
                      Rng& rng) {
  validate_schedule(schedule);
  std::size_t K = init.rows, p = problem.constraint_count();
  require(K >= 1, Errc::invalid_argument, "find_seeds: K must be at least 1");
  require(init.cols == problem.code_dim(), Errc::dimension_mismatch,
          "find_seeds: init columns != code dimension");

  bool jitter = options.symmetry_jitter == 1 ||
                (options.symmetry_jitter == -1 && rows_all_identical(init));
  if (jitter)
    for (double& v : init.data)
      v += rng.uniform(-options.jitter_magnitude, options.jitter_magnitude);

  AugLagState state;
  state.codes = std::move(init);
  state.slacks = Mat(K, p);
  state.multipliers = Mat(K, p);
  state.mu = schedule.mu0;

  SeedResult result;
  result.jitter_applied = jitter;

  Mat best_codes = state.codes;
  int best_feasible = -1;

  BatchEval eval = evaluate_batch(problem, state.codes);

  auto record = [&](int outer, int inner) {
    TraceRow row;
    row.outer_iter = outer;
    row.inner_step = inner;
    row.mu = state.mu;
    row.objective = detail::auglag_eval(problem, state.codes, eval, state.slacks,
                                        state.multipliers, state.mu,
                                        options.diversity, nullptr, nullptr,
                                        nullptr);
    row.min_activation = column_min(eval.acts);
    row.feasible_count = count_feasible(problem, eval);
    row.cumulative_grad_steps = state.grad_step_count;
    result.trace.push_back(row);
    if (row.feasible_count > best_feasible) {
      best_feasible = row.feasible_count;
      best_codes = state.codes;
    }
    return row.feasible_count == static_cast<int>(K);
  };

  auto finish = [&]() {
    result.seeds = state.codes;
    result.lambda_star = state.multipliers;
    result.mu_star = state.mu;
    result.outer_iters_used = state.outer_iter;
    result.total_grad_steps = state.grad_step_count;
    result.total_code_evals = state.grad_step_count * static_cast<long>(K);
    return result;
  };

  // Random inits may already sit inside the band ("stopping as soon as").
  if (record(0, 0)) return finish();

  Mat grad(K, state.codes.cols);
  for (int outer = 1; outer <= schedule.max_outer_iters; ++outer) {
    state.outer_iter = outer;
    slack_update(state, problem);
    for (int inner = 1; inner <= schedule.inner_steps; ++inner) {
      detail::auglag_eval(problem, state.codes, eval, state.slacks,
                          state.multipliers, state.mu, options.diversity, nullptr,
                          nullptr, &grad);
      for (std::size_t t = 0; t < state.codes.data.size(); ++t)
        state.codes.data[t] -= schedule.step_length_beta * grad.data[t];
      ++state.grad_step_count;
      eval = evaluate_batch(problem, state.codes);
      if (record(outer, inner)) return finish();
    }
    multiplier_update(state, problem, options.multiplier_residual_with_slack);
    penalty_update(state, schedule);
  }

  result.seeds = best_codes;
  result.lambda_star = state.multipliers;
  result.mu_star = state.mu;
  result.outer_iters_used = state.outer_iter;
  result.total_grad_steps = state.grad_step_count;
  result.total_code_evals = state.grad_step_count * static_cast<long>(K);
  throw MaxOuterIterationsExceeded(
      "find_seeds: feasibility not reached within " +
          std::to_string(schedule.max_outer_iters) +
          " outer iterations (best feasible count " +
          std::to_string(best_feasible) + " of " + std::to_string(K) +
          "); the band may be empty or unreachable",
      std::move(result));
}

}  // namespace inverseset
