#include "inverseset.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "inverseset/experiment.hpp"
#include "inverseset/sampler.hpp"
#include "inverseset/version.hpp"

using namespace inverseset;

namespace {

thread_local std::string t_last_error;

ivs_status status_from(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return IVS_ERR_DIMENSION_MISMATCH;
    case Errc::nonfinite_input: return IVS_ERR_NONFINITE_INPUT;
    case Errc::nonfinite_value: return IVS_ERR_NONFINITE_VALUE;
    case Errc::schema_violation: return IVS_ERR_SCHEMA_VIOLATION;
    case Errc::unsupported_kind: return IVS_ERR_UNSUPPORTED_KIND;
    case Errc::degenerate_band: return IVS_ERR_DEGENERATE_BAND;
    case Errc::band_outside_logistic_range:
      return IVS_ERR_BAND_OUTSIDE_LOGISTIC_RANGE;
    case Errc::max_outer_iterations: return IVS_ERR_MAX_OUTER_ITERATIONS;
    case Errc::walk_budget_exhausted: return IVS_ERR_WALK_BUDGET_EXHAUSTED;
    case Errc::config_invalid: return IVS_ERR_CONFIG_INVALID;
    case Errc::model_load: return IVS_ERR_MODEL_LOAD;
    case Errc::fingerprint_mismatch: return IVS_ERR_FINGERPRINT_MISMATCH;
    case Errc::unsupported_dimension: return IVS_ERR_UNSUPPORTED_DIMENSION;
    case Errc::empty_set: return IVS_ERR_EMPTY_SET;
    case Errc::too_few_samples: return IVS_ERR_TOO_FEW_SAMPLES;
    case Errc::missing_artifacts: return IVS_ERR_MISSING_ARTIFACTS;
    case Errc::io_error: return IVS_ERR_IO;
    case Errc::invalid_argument: return IVS_ERR_INVALID_ARGUMENT;
  }
  return IVS_ERR_UNKNOWN;
}

template <typename Fn>
ivs_status guarded(Fn&& fn) {
  try {
    fn();
    return IVS_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return IVS_ERR_UNKNOWN;
  }
}

ivs_status bad_argument(const char* what) {
  t_last_error = what;
  return IVS_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct ivs_model {
  DiffMap map;
};

struct ivs_problem {
  DiffMap generator;
  DiffMap encoder;
  FeasibilityMode mode;
  std::vector<ConstraintSpec> constraints;
  mutable std::optional<InverseSetProblem> built;

  const InverseSetProblem& get() const {
    if (!built)
      built.emplace(generator, encoder, constraints, mode);
    return *built;
  }
};

struct ivs_sampleset {
  SampleSet set;
};

extern "C" {

const char* ivs_version(void) { return kToolVersion; }

const char* ivs_status_name(ivs_status status) {
  switch (status) {
    case IVS_OK: return "Ok";
    case IVS_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case IVS_ERR_NONFINITE_INPUT: return "NonFiniteInput";
    case IVS_ERR_NONFINITE_VALUE: return "NonFiniteValue";
    case IVS_ERR_SCHEMA_VIOLATION: return "SchemaViolation";
    case IVS_ERR_UNSUPPORTED_KIND: return "UnsupportedKind";
    case IVS_ERR_DEGENERATE_BAND: return "DegenerateBand";
    case IVS_ERR_BAND_OUTSIDE_LOGISTIC_RANGE: return "BandOutsideLogisticRange";
    case IVS_ERR_MAX_OUTER_ITERATIONS: return "MaxOuterIterationsExceeded";
    case IVS_ERR_WALK_BUDGET_EXHAUSTED: return "WalkBudgetExhausted";
    case IVS_ERR_CONFIG_INVALID: return "ConfigInvalid";
    case IVS_ERR_MODEL_LOAD: return "ModelLoadError";
    case IVS_ERR_FINGERPRINT_MISMATCH: return "FingerprintMismatch";
    case IVS_ERR_UNSUPPORTED_DIMENSION: return "UnsupportedDimension";
    case IVS_ERR_EMPTY_SET: return "EmptySet";
    case IVS_ERR_TOO_FEW_SAMPLES: return "TooFewSamples";
    case IVS_ERR_MISSING_ARTIFACTS: return "MissingArtifacts";
    case IVS_ERR_IO: return "IoError";
    case IVS_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case IVS_ERR_UNKNOWN: return "UnknownError";
  }
  return "UnknownError";
}

const char* ivs_last_error(void) { return t_last_error.c_str(); }

int ivs_exit_code(ivs_status status) {
  if (status == IVS_OK) return 0;
  if (status == IVS_ERR_MAX_OUTER_ITERATIONS ||
      status == IVS_ERR_WALK_BUDGET_EXHAUSTED)
    return 2;
  return 1;
}

ivs_status ivs_model_load(const char* path, ivs_model** out) {
  if (!path || !out) return bad_argument("ivs_model_load: null argument");
  return guarded([&] { *out = new ivs_model{load_model(path)}; });
}

ivs_status ivs_model_save(const ivs_model* model, const char* path) {
  if (!model || !path) return bad_argument("ivs_model_save: null argument");
  return guarded([&] { save_model(model->map, path); });
}

void ivs_model_free(ivs_model* model) { delete model; }

size_t ivs_model_input_dim(const ivs_model* model) {
  return model ? model->map.input_dim() : 0;
}

size_t ivs_model_output_dim(const ivs_model* model) {
  return model ? model->map.output_dim() : 0;
}

const char* ivs_model_kind(const ivs_model* model) {
  return model ? map_kind_name(model->map.kind()) : "?";
}

ivs_status ivs_model_forward(const ivs_model* model, const double* x,
                             size_t x_len, double* y, size_t y_len) {
  if (!model || !x || !y) return bad_argument("ivs_model_forward: null argument");
  return guarded([&] {
    require(y_len == model->map.output_dim(), Errc::dimension_mismatch,
            "ivs_model_forward: y_len != output_dim");
    Vec yv = model->map.forward({x, x_len});
    std::memcpy(y, yv.data(), yv.size() * sizeof(double));
  });
}

ivs_status ivs_model_vjp(const ivs_model* model, const double* x, size_t x_len,
                         const double* u, size_t u_len, double* out,
                         size_t out_len) {
  if (!model || !x || !u || !out)
    return bad_argument("ivs_model_vjp: null argument");
  return guarded([&] {
    require(out_len == model->map.input_dim(), Errc::dimension_mismatch,
            "ivs_model_vjp: out_len != input_dim");
    Vec g = model->map.vjp({x, x_len}, {u, u_len});
    std::memcpy(out, g.data(), g.size() * sizeof(double));
  });
}

ivs_status ivs_model_compose(const ivs_model* outer, const ivs_model* inner,
                             ivs_model** out) {
  if (!outer || !inner || !out)
    return bad_argument("ivs_model_compose: null argument");
  return guarded(
      [&] { *out = new ivs_model{DiffMap::compose(outer->map, inner->map)}; });
}

ivs_status ivs_model_grad_check(const ivs_model* model, const double* x,
                                size_t x_len, double h, double tol,
                                ivs_grad_check_report* out) {
  if (!model || !x || !out)
    return bad_argument("ivs_model_grad_check: null argument");
  return guarded([&] {
    GradCheckReport report = finite_diff_check(model->map, {x, x_len}, h, tol);
    out->max_rel_error = report.max_rel_error;
    out->worst_coordinate = report.worst_coordinate;
    out->step_size = report.step_size;
    out->nondifferentiable = report.nondifferentiable_flag ? 1 : 0;
  });
}

ivs_status ivs_problem_create(const ivs_model* generator,
                              const ivs_model* encoder,
                              const char* feasibility_mode, ivs_problem** out) {
  if (!generator || !encoder || !feasibility_mode || !out)
    return bad_argument("ivs_problem_create: null argument");
  return guarded([&] {
    *out = new ivs_problem{generator->map, encoder->map,
                           parse_feasibility_mode(feasibility_mode),
                           {},
                           std::nullopt};
  });
}

ivs_status ivs_problem_add_constraint(ivs_problem* problem, const ivs_model* f,
                                      double z1, double z2) {
  if (!problem || !f)
    return bad_argument("ivs_problem_add_constraint: null argument");
  return guarded([&] {
    problem->constraints.push_back({f->map, band_new(z1, z2)});
    problem->built.reset();
  });
}

void ivs_problem_free(ivs_problem* problem) { delete problem; }

ivs_status ivs_problem_feasible(const ivs_problem* problem, const double* code,
                                size_t code_len, int* per_constraint,
                                double* activations, int* all_feasible) {
  if (!problem || !code || !all_feasible)
    return bad_argument("ivs_problem_feasible: null argument");
  return guarded([&] {
    FeasibilityVerdict verdict =
        is_feasible(problem->get(), {code, code_len});
    *all_feasible = verdict.all_feasible ? 1 : 0;
    if (per_constraint)
      for (std::size_t k = 0; k < verdict.per_constraint.size(); ++k)
        per_constraint[k] = verdict.per_constraint[k] ? 1 : 0;
    if (activations)
      std::memcpy(activations, verdict.activations.data(),
                  verdict.activations.size() * sizeof(double));
  });
}

void ivs_run_params_init(ivs_run_params* params) {
  if (!params) return;
  params->n = 100;
  params->K = 10;
  params->rng_seed = 1;
  params->init_radius = 1.0;
  params->shared_init = 0;
  params->beta = 1e-2;
  params->max_walk_steps = -1;
  params->mu0 = 10.0;
  params->alpha = 10.0;
  params->inner_steps = 100;
  params->max_outer_iters = 50;
  params->seed_step_beta = 1e-2;
  params->multiplier_residual_with_slack = 0;
  params->diversity = 0;
}

namespace {

void fill_run_inputs(const ivs_run_params& p, AugLagSchedule& schedule,
                     WalkOptions& walk, AugLagOptions& options) {
  schedule.mu0 = p.mu0;
  schedule.alpha = p.alpha;
  schedule.inner_steps = p.inner_steps;
  schedule.max_outer_iters = p.max_outer_iters;
  schedule.step_length_beta = p.seed_step_beta;
  walk.beta = p.beta;
  walk.max_walk_steps = p.max_walk_steps;
  options.multiplier_residual_with_slack =
      p.multiplier_residual_with_slack != 0;
  options.diversity = p.diversity == 1
                          ? DiversityKind::code_space
                          : (p.diversity == 2 ? DiversityKind::none
                                              : DiversityKind::encoded);
}

}  // namespace

ivs_status ivs_sample(const ivs_problem* problem, const ivs_run_params* params,
                      ivs_sampleset** out) {
  if (!problem || !params || !out)
    return bad_argument("ivs_sample: null argument");
  return guarded([&] {
    AugLagSchedule schedule;
    WalkOptions walk;
    AugLagOptions options;
    fill_run_inputs(*params, schedule, walk, options);
    const InverseSetProblem& prob = problem->get();
    Rng rng(params->rng_seed);
    Mat init = params->shared_init
                   ? shared_init(rng, params->K, prob.code_dim(),
                                 params->init_radius)
                   : random_init(rng, params->K, prob.code_dim(),
                                 params->init_radius);
    SampleSet set;
    switch (options.diversity) {
      case DiversityKind::encoded:
        set = run_sampler(prob, params->n, init, schedule, walk, options, rng);
        break;
      case DiversityKind::code_space:
        set = ablate_code_space(prob, params->n, init, schedule, walk, options,
                                rng);
        break;
      case DiversityKind::none:
        set = ablate_feasibility_only(prob, params->n, init, schedule, walk,
                                      options, rng);
        break;
    }
    *out = new ivs_sampleset{std::move(set)};
  });
}

ivs_status ivs_full_batch(const ivs_problem* problem,
                          const ivs_run_params* params, ivs_sampleset** out) {
  if (!problem || !params || !out)
    return bad_argument("ivs_full_batch: null argument");
  return guarded([&] {
    AugLagSchedule schedule;
    WalkOptions walk;
    AugLagOptions options;
    fill_run_inputs(*params, schedule, walk, options);
    const InverseSetProblem& prob = problem->get();
    Rng rng(params->rng_seed);
    Mat init = params->shared_init
                   ? shared_init(rng, params->n, prob.code_dim(),
                                 params->init_radius)
                   : random_init(rng, params->n, prob.code_dim(),
                                 params->init_radius);
    *out = new ivs_sampleset{
        full_batch_solve(prob, params->n, init, schedule, options, rng)};
  });
}

size_t ivs_sampleset_count(const ivs_sampleset* set) {
  return set ? set->set.samples.size() : 0;
}

size_t ivs_sampleset_code_dim(const ivs_sampleset* set) {
  if (!set || set->set.samples.empty()) return 0;
  return set->set.samples.front().code.size();
}

size_t ivs_sampleset_constraint_count(const ivs_sampleset* set) {
  if (!set || set->set.samples.empty()) return 0;
  return set->set.samples.front().activations.size();
}

long ivs_sampleset_total_grad_evals(const ivs_sampleset* set) {
  return set ? set->set.accounting.total_code_evals() : 0;
}

long ivs_sampleset_walk_steps(const ivs_sampleset* set) {
  return set ? set->set.accounting.walk_steps : 0;
}

ivs_status ivs_sampleset_get(const ivs_sampleset* set, size_t index,
                             double* code, double* activations,
                             int* step_index) {
  if (!set) return bad_argument("ivs_sampleset_get: null set");
  return guarded([&] {
    require(index < set->set.samples.size(), Errc::invalid_argument,
            "ivs_sampleset_get: index out of range");
    const SampleRecord& rec = set->set.samples[index];
    if (code)
      std::memcpy(code, rec.code.data(), rec.code.size() * sizeof(double));
    if (activations)
      std::memcpy(activations, rec.activations.data(),
                  rec.activations.size() * sizeof(double));
    if (step_index) *step_index = rec.step_index;
  });
}

void ivs_sampleset_free(ivs_sampleset* set) { delete set; }

ivs_status ivs_run_experiment(const char* config_path, int verbose) {
  if (!config_path) return bad_argument("ivs_run_experiment: null config path");
  int code = 1;
  ivs_status st = guarded([&] { code = run_experiment(config_path, verbose != 0); });
  if (st != IVS_OK) return st;
  if (code == 0) return IVS_OK;
  // run_experiment already reported the diagnostic on stderr.
  t_last_error = "experiment run failed, see diagnostics";
  return code == 2 ? IVS_ERR_WALK_BUDGET_EXHAUSTED : IVS_ERR_CONFIG_INVALID;
}

ivs_status ivs_emit_plot(const char* run_dir, const char* out_svg_path) {
  if (!run_dir || !out_svg_path)
    return bad_argument("ivs_emit_plot: null argument");
  return guarded([&] { emit_plot(run_dir, out_svg_path); });
}

ivs_status ivs_compare_runs(const char* const* run_dirs, size_t count,
                            char** report) {
  if (!run_dirs || !report)
    return bad_argument("ivs_compare_runs: null argument");
  return guarded([&] {
    std::vector<std::string> dirs(run_dirs, run_dirs + count);
    std::string text = compare_runs(dirs);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    require(buf != nullptr, Errc::io_error, "out of memory");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *report = buf;
  });
}

void ivs_string_free(char* s) { std::free(s); }

}  // extern "C"
