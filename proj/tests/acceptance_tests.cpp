// Acceptance suite: runs every acceptance criterion end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "inverseset/experiment.hpp"
#include "inverseset/metrics.hpp"
#include "oracle.hpp"

using namespace inverseset;
using testutil::fixture;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

struct Fixture {
  std::string name;
  InverseSetProblem problem;
  AugLagSchedule schedule;
  double walk_beta;
  double init_radius;
};

// The four canonical fixture problems (same settings as configs/).
std::vector<Fixture> make_fixtures() {
  std::vector<Fixture> out;

  {  // linear-logistic halfspace through a squashing generator
    AugLagSchedule s;
    s.step_length_beta = 0.5;
    out.push_back({"linlog",
                   InverseSetProblem(
                       load_model(fixture("models/squash_2d.model")),
                       DiffMap::identity(2),
                       {{load_model(fixture("models/linear_logistic_2d.model")),
                         band_new(0.6, 1.0)}},
                       FeasibilityMode::paper_one_sided),
                   s, 0.05, 2.0});
  }
  {  // strict annulus
    AugLagSchedule s;
    s.step_length_beta = 2e-3;
    out.push_back({"annulus",
                   InverseSetProblem(
                       DiffMap::identity(2), DiffMap::identity(2),
                       {{load_model(fixture("models/neg_quadratic_2d.model")),
                         band_new(-4.0, -1.0)}},
                       FeasibilityMode::strict_two_sided),
                   s, 2e-3, 1.6});
  }
  {  // mlp f over G with 4-d codes
    AugLagSchedule s;
    s.step_length_beta = 1e-2;
    out.push_back({"mlp4d",
                   InverseSetProblem(
                       load_model(fixture("models/mlp_G_4_16_2.model")),
                       load_model(fixture("models/mlp_E_2_8_3.model")),
                       {{load_model(fixture("models/mlp_2_4_1.model")),
                         band_new(0.3, 0.7)}},
                       FeasibilityMode::paper_one_sided),
                   s, 1e-2, 1.0});
  }
  {  // intersection of two disks (lens)
    AugLagSchedule s;
    s.step_length_beta = 2e-3;
    out.push_back({"intersection",
                   InverseSetProblem(
                       DiffMap::identity(2), DiffMap::identity(2),
                       {{load_model(fixture("models/lens_f1_2d.model")),
                         band_new(-4.0, -0.25)},
                        {load_model(fixture("models/lens_f2_2d.model")),
                         band_new(-4.0, -0.25)}},
                       FeasibilityMode::paper_one_sided),
                   s, 2e-3, 0.5});
  }
  return out;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- criterion 1: feasibility contract -----------------------------------
void criterion_feasibility(const std::vector<Fixture>& fixtures) {
  bool pass = true;
  std::ostringstream detail;
  for (const auto& fx : fixtures) {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    Mat init = random_init(rng, 10, fx.problem.code_dim(), fx.init_radius);
    WalkOptions walk;
    walk.beta = fx.walk_beta;
    SampleSet set =
        run_sampler(fx.problem, 100, init, fx.schedule, walk, {}, rng);
    double secs = elapsed_s(t0);
    bool ok = set.samples.size() == 100 && secs < 60.0;
    for (const auto& rec : set.samples)
      ok = ok && is_feasible(fx.problem, rec.code).all_feasible;
    detail << fx.name << "=" << (ok ? "ok" : "FAIL") << "(" << set.samples.size()
           << " in " << static_cast<int>(secs * 1000) << "ms) ";
    pass = pass && ok;
  }
  report(1, "feasibility contract", pass, detail.str());
}

// ---- criterion 2: analytic half-space oracle ------------------------------
void criterion_analytic(const Fixture& linlog) {
  Rng rng(1002);
  Mat init = random_init(rng, 10, 2, linlog.init_radius);
  WalkOptions walk;
  walk.beta = linlog.walk_beta;
  SampleSet set =
      run_sampler(linlog.problem, 500, init, linlog.schedule, walk, {}, rng);
  auto region = analytic_inverse_set_linear_logistic({1.0, 1.0}, 0.0,
                                                     band_new(0.6, 1.0));
  bool pass = set.samples.size() == 500;
  int violations = 0;
  for (const auto& rec : set.samples) {
    Vec x = linlog.problem.G().forward(rec.code);
    if (!region.contains(x, 1e-9)) ++violations;
  }
  pass = pass && violations == 0;
  std::ostringstream detail;
  detail << set.samples.size() << " samples, " << violations << " violations";
  report(2, "analytic half-space oracle", pass, detail.str());
}

// ---- criterion 3: gradient suite ------------------------------------------
void criterion_gradients(const std::vector<Fixture>& fixtures) {
  bool pass = true;
  double worst = 0.0;
  for (const auto& fx : fixtures) {
    Rng rng(1003);
    std::size_t d = fx.problem.code_dim();
    std::size_t p = fx.problem.constraint_count();
    for (int trial = 0; trial < 50; ++trial) {
      std::size_t K = 2 + trial % 3;
      AugLagState state;
      state.codes = rng.uniform_mat(K, d, -fx.init_radius, fx.init_radius);
      state.slacks = Mat(K, p);
      state.multipliers = Mat(K, p);
      state.mu = trial % 2 ? 10.0 : 100.0;
      for (auto& l : state.multipliers.data) l = rng.uniform(0.0, 3.0);
      slack_update(state, fx.problem);

      Mat grad(K, d);
      lagrangian_value_and_grad(state, fx.problem, grad);
      auto value_at = [&](const Vec& flat) {
        AugLagState probe = state;
        probe.codes.data = flat;
        return lagrangian_value(probe, fx.problem);
      };
      double err = testutil::max_grad_rel_err(
          grad.data, testutil::fd_grad(value_at, state.codes.data, 1e-5));
      worst = std::max(worst, err);

      // Walk objective gradient at a frozen-multiplier state.
      SeedResult seed;
      seed.seeds = state.codes;
      seed.lambda_star = state.multipliers;
      seed.mu_star = state.mu;
      WalkOptions wopts;
      WalkState wstate(fx.problem, seed, DiversityKind::encoded, wopts);
      walk_step(wstate, fx.problem, 1e-4);
      Mat wgrad = sample_objective_grad(wstate, fx.problem);
      auto wvalue_at = [&](const Vec& flat) {
        WalkState probe = wstate;
        probe.C.data = flat;
        return sample_objective_value(probe, fx.problem);
      };
      double werr = testutil::max_grad_rel_err(
          wgrad.data, testutil::fd_grad(wvalue_at, wstate.C.data, 1e-5));
      worst = std::max(worst, werr);
    }
  }
  pass = worst <= 1e-5;
  std::ostringstream detail;
  detail << "max rel err " << worst;
  report(3, "gradient suite", pass, detail.str());
}

// ---- criterion 4: slack optimality ----------------------------------------
void criterion_slack(const std::vector<Fixture>& fixtures) {
  Rng rng(1004);
  bool pass = true;
  long tested = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Fixture& fx = fixtures[trial % fixtures.size()];
    std::size_t d = fx.problem.code_dim();
    std::size_t p = fx.problem.constraint_count();
    std::size_t K = 1 + trial % 4;
    AugLagState state;
    state.codes = rng.uniform_mat(K, d, -fx.init_radius, fx.init_radius);
    state.slacks = Mat(K, p);
    state.multipliers = Mat(K, p);
    state.mu = std::pow(10.0, 1 + trial % 3);
    for (auto& l : state.multipliers.data) l = rng.uniform(0.0, 10.0);
    slack_update(state, fx.problem);
    double base = lagrangian_value(state, fx.problem);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t k = 0; k < p; ++k)
        for (double delta : {1e-4, -1e-4}) {
          AugLagState probe = state;
          probe.slacks(i, k) += delta;
          if (probe.slacks(i, k) < 0.0) continue;
          ++tested;
          if (lagrangian_value(probe, fx.problem) < base - 1e-12) pass = false;
        }
  }
  std::ostringstream detail;
  detail << tested << " perturbations";
  report(4, "slack optimality", pass, detail.str());
}

// ---- criterion 5: incremental vs full batch -------------------------------
void criterion_cost(const Fixture& mlp) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(1005);
  Mat init_all = random_init(rng, 60, mlp.problem.code_dim(), mlp.init_radius);
  Mat init_K(10, mlp.problem.code_dim());
  for (std::size_t i = 0; i < 10; ++i)
    std::copy(init_all.row(i).begin(), init_all.row(i).end(),
              init_K.row(i).begin());

  Rng rng_inc(1), rng_fb(1);
  WalkOptions walk;
  walk.beta = mlp.walk_beta;
  SampleSet incremental =
      run_sampler(mlp.problem, 60, init_K, mlp.schedule, walk, {}, rng_inc);
  SampleSet batch =
      full_batch_solve(mlp.problem, 60, init_all, mlp.schedule, {}, rng_fb);

  StepComparison cmp = step_accounting(
      {step_stats("incremental", incremental), step_stats("full_batch", batch)});
  double ratio = cmp.ratio_first_to_second.value_or(1e9);

  double d_inc =
      mean_pairwise_distance(sample_encodings(incremental, mlp.problem));
  double d_fb = mean_pairwise_distance(sample_encodings(batch, mlp.problem));
  double secs = elapsed_s(t0);

  bool pass = ratio <= 0.1 && d_inc >= 0.8 * d_fb && secs < 600.0;
  std::ostringstream detail;
  detail << "evals " << incremental.accounting.total_code_evals() << "/"
         << batch.accounting.total_code_evals() << " ratio=" << ratio
         << " diversity " << d_inc << " vs " << d_fb << " ("
         << static_cast<int>(secs) << "s)";
  report(5, "incremental vs full batch cost", pass, detail.str());
}

// ---- criterion 6: diversity objective vs feasibility-only ------------------
void criterion_shared_init(const std::vector<Fixture>& fixtures) {
  bool pass = true;
  std::ostringstream detail;
  for (const auto& fx : fixtures) {
    Rng rng1(1006), rng2(1006);
    Mat init1 = shared_init(rng1, 10, fx.problem.code_dim(), fx.init_radius);
    Mat init2 = shared_init(rng2, 10, fx.problem.code_dim(), fx.init_radius);
    WalkOptions walk;
    walk.beta = fx.walk_beta;
    SampleSet diverse =
        run_sampler(fx.problem, 60, init1, fx.schedule, walk, {}, rng1);
    SampleSet flat = ablate_feasibility_only(fx.problem, 60, init2, fx.schedule,
                                             walk, {}, rng2);
    double d_div = mean_pairwise_distance(sample_encodings(diverse, fx.problem));
    double d_flat = mean_pairwise_distance(sample_encodings(flat, fx.problem));
    bool ok = diverse.jitter_applied && d_div >= 1.2 * d_flat;
    detail << fx.name << "=" << d_div / std::max(d_flat, 1e-300) << "x ";
    pass = pass && ok;
  }
  report(6, "repulsion beats feasibility-only", pass, detail.str());
}

// ---- criterion 7: walk efficiency ------------------------------------------
void criterion_walk_budget(const std::vector<Fixture>& fixtures) {
  bool pass = true;
  std::ostringstream detail;
  for (const auto& fx : fixtures) {
    Rng rng(1007);
    Mat init = random_init(rng, 10, fx.problem.code_dim(), fx.init_radius);
    WalkOptions walk;
    walk.beta = fx.walk_beta;
    SampleSet set =
        run_sampler(fx.problem, 500, init, fx.schedule, walk, {}, rng);
    long steps = set.accounting.walk_steps;
    bool ok = set.samples.size() == 500 && steps >= 49 && steps <= 3 * 49;
    detail << fx.name << "=" << steps << " ";
    pass = pass && ok;
  }
  report(7, "walk completes near minimum steps", pass, detail.str());
}

// ---- criterion 8: coverage --------------------------------------------------
void criterion_coverage(const Fixture& annulus) {
  Rng rng(1008);
  Mat init = random_init(rng, 10, 2, annulus.init_radius);
  WalkOptions walk;
  walk.beta = annulus.walk_beta;
  SampleSet set =
      run_sampler(annulus.problem, 500, init, annulus.schedule, walk, {}, rng);

  std::array<double, 2> lo{-2.5, -2.5}, hi{2.5, 2.5};
  double last = -1.0;
  bool monotone = true;
  double final_ratio = 0.0;
  std::ostringstream detail;
  for (std::size_t count : {50u, 100u, 250u, 500u}) {
    SampleSet prefix = set;
    prefix.samples.assign(set.samples.begin(), set.samples.begin() + count);
    CoverageGrid grid = grid_coverage(prefix, annulus.problem, 50, lo, hi);
    monotone = monotone && grid.ratio >= last;
    last = grid.ratio;
    final_ratio = grid.ratio;
    detail << count << ":" << grid.ratio << " ";
  }
  bool pass = final_ratio >= 0.6 && monotone;
  report(8, "annulus coverage", pass, detail.str());
}

// ---- criterion 9: intersection ----------------------------------------------
void criterion_intersection(const Fixture& lens) {
  Rng rng(1009);
  Mat init = random_init(rng, 10, 2, lens.init_radius);
  WalkOptions walk;
  walk.beta = lens.walk_beta;
  SampleSet set = run_sampler(lens.problem, 100, init, lens.schedule, walk, {}, rng);
  int bad = 0;
  for (const auto& rec : set.samples) {
    auto verdict = is_feasible(lens.problem, rec.code);
    if (!(verdict.per_constraint[0] && verdict.per_constraint[1])) ++bad;
  }
  bool pass = set.samples.size() == 100 && bad == 0;
  std::ostringstream detail;
  detail << set.samples.size() << " samples, " << bad << " outside";
  report(9, "intersection of two bands", pass, detail.str());
}

// ---- criterion 10: reproducibility ------------------------------------------
void criterion_reproducibility() {
  fs::path tmp = fs::temp_directory_path() / "ivs_acceptance_repro";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  std::ostringstream os;
  os << "[problem]\n"
     << "G = " << fixture("models/identity_2d.model") << "\n"
     << "E = " << fixture("models/identity_2d.model") << "\n"
     << "constraint1 = " << fixture("models/neg_quadratic_2d.model") << " -4 -1\n"
     << "feasibility_mode = strict_two_sided\n"
     << "[run]\nalgorithm = sample\nK = 10\nn = 100\nrng_seed = 77\n"
     << "init_radius = 1.6\nbeta = 0.002\noutput_dir = unused\n"
     << "[schedule]\nstep_length_beta = 0.002\n"
     << "[metrics]\ncoverage_resolution = 50\ncoverage_lo = -2.5 -2.5\n"
     << "coverage_hi = 2.5 2.5\n";
  std::ofstream(tmp / "exp.ini") << os.str();

  std::string out1 = (tmp / "out1").string(), out2 = (tmp / "out2").string();
  setenv("INVERSESET_OUTPUT_DIR", out1.c_str(), 1);
  int c1 = run_experiment((tmp / "exp.ini").string());
  setenv("INVERSESET_OUTPUT_DIR", out2.c_str(), 1);
  int c2 = run_experiment((tmp / "exp.ini").string());
  unsetenv("INVERSESET_OUTPUT_DIR");

  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  bool pass = c1 == 0 && c2 == 0;
  int mismatches = 0;
  for (const char* name : {"samples.csv", "trace.csv", "metadata.json",
                           "metrics.json", "feasible_cells.pgm",
                           "covered_cells.pgm"}) {
    if (read(fs::path(out1) / name) != read(fs::path(out2) / name))
      ++mismatches;
  }
  // The SVG render must be deterministic too.
  emit_plot(out1, (tmp / "p1.svg").string());
  emit_plot(out2, (tmp / "p2.svg").string());
  if (read(tmp / "p1.svg") != read(tmp / "p2.svg")) ++mismatches;
  pass = pass && mismatches == 0;
  std::ostringstream detail;
  detail << mismatches << " artifact mismatches";
  report(10, "byte-identical artifacts", pass, detail.str());
  fs::remove_all(tmp);
}

}  // namespace

int main() {
  auto fixtures = make_fixtures();
  criterion_feasibility(fixtures);
  criterion_analytic(fixtures[0]);
  criterion_gradients(fixtures);
  criterion_slack(fixtures);
  criterion_cost(fixtures[2]);
  criterion_shared_init(fixtures);
  criterion_walk_budget(fixtures);
  criterion_coverage(fixtures[1]);
  criterion_intersection(fixtures[3]);
  criterion_reproducibility();

  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
