#include "inverseset/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "inverseset/metrics.hpp"
#include "inverseset/version.hpp"
#include <json.hpp>

namespace inverseset {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::max_outer_iterations:
    case Errc::walk_budget_exhausted:
      return 2;
    default:
      return 1;
  }
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string version_line(const std::string& config_hash) {
  return std::string("# ") + kToolVersion + " config=" + config_hash;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (double v : m.row(i)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io_error, "cannot write " + path);
  out << content;
  require(out.good(), Errc::io_error, "write failed for " + path);
}

std::string read_file(const std::string& path, Errc missing = Errc::io_error) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), missing, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string samples_csv(const SampleSet& set, std::size_t code_dim,
                        std::size_t p, const std::string& config_hash) {
  std::ostringstream os;
  os << version_line(config_hash) << "\n";
  os << "index,acceptance_step";
  for (std::size_t t = 0; t < code_dim; ++t) os << ",code_" << t;
  for (std::size_t k = 0; k < p; ++k) os << ",activation_" << k;
  os << "\n";
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto& rec = set.samples[i];
    os << i << ',' << rec.step_index;
    for (double v : rec.code) os << ',' << fmt(v);
    for (double v : rec.activations) os << ',' << fmt(v);
    os << "\n";
  }
  return os.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace, std::size_t p,
                      const std::string& config_hash) {
  std::ostringstream os;
  os << version_line(config_hash) << "\n";
  os << "outer_iter,inner_step,mu,objective";
  for (std::size_t k = 0; k < p; ++k) os << ",min_activation_" << k;
  os << ",feasible_count,cumulative_grad_steps\n";
  for (const auto& row : trace) {
    os << row.outer_iter << ',' << row.inner_step << ',' << fmt(row.mu) << ','
       << fmt(row.objective);
    for (double v : row.min_activation) os << ',' << fmt(v);
    os << ',' << row.feasible_count << ',' << row.cumulative_grad_steps << "\n";
  }
  return os.str();
}

json steps_json(const RunAccounting& acct) {
  return json{{"seed_batch_steps", acct.seed_batch_steps},
              {"seed_code_evals", acct.seed_code_evals},
              {"seed_outer_iters", acct.seed_outer_iters},
              {"walk_steps", acct.walk_steps},
              {"walk_code_evals", acct.walk_code_evals},
              {"total_code_evals", acct.total_code_evals()}};
}

json config_json(const ExperimentConfig& cfg) {
  json constraints = json::array();
  for (const auto& cc : cfg.problem.constraints)
    constraints.push_back({{"f", cc.f_path}, {"z1", cc.z1}, {"z2", cc.z2}});
  json j;
  j["problem"] = {{"G", cfg.problem.g_path},
                  {"E", cfg.problem.e_path},
                  {"constraints", constraints},
                  {"feasibility_mode", feasibility_mode_name(cfg.problem.mode)}};
  j["run"] = {{"algorithm", algorithm_name(cfg.algorithm)},
              {"K", cfg.K},
              {"n", cfg.n},
              {"rng_seed", cfg.rng_seed},
              {"init", cfg.init == InitKind::random ? "random" : "shared"},
              {"init_radius", cfg.init_radius},
              {"beta", cfg.walk.beta},
              {"max_walk_steps", cfg.walk.max_walk_steps},
              {"repulse_history", cfg.walk.repulse_history ? "all" : "last"},
              {"duplicate_eps", cfg.walk.duplicate_eps}};
  j["schedule"] = {{"mu0", cfg.schedule.mu0},
                   {"alpha", cfg.schedule.alpha},
                   {"inner_steps", cfg.schedule.inner_steps},
                   {"step_length_beta", cfg.schedule.step_length_beta},
                   {"max_outer_iters", cfg.schedule.max_outer_iters}};
  j["options"] = {
      {"multiplier_residual_with_slack", cfg.options.multiplier_residual_with_slack},
      {"symmetry_jitter", cfg.options.symmetry_jitter == -1
                              ? "auto"
                              : (cfg.options.symmetry_jitter ? "on" : "off")},
      {"jitter_magnitude", cfg.options.jitter_magnitude}};
  j["metrics"] = {{"coverage_resolution", cfg.coverage_resolution},
                  {"coverage_lo", cfg.coverage_lo},
                  {"coverage_hi", cfg.coverage_hi}};
  if (cfg.algorithm == Algorithm::maximize)
    j["maximize"] = {{"steps", cfg.maximize_steps},
                     {"regularizer_weight", cfg.maximize_regularizer}};
  if (!cfg.plot_coords.empty()) j["plot"] = {{"coords", cfg.plot_coords}};
  return j;
}

struct RunOutput {
  SampleSet set;
  std::string status = "ok";
  std::optional<MaximizeResult> maximize;
};

RunOutput dispatch(const ExperimentConfig& cfg, const InverseSetProblem& problem) {
  Rng rng(cfg.rng_seed);
  RunOutput out;

  if (cfg.algorithm == Algorithm::maximize) {
    Vec init = rng.uniform_vec(problem.code_dim(), -cfg.init_radius,
                               cfg.init_radius);
    out.maximize = maximize_activation(problem, init, cfg.maximize_steps,
                                       cfg.walk.beta, cfg.maximize_regularizer);
    SampleRecord rec;
    rec.code = out.maximize->code;
    Vec x = problem.G().forward(rec.code);
    rec.activations = {problem.constraints()[0].f.forward(x)[0]};
    rec.step_index = cfg.maximize_steps;
    out.set.samples.push_back(std::move(rec));
    out.set.requested_n = 1;
    out.set.K = 1;
    out.set.mode = problem.mode();
    out.set.schedule = cfg.schedule;
    return out;
  }

  std::size_t rows = cfg.algorithm == Algorithm::full_batch ? cfg.n : cfg.K;
  Mat init = cfg.init == InitKind::shared
                 ? shared_init(rng, rows, problem.code_dim(), cfg.init_radius)
                 : random_init(rng, rows, problem.code_dim(), cfg.init_radius);

  switch (cfg.algorithm) {
    case Algorithm::sample:
      out.set = run_sampler(problem, cfg.n, init, cfg.schedule, cfg.walk,
                            cfg.options, rng);
      break;
    case Algorithm::full_batch:
      out.set = full_batch_solve(problem, cfg.n, init, cfg.schedule, cfg.options,
                                 rng);
      break;
    case Algorithm::ablate_codespace:
      out.set = ablate_code_space(problem, cfg.n, init, cfg.schedule, cfg.walk,
                                  cfg.options, rng);
      break;
    case Algorithm::ablate_feasibility:
      out.set = ablate_feasibility_only(problem, cfg.n, init, cfg.schedule,
                                        cfg.walk, cfg.options, rng);
      break;
    case Algorithm::maximize:
      break;  // handled above
  }
  return out;
}

json metrics_json_for(const RunOutput& out, const ExperimentConfig& cfg,
                      const InverseSetProblem& problem,
                      const std::string& out_dir) {
  json m;
  m["tool_version"] = kToolVersion;
  m["config_hash"] = fnv1a_hex(cfg.config_text);
  m["status"] = out.status;
  m["steps"] = steps_json(out.set.accounting);
  m["samples"] = out.set.samples.size();

  const auto& set = out.set;
  if (!set.samples.empty()) {
    m["feasibility_rate"] = {
        {"run_mode", feasibility_rate(set, problem, problem.mode())},
        {"strict_two_sided",
         feasibility_rate(set, problem, FeasibilityMode::strict_two_sided)}};
    m["max_abs_code"] = max_abs_code(set);
  }
  if (set.samples.size() >= 2) {
    m["mean_pairwise_distance"] = {
        {"code_space", mean_pairwise_distance(sample_codes(set))},
        {"encoding_space",
         mean_pairwise_distance(sample_encodings(set, problem))}};
  }
  if (problem.code_dim() == 2 && !set.samples.empty()) {
    CoverageGrid grid = grid_coverage(set, problem, cfg.coverage_resolution,
                                      cfg.coverage_lo, cfg.coverage_hi);
    m["coverage"] = {{"resolution", grid.resolution},
                     {"lo", grid.lo},
                     {"hi", grid.hi},
                     {"feasible_cells", grid.feasible_cells},
                     {"covered_cells", grid.covered_cells},
                     {"ratio", grid.ratio}};
    write_pgm(grid.feasible, grid.resolution,
              (fs::path(out_dir) / "feasible_cells.pgm").string());
    write_pgm(grid.covered, grid.resolution,
              (fs::path(out_dir) / "covered_cells.pgm").string());
  } else if (set.samples.size() >= 2) {
    Vec qs = {0.25, 0.5, 0.75, 0.9};
    Vec vals = nearest_neighbor_distance_quantiles(sample_codes(set), qs);
    m["nn_distance_quantiles"] = {
        {"q25", vals[0]}, {"q50", vals[1]}, {"q75", vals[2]}, {"q90", vals[3]}};
  }
  return m;
}

void write_artifacts(const RunOutput& out, const ExperimentConfig& cfg,
                     const InverseSetProblem& problem,
                     const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::string hash = fnv1a_hex(cfg.config_text);
  std::size_t p = problem.constraint_count();

  write_file((fs::path(out_dir) / "samples.csv").string(),
             samples_csv(out.set, problem.code_dim(), p, hash));
  write_file((fs::path(out_dir) / "trace.csv").string(),
             trace_csv(out.set.seed_trace, p, hash));

  json meta;
  meta["tool_version"] = kToolVersion;
  meta["config_hash"] = hash;
  meta["fingerprint"] = problem_fingerprint(cfg.problem);
  meta["config"] = config_json(cfg);
  meta["rng_algorithm"] = Rng::kAlgorithm;
  meta["status"] = out.status;
  meta["diversity"] = diversity_kind_name(out.set.diversity);
  meta["jitter_applied"] = out.set.jitter_applied;
  meta["samples_written"] = out.set.samples.size();
  meta["steps"] = steps_json(out.set.accounting);
  meta["seed_codes"] = mat_to_json(out.set.seed_codes);
  meta["lambda_star"] = mat_to_json(out.set.lambda_star);
  meta["mu_star"] = out.set.mu_star;
  json dups = json::array();
  for (std::size_t i = 0; i < out.set.samples.size(); ++i)
    if (out.set.samples[i].duplicate) dups.push_back(i);
  meta["duplicate_samples"] = dups;
  if (out.maximize) {
    meta["maximize"] = {
        {"final_activation", out.maximize->activation_history.empty()
                                 ? json()
                                 : json(out.maximize->activation_history.back())},
        {"activation_history", out.maximize->activation_history}};
  }
  write_file((fs::path(out_dir) / "metadata.json").string(),
             meta.dump(2) + "\n");

  json metrics = metrics_json_for(out, cfg, problem, out_dir);
  write_file((fs::path(out_dir) / "metrics.json").string(),
             metrics.dump(2) + "\n");
}

std::string resolve_output_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("INVERSESET_OUTPUT_DIR"); env && *env)
    return env;
  require(!cfg.output_dir.empty(), Errc::config_invalid,
          "run.output_dir missing (and INVERSESET_OUTPUT_DIR unset)");
  return cfg.output_dir;
}

}  // namespace

int run_experiment(const std::string& config_path, bool verbose) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s [%s]\n", e.what(), errc_name(e.code()));
    return 1;
  }

  try {
    InverseSetProblem problem = build_problem(cfg.problem);
    std::string out_dir = resolve_output_dir(cfg);
    if (verbose)
      std::fprintf(stderr, "running %s: n=%zu K=%zu -> %s\n",
                   algorithm_name(cfg.algorithm), cfg.n, cfg.K, out_dir.c_str());

    RunOutput out;
    int code = 0;
    try {
      out = dispatch(cfg, problem);
    } catch (const WalkBudgetExhausted& e) {
      out.set = e.partial;
      out.status = "walk_budget_exhausted";
      code = 2;
      std::fprintf(stderr, "warning: %s\n", e.what());
    } catch (const MaxOuterIterationsExceeded& e) {
      out.set.seed_codes = e.best_so_far.seeds;
      out.set.lambda_star = e.best_so_far.lambda_star;
      out.set.mu_star = e.best_so_far.mu_star;
      out.set.seed_trace = e.best_so_far.trace;
      out.set.accounting.seed_batch_steps = e.best_so_far.total_grad_steps;
      out.set.accounting.seed_code_evals = e.best_so_far.total_code_evals;
      out.set.accounting.seed_outer_iters = e.best_so_far.outer_iters_used;
      out.set.jitter_applied = e.best_so_far.jitter_applied;
      out.set.mode = problem.mode();
      out.status = "max_outer_iterations";
      code = 2;
      std::fprintf(stderr, "warning: %s\n", e.what());
    }
    write_artifacts(out, cfg, problem, out_dir);
    if (verbose)
      std::fprintf(stderr, "wrote %zu samples (%s)\n", out.set.samples.size(),
                   out.status.c_str());
    return code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s [%s]\n", e.what(), errc_name(e.code()));
    return exit_code_for(e.code()) == 2 ? 2 : 1;
  }
}

// ---------------------------------------------------------------------------
// Plot
// ---------------------------------------------------------------------------

namespace {

struct LoadedRun {
  json meta;
  json metrics;
  std::vector<Vec> codes;
  std::vector<int> steps;
  ExperimentConfig cfg;  // reconstructed problem block only
};

LoadedRun load_run(const std::string& run_dir) {
  LoadedRun run;
  run.meta = json::parse(read_file(
      (fs::path(run_dir) / "metadata.json").string(), Errc::missing_artifacts));
  run.metrics = json::parse(read_file(
      (fs::path(run_dir) / "metrics.json").string(), Errc::missing_artifacts));

  std::string csv = read_file((fs::path(run_dir) / "samples.csv").string(),
                              Errc::missing_artifacts);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // version line
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    const json& cc = run.meta["config"]["problem"]["constraints"];
    std::size_t p = cc.size();
    require(cells.size() >= 2 + p, Errc::missing_artifacts,
            run_dir + ": malformed samples.csv row");
    std::size_t d = cells.size() - 2 - p;
    Vec code(d);
    for (std::size_t t = 0; t < d; ++t) code[t] = std::stod(cells[2 + t]);
    run.codes.push_back(std::move(code));
    run.steps.push_back(std::stoi(cells[1]));
  }

  const json& pj = run.meta["config"]["problem"];
  run.cfg.problem.g_path = pj["G"].get<std::string>();
  run.cfg.problem.e_path = pj["E"].get<std::string>();
  for (const auto& c : pj["constraints"])
    run.cfg.problem.constraints.push_back({c["f"].get<std::string>(),
                                           c["z1"].get<double>(),
                                           c["z2"].get<double>()});
  run.cfg.problem.mode =
      parse_feasibility_mode(pj["feasibility_mode"].get<std::string>());
  const json& mj = run.meta["config"]["metrics"];
  run.cfg.coverage_resolution = mj["coverage_resolution"].get<int>();
  run.cfg.coverage_lo = {mj["coverage_lo"][0].get<double>(),
                         mj["coverage_lo"][1].get<double>()};
  run.cfg.coverage_hi = {mj["coverage_hi"][0].get<double>(),
                         mj["coverage_hi"][1].get<double>()};
  if (run.meta["config"].contains("plot"))
    for (const auto& c : run.meta["config"]["plot"]["coords"])
      run.cfg.plot_coords.push_back(c.get<std::size_t>());
  return run;
}

std::string step_color(int step, int max_step) {
  double t = max_step > 0 ? static_cast<double>(step) / max_step : 0.0;
  auto lerp = [&](int a, int b) {
    return static_cast<int>(std::lround(a + t * (b - a)));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", lerp(0x1f, 0xd6),
                lerp(0x77, 0x27), lerp(0xb4, 0x28));
  return buf;
}

}  // namespace

void emit_plot(const std::string& run_dir, const std::string& out_svg) {
  LoadedRun run = load_run(run_dir);
  InverseSetProblem problem = build_problem(run.cfg.problem);

  bool native2d = problem.code_dim() == 2;
  require(native2d || run.cfg.plot_coords.size() == 2,
          Errc::unsupported_dimension,
          "plot: codes are " + std::to_string(problem.code_dim()) +
              "-dimensional and no plot.coords projection is configured");

  // Points to draw: raw codes in 2-d, otherwise two encoding coordinates.
  std::vector<std::array<double, 2>> pts;
  pts.reserve(run.codes.size());
  for (const auto& code : run.codes) {
    if (native2d) {
      pts.push_back({code[0], code[1]});
    } else {
      Vec enc = problem.E().forward(problem.G().forward(code));
      for (std::size_t c : run.cfg.plot_coords)
        require(c < enc.size(), Errc::unsupported_dimension,
                "plot: projection coordinate out of range");
      pts.push_back({enc[run.cfg.plot_coords[0]], enc[run.cfg.plot_coords[1]]});
    }
  }

  std::array<double, 2> lo{}, hi{};
  if (native2d) {
    lo = run.cfg.coverage_lo;
    hi = run.cfg.coverage_hi;
  } else {
    lo = {1e300, 1e300};
    hi = {-1e300, -1e300};
    for (const auto& p : pts)
      for (int a = 0; a < 2; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    for (int a = 0; a < 2; ++a) {
      if (pts.empty()) {
        lo[a] = 0;
        hi[a] = 1;
      }
      double pad = 0.05 * (hi[a] - lo[a] > 0 ? hi[a] - lo[a] : 1.0);
      lo[a] -= pad;
      hi[a] += pad;
    }
  }

  const double canvas = 800, margin = 70;
  const double area = canvas - 2 * margin;
  auto px = [&](double x) { return margin + (x - lo[0]) / (hi[0] - lo[0]) * area; };
  auto py = [&](double y) { return margin + (hi[1] - y) / (hi[1] - lo[1]) * area; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
        "viewBox=\"0 0 800 800\">\n";
  os << "<!-- " << kToolVersion
     << " config=" << run.meta["config_hash"].get<std::string>() << " -->\n";
  os << "<rect width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n";

  if (native2d) {
    int res = std::max(run.cfg.coverage_resolution, 100);
    double wx = (hi[0] - lo[0]) / res, wy = (hi[1] - lo[1]) / res;
    os << "<g id=\"region\" fill=\"#cfe3f5\">\n";
    for (int iy = 0; iy < res; ++iy)
      for (int ix = 0; ix < res; ++ix) {
        Vec center = {lo[0] + (ix + 0.5) * wx, lo[1] + (iy + 0.5) * wy};
        if (!is_feasible(problem, center).all_feasible) continue;
        double x0 = px(lo[0] + ix * wx);
        double y0 = py(lo[1] + (iy + 1) * wy);
        os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\""
           << fmt(area / res) << "\" height=\"" << fmt(area / res) << "\"/>\n";
      }
    os << "</g>\n";
  }

  int max_step = 0;
  for (int s : run.steps) max_step = std::max(max_step, s);
  os << "<g id=\"samples\">\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i][0] < lo[0] || pts[i][0] > hi[0] || pts[i][1] < lo[1] ||
        pts[i][1] > hi[1])
      continue;
    os << "<circle cx=\"" << fmt(px(pts[i][0])) << "\" cy=\""
       << fmt(py(pts[i][1])) << "\" r=\"3\" fill=\""
       << step_color(run.steps[i], max_step) << "\"/>\n";
  }
  os << "</g>\n";

  os << "<rect x=\"" << fmt(margin) << "\" y=\"" << fmt(margin) << "\" width=\""
     << fmt(area) << "\" height=\"" << fmt(area)
     << "\" fill=\"none\" stroke=\"#444444\"/>\n";

  os << "<g id=\"legend\" font-family=\"monospace\" font-size=\"14\" "
        "fill=\"#222222\">\n";
  double ty = 24;
  for (std::size_t k = 0; k < run.cfg.problem.constraints.size(); ++k) {
    const auto& cc = run.cfg.problem.constraints[k];
    os << "<text x=\"" << fmt(margin) << "\" y=\"" << fmt(ty) << "\">band "
       << (k + 1) << ": [" << fmt(cc.z1) << ", " << fmt(cc.z2) << "]</text>\n";
    ty += 18;
  }
  os << "<text x=\"" << fmt(margin) << "\" y=\"" << fmt(ty) << "\">mode: "
     << feasibility_mode_name(run.cfg.problem.mode) << ", samples: " << pts.size()
     << "</text>\n";
  os << "<text x=\"" << fmt(margin) << "\" y=\"" << fmt(canvas - 28) << "\">x: ["
     << fmt(lo[0]) << ", " << fmt(hi[0]) << "]  y: [" << fmt(lo[1]) << ", "
     << fmt(hi[1]) << "]</text>\n";
  os << "</g>\n</svg>\n";

  write_file(out_svg, os.str());
}

// ---------------------------------------------------------------------------
// Compare
// ---------------------------------------------------------------------------

std::string compare_runs(const std::vector<std::string>& run_dirs) {
  require(run_dirs.size() >= 2, Errc::invalid_argument,
          "compare: need at least two run directories");

  std::vector<LoadedRun> runs;
  for (const auto& dir : run_dirs) runs.push_back(load_run(dir));

  std::string fingerprint = runs[0].meta["fingerprint"].get<std::string>();
  for (std::size_t i = 1; i < runs.size(); ++i)
    require(runs[i].meta["fingerprint"].get<std::string>() == fingerprint,
            Errc::fingerprint_mismatch,
            "compare: " + run_dirs[i] + " was produced on a different problem (" +
                runs[i].meta["fingerprint"].get<std::string>() + " vs " +
                fingerprint + ")");

  json report;
  report["tool_version"] = kToolVersion;
  report["fingerprint"] = fingerprint;
  json table = json::array();
  std::vector<double> diversity(runs.size(), 0.0);
  std::vector<long> evals(runs.size(), 0);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    json row;
    row["dir"] = run_dirs[i];
    row["algorithm"] = r.meta["config"]["run"]["algorithm"];
    row["status"] = r.meta["status"];
    row["samples"] = r.metrics["samples"];
    row["steps"] = r.metrics["steps"];
    evals[i] = r.metrics["steps"]["total_code_evals"].get<long>();
    if (r.metrics.contains("mean_pairwise_distance")) {
      row["mean_pairwise_distance"] = r.metrics["mean_pairwise_distance"];
      diversity[i] =
          r.metrics["mean_pairwise_distance"]["encoding_space"].get<double>();
    }
    if (r.metrics.contains("coverage"))
      row["coverage_ratio"] = r.metrics["coverage"]["ratio"];
    table.push_back(std::move(row));
  }
  report["runs"] = table;

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (diversity[i] > diversity[best]) best = i;
  report["most_diverse"] = run_dirs[best];
  report["diversity_encoding_space"] = diversity;

  if (evals[1] > 0) {
    double ratio = static_cast<double>(evals[0]) / static_cast<double>(evals[1]);
    report["grad_eval_ratio_first_to_second"] = ratio;
    report["assertions"] = {
        {"first_run_cheaper_10x", ratio <= 0.1},
        {"first_run_more_diverse", diversity[0] > diversity[1]}};
  }
  return report.dump(2) + "\n";
}

}  // namespace inverseset
