// Command-line front end for the inverseset shared library. Talks to the
// core exclusively through the C API in inverseset.h.

#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "inverseset.h"

namespace {

// splitmix64; probe points for check-model only.
struct ProbeRng {
  std::uint64_t state;
  explicit ProbeRng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

int fail(ivs_status status) {
  std::fprintf(stderr, "error: %s [%s]\n", ivs_last_error(),
               ivs_status_name(status));
  return ivs_exit_code(status);
}

int cmd_run(const std::vector<std::string>& configs, int jobs, bool verbose) {
  if (jobs < 1) jobs = 1;
  std::atomic<std::size_t> cursor{0};
  std::atomic<int> worst{0};

  auto worker = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= configs.size()) return;
      ivs_status status = ivs_run_experiment(configs[i].c_str(), verbose ? 1 : 0);
      int code = ivs_exit_code(status);
      if (status != IVS_OK)
        std::fprintf(stderr, "%s: %s [%s]\n", configs[i].c_str(),
                     ivs_last_error(), ivs_status_name(status));
      int prev = worst.load();
      while (code > prev && !worst.compare_exchange_weak(prev, code)) {
      }
    }
  };

  if (jobs == 1 || configs.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    int count = std::min<int>(jobs, static_cast<int>(configs.size()));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return worst.load();
}

int cmd_plot(const std::string& run_dir, std::string out) {
  if (out.empty()) out = run_dir + "/plot.svg";
  ivs_status status = ivs_emit_plot(run_dir.c_str(), out.c_str());
  if (status != IVS_OK) return fail(status);
  std::printf("%s\n", out.c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& dirs) {
  std::vector<const char*> ptrs;
  for (const auto& d : dirs) ptrs.push_back(d.c_str());
  char* report = nullptr;
  ivs_status status = ivs_compare_runs(ptrs.data(), ptrs.size(), &report);
  if (status != IVS_OK) return fail(status);
  std::fputs(report, stdout);
  ivs_string_free(report);
  return 0;
}

int cmd_check_model(const std::string& path, int probes, double h, double tol,
                    double radius, std::uint64_t seed, bool verbose) {
  ivs_model* model = nullptr;
  ivs_status status = ivs_model_load(path.c_str(), &model);
  if (status != IVS_OK) return fail(status);

  std::size_t dim = ivs_model_input_dim(model);
  std::printf("%s: kind=%s %zu -> %zu\n", path.c_str(), ivs_model_kind(model),
              dim, ivs_model_output_dim(model));

  ProbeRng rng(seed);
  std::vector<double> x(dim);
  double worst = 0.0;
  int flagged = 0;
  bool ok = true;
  for (int p = 0; p < probes; ++p) {
    for (auto& v : x) v = rng.uniform(-radius, radius);
    ivs_grad_check_report report;
    status = ivs_model_grad_check(model, x.data(), x.size(), h, tol, &report);
    if (status != IVS_OK) {
      ivs_model_free(model);
      return fail(status);
    }
    if (report.nondifferentiable) {
      ++flagged;  // kink within the probe step; excluded from the verdict
      continue;
    }
    worst = std::max(worst, report.max_rel_error);
    if (report.max_rel_error > tol) {
      ok = false;
      if (verbose)
        std::printf("probe %d: max_rel_error=%.3e at coordinate %zu\n", p,
                    report.max_rel_error, report.worst_coordinate);
    }
  }
  ivs_model_free(model);
  std::printf("%d probes (h=%g): max_rel_error=%.3e, kink-flagged=%d -> %s\n",
              probes, h, worst, flagged, ok ? "OK" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("inverse-set sampling toolkit (") + ivs_version() +
               ")"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("--verbose", verbose, "chatty diagnostics on stderr");

  auto* run = app.add_subcommand("run", "run experiment config files");
  std::vector<std::string> configs;
  int jobs = 1;
  run->add_option("configs", configs, "experiment config files")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "run configs in parallel")->default_val(1);

  auto* plot = app.add_subcommand("plot", "render a run directory as SVG");
  std::string run_dir, plot_out;
  plot->add_option("run_dir", run_dir, "completed run directory")->required();
  plot->add_option("--out", plot_out, "output SVG path (default <run_dir>/plot.svg)");

  auto* compare = app.add_subcommand("compare", "compare completed runs");
  std::vector<std::string> dirs;
  compare->add_option("run_dirs", dirs, "two or more run directories")
      ->required()
      ->expected(-2);

  auto* check = app.add_subcommand("check-model", "finite-difference gradient check");
  std::string model_path;
  int probes = 100;
  double h = 1e-5, tol = 1e-5, radius = 2.0;
  std::uint64_t seed = 7;
  check->add_option("model", model_path, "model file")->required();
  check->add_option("--probes", probes, "number of random probe points");
  check->add_option("--h", h, "finite-difference step");
  check->add_option("--tol", tol, "relative-error tolerance");
  check->add_option("--radius", radius, "probe box half-width");
  check->add_option("--seed", seed, "probe RNG seed");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(configs, jobs, verbose);
  if (*plot) return cmd_plot(run_dir, plot_out);
  if (*compare) return cmd_compare(dirs);
  if (*check)
    return cmd_check_model(model_path, probes, h, tol, radius, seed, verbose);
  return 1;
}
