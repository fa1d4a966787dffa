#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "inverseset/auglag.hpp"
#include "inverseset/problem.hpp"
#include "inverseset/sampler.hpp"

namespace inverseset {

enum class Algorithm {
  sample,
  full_batch,
  ablate_codespace,
  ablate_feasibility,
  maximize,
};

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct ConstraintConfig {
  std::string f_path;  // resolved against the config file directory
  double z1 = 0.0;
  double z2 = 0.0;
};

struct ProblemConfig {
  std::string g_path;
  std::string e_path;
  std::vector<ConstraintConfig> constraints;
  FeasibilityMode mode = FeasibilityMode::paper_one_sided;
};

enum class InitKind { random, shared };

/// Everything a run needs, parsed from the flat section/key = value
/// experiment file (grammar in the README). Model paths are resolved
/// relative to the config file location.
struct ExperimentConfig {
  ProblemConfig problem;
  Algorithm algorithm = Algorithm::sample;
  std::size_t K = 10;
  std::size_t n = 100;
  std::uint64_t rng_seed = 1;
  InitKind init = InitKind::random;
  double init_radius = 1.0;
  AugLagSchedule schedule;
  AugLagOptions options;
  WalkOptions walk;
  int maximize_steps = 200;
  double maximize_regularizer = 1e-3;
  std::string output_dir;
  int coverage_resolution = 50;
  std::array<double, 2> coverage_lo{-4.0, -4.0};
  std::array<double, 2> coverage_hi{4.0, 4.0};
  std::vector<std::size_t> plot_coords;  // empty: plot raw 2-d codes only

  std::string config_text;  // raw file bytes, hashed into every artifact
  std::string config_dir;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& dir,
                              const std::string& origin);

/// Loads the models referenced by the config and assembles the problem.
InverseSetProblem build_problem(const ProblemConfig& config);

/// FNV-1a 64-bit hex digest.
std::string fnv1a_hex(const std::string& bytes);

/// Digest of the problem identity: model file bytes, bands and mode.
/// Runs on the same problem share it regardless of algorithm settings.
std::string problem_fingerprint(const ProblemConfig& config);

}  // namespace inverseset
