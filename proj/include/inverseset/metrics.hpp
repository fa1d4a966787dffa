#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inverseset/problem.hpp"
#include "inverseset/sampler.hpp"
#include "inverseset/types.hpp"

namespace inverseset {

/// Mean of ||v_i - v_j|| over the m(m-1)/2 unordered pairs. Plain
/// distances, not squared: the evaluation convention is kept distinct
/// from the squared-distance optimization objective.
double mean_pairwise_distance(const std::vector<Vec>& vectors);

/// Fraction of samples passing is_feasible under the given mode,
/// re-evaluated from the stored codes.
double feasibility_rate(const SampleSet& set, const InverseSetProblem& problem,
                        FeasibilityMode mode);

/// Brute-force coverage oracle for 2-d code spaces. Feasible cells are
/// classified by evaluating every constraint at the cell center in the
/// problem's own mode; a feasible cell is covered when at least one
/// sample code falls inside it.
struct CoverageGrid {
  int resolution = 0;  // cells per axis
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  std::vector<std::uint8_t> feasible;  // row-major, index iy * resolution + ix
  std::vector<std::uint8_t> covered;   // covered *feasible* cells
  long feasible_cells = 0;
  long covered_cells = 0;
  double ratio = 0.0;
};

CoverageGrid grid_coverage(const SampleSet& set, const InverseSetProblem& problem,
                           int resolution, std::array<double, 2> lo,
                           std::array<double, 2> hi);

/// Gradient-step bookkeeping for cost comparisons between runs. The cost
/// measure is per-code gradient evaluations: one gradient-descent
/// iteration of a batch of K codes costs K.
struct RunStepStats {
  std::string label;
  long grad_evals = 0;
  long batch_steps = 0;
  long walk_steps = 0;
  long accepted = 0;
};

RunStepStats step_stats(const std::string& label, const SampleSet& set);

struct StepComparison {
  std::vector<RunStepStats> runs;
  std::vector<double> evals_per_sample;       // aligned with runs
  std::optional<double> ratio_first_to_second;  // grad_evals[0]/grad_evals[1]
};

StepComparison step_accounting(const std::vector<RunStepStats>& runs);

/// Spread statistic for code dimensions where the grid oracle does not
/// apply: quantiles of each sample's distance to its nearest other
/// sample.
Vec nearest_neighbor_distance_quantiles(const std::vector<Vec>& points,
                                        const Vec& quantiles);

/// P2 (ASCII) graymap of a cell mask, for visual inspection.
void write_pgm(const std::vector<std::uint8_t>& mask, int resolution,
               const std::string& path);

std::vector<Vec> sample_codes(const SampleSet& set);
std::vector<Vec> sample_encodings(const SampleSet& set,
                                  const InverseSetProblem& problem);
double max_abs_code(const SampleSet& set);

}  // namespace inverseset
