#include "inverseset/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace inverseset {

double mean_pairwise_distance(const std::vector<Vec>& vectors) {
  require(vectors.size() >= 2, Errc::too_few_samples,
          "mean_pairwise_distance: need at least two vectors");
  double total = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t t = 0; t < vectors[i].size(); ++t) {
        double diff = vectors[i][t] - vectors[j][t];
        d2 += diff * diff;
      }
      total += std::sqrt(d2);
    }
  double pairs = 0.5 * static_cast<double>(vectors.size()) *
                 static_cast<double>(vectors.size() - 1);
  return total / pairs;
}

double feasibility_rate(const SampleSet& set, const InverseSetProblem& problem,
                        FeasibilityMode mode) {
  require(!set.samples.empty(), Errc::empty_set,
          "feasibility_rate: empty sample set");
  // Re-evaluate through a problem in the requested mode; cached
  // activations are deliberately not trusted here.
  InverseSetProblem check(problem.G(), problem.E(), problem.constraints(), mode);
  long ok = 0;
  for (const auto& rec : set.samples)
    if (is_feasible(check, rec.code).all_feasible) ++ok;
  return static_cast<double>(ok) / static_cast<double>(set.samples.size());
}

CoverageGrid grid_coverage(const SampleSet& set, const InverseSetProblem& problem,
                           int resolution, std::array<double, 2> lo,
                           std::array<double, 2> hi) {
  require(problem.code_dim() == 2, Errc::unsupported_dimension,
          "grid_coverage: the grid oracle only supports 2-d code spaces");
  require(resolution > 0, Errc::invalid_argument,
          "grid_coverage: resolution must be positive");
  for (int a = 0; a < 2; ++a)
    require(std::isfinite(lo[a]) && std::isfinite(hi[a]) && hi[a] > lo[a],
            Errc::invalid_argument, "grid_coverage: bad bounds");

  CoverageGrid grid;
  grid.resolution = resolution;
  grid.lo = lo;
  grid.hi = hi;
  grid.feasible.assign(static_cast<std::size_t>(resolution) * resolution, 0);
  grid.covered.assign(grid.feasible.size(), 0);

  double wx = (hi[0] - lo[0]) / resolution;
  double wy = (hi[1] - lo[1]) / resolution;

  for (int iy = 0; iy < resolution; ++iy)
    for (int ix = 0; ix < resolution; ++ix) {
      Vec center = {lo[0] + (ix + 0.5) * wx, lo[1] + (iy + 0.5) * wy};
      if (is_feasible(problem, center).all_feasible) {
        grid.feasible[static_cast<std::size_t>(iy) * resolution + ix] = 1;
        ++grid.feasible_cells;
      }
    }

  for (const auto& rec : set.samples) {
    int ix = static_cast<int>(std::floor((rec.code[0] - lo[0]) / wx));
    int iy = static_cast<int>(std::floor((rec.code[1] - lo[1]) / wy));
    if (ix < 0 || iy < 0 || ix >= resolution || iy >= resolution) continue;
    std::size_t idx = static_cast<std::size_t>(iy) * resolution + ix;
    if (grid.feasible[idx] && !grid.covered[idx]) {
      grid.covered[idx] = 1;
      ++grid.covered_cells;
    }
  }

  grid.ratio = grid.feasible_cells == 0
                   ? 0.0
                   : static_cast<double>(grid.covered_cells) /
                         static_cast<double>(grid.feasible_cells);
  return grid;
}

RunStepStats step_stats(const std::string& label, const SampleSet& set) {
  RunStepStats stats;
  stats.label = label;
  stats.grad_evals = set.accounting.total_code_evals();
  stats.batch_steps = set.accounting.seed_batch_steps + set.accounting.walk_steps;
  stats.walk_steps = set.accounting.walk_steps;
  stats.accepted = static_cast<long>(set.samples.size());
  return stats;
}

StepComparison step_accounting(const std::vector<RunStepStats>& runs) {
  StepComparison cmp;
  cmp.runs = runs;
  for (const auto& r : runs)
    cmp.evals_per_sample.push_back(
        r.accepted > 0 ? static_cast<double>(r.grad_evals) / r.accepted : 0.0);
  if (runs.size() >= 2 && runs[1].grad_evals > 0)
    cmp.ratio_first_to_second = static_cast<double>(runs[0].grad_evals) /
                                static_cast<double>(runs[1].grad_evals);
  return cmp;
}

Vec nearest_neighbor_distance_quantiles(const std::vector<Vec>& points,
                                        const Vec& quantiles) {
  require(points.size() >= 2, Errc::too_few_samples,
          "nearest_neighbor_distance_quantiles: need at least two points");
  Vec nn(points.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      double d2 = 0.0;
      for (std::size_t t = 0; t < points[i].size(); ++t) {
        double diff = points[i][t] - points[j][t];
        d2 += diff * diff;
      }
      nn[i] = std::min(nn[i], std::sqrt(d2));
    }
  std::sort(nn.begin(), nn.end());
  Vec out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    require(q >= 0.0 && q <= 1.0, Errc::invalid_argument,
            "quantile outside [0,1]");
    double pos = q * static_cast<double>(nn.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, nn.size() - 1);
    double frac = pos - static_cast<double>(lo);
    out.push_back(nn[lo] + frac * (nn[hi] - nn[lo]));
  }
  return out;
}

void write_pgm(const std::vector<std::uint8_t>& mask, int resolution,
               const std::string& path) {
  require(static_cast<std::size_t>(resolution) * resolution == mask.size(),
          Errc::invalid_argument, "write_pgm: mask size != resolution^2");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io_error, "cannot write " + path);
  out << "P2\n" << resolution << " " << resolution << "\n255\n";
  // Top row of the image is the highest y cell.
  for (int iy = resolution - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      if (ix) out << ' ';
      out << (mask[static_cast<std::size_t>(iy) * resolution + ix] ? 255 : 0);
    }
    out << '\n';
  }
  require(out.good(), Errc::io_error, "write failed for " + path);
}

std::vector<Vec> sample_codes(const SampleSet& set) {
  std::vector<Vec> codes;
  codes.reserve(set.samples.size());
  for (const auto& rec : set.samples) codes.push_back(rec.code);
  return codes;
}

std::vector<Vec> sample_encodings(const SampleSet& set,
                                  const InverseSetProblem& problem) {
  std::vector<Vec> enc;
  enc.reserve(set.samples.size());
  for (const auto& rec : set.samples)
    enc.push_back(problem.E().forward(problem.G().forward(rec.code)));
  return enc;
}

double max_abs_code(const SampleSet& set) {
  double best = 0.0;
  for (const auto& rec : set.samples)
    for (double v : rec.code) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace inverseset
