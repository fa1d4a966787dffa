#include <cmath>

#include <doctest.h>

#include "inverseset/metrics.hpp"
#include "oracle.hpp"

using namespace inverseset;

namespace {

InverseSetProblem annulus_problem() {
  return InverseSetProblem(
      DiffMap::identity(2), DiffMap::identity(2),
      {{DiffMap::quadratic({-1.0, -1.0}, {0.0, 0.0}, 0.0), band_new(-4.0, -1.0)}},
      FeasibilityMode::strict_two_sided);
}

SampleSet set_of(const std::vector<Vec>& codes, const InverseSetProblem& problem) {
  SampleSet set;
  for (const auto& c : codes) {
    SampleRecord rec;
    rec.code = c;
    rec.activations = is_feasible(problem, c).activations;
    set.samples.push_back(rec);
  }
  return set;
}

}  // namespace

TEST_CASE("mean_pairwise_distance: identical points give zero") {
  std::vector<Vec> pts(4, Vec{1.0, 2.0});
  CHECK(mean_pairwise_distance(pts) == 0.0);
}

TEST_CASE("mean_pairwise_distance: single pair is its distance") {
  std::vector<Vec> pts = {{0.0, 0.0}, {3.0, 4.0}};
  CHECK(mean_pairwise_distance(pts) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("mean_pairwise_distance: fewer than two points rejected") {
  std::vector<Vec> one = {{1.0}};
  try {
    mean_pairwise_distance(one);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_few_samples);
  }
}

TEST_CASE("mean_pairwise_distance: permutation, translation and scaling behavior") {
  Rng rng(3);
  std::vector<Vec> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(rng.uniform_vec(3, -2.0, 2.0));
  double base = mean_pairwise_distance(pts);

  std::vector<Vec> shuffled = {pts[3], pts[0], pts[6], pts[2],
                               pts[5], pts[1], pts[4]};
  CHECK(mean_pairwise_distance(shuffled) == doctest::Approx(base).epsilon(1e-14));

  std::vector<Vec> shifted = pts;
  for (auto& p : shifted)
    for (std::size_t t = 0; t < p.size(); ++t) p[t] += 10.0;
  CHECK(mean_pairwise_distance(shifted) == doctest::Approx(base).epsilon(1e-12));

  std::vector<Vec> scaled = pts;
  for (auto& p : scaled)
    for (auto& v : p) v *= 2.5;
  CHECK(mean_pairwise_distance(scaled) ==
        doctest::Approx(2.5 * base).epsilon(1e-12));
}

TEST_CASE("feasibility_rate: hand-built set with one outlier") {
  auto problem = annulus_problem();
  auto set = set_of({{1.5, 0.0}, {0.0, 1.2}, {-1.8, 0.0}, {0.1, 0.1}}, problem);
  CHECK(feasibility_rate(set, problem, FeasibilityMode::strict_two_sided) ==
        doctest::Approx(0.75));
}

TEST_CASE("feasibility_rate: empty set rejected") {
  auto problem = annulus_problem();
  SampleSet empty;
  try {
    feasibility_rate(empty, problem, FeasibilityMode::strict_two_sided);
    FAIL("expected EmptySet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_set);
  }
}

TEST_CASE("grid_coverage: sample at every feasible center covers fully") {
  auto problem = annulus_problem();
  int res = 20;
  std::array<double, 2> lo{-2.5, -2.5}, hi{2.5, 2.5};
  double w = 5.0 / res;
  std::vector<Vec> centers;
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      Vec c = {lo[0] + (ix + 0.5) * w, lo[1] + (iy + 0.5) * w};
      if (is_feasible(problem, c).all_feasible) centers.push_back(c);
    }
  auto set = set_of(centers, problem);
  CoverageGrid grid = grid_coverage(set, problem, res, lo, hi);
  CHECK(grid.ratio == 1.0);
  CHECK(grid.feasible_cells == static_cast<long>(centers.size()));
}

TEST_CASE("grid_coverage: no samples covers nothing") {
  auto problem = annulus_problem();
  SampleSet empty;
  CoverageGrid grid = grid_coverage(empty, problem, 20, {-2.5, -2.5}, {2.5, 2.5});
  CHECK(grid.ratio == 0.0);
  CHECK(grid.covered_cells == 0);
  CHECK(grid.feasible_cells > 0);
}

TEST_CASE("grid_coverage: half-plane samples cover about half the ring") {
  auto problem = annulus_problem();
  Rng rng(5);
  std::vector<Vec> codes;
  while (codes.size() < 4000) {
    Vec c = rng.uniform_vec(2, -2.2, 2.2);
    if (c[0] <= 0.0) continue;  // confined to x > 0 by construction
    if (!is_feasible(problem, c).all_feasible) continue;
    codes.push_back(c);
  }
  auto set = set_of(codes, problem);
  int res = 20;
  CoverageGrid grid = grid_coverage(set, problem, res, {-2.5, -2.5}, {2.5, 2.5});
  // Expect one half, within a cell-layer tolerance of the split line.
  double layer = static_cast<double>(res) / grid.feasible_cells;
  CHECK(grid.ratio > 0.5 - 2 * layer);
  CHECK(grid.ratio < 0.5 + 2 * layer);
}

TEST_CASE("grid_coverage: non-2d code spaces rejected") {
  DiffMap G = load_model(testutil::fixture("models/mlp_G_4_16_2.model"));
  DiffMap f = load_model(testutil::fixture("models/mlp_2_4_1.model"));
  InverseSetProblem problem(G, load_model(testutil::fixture("models/mlp_E_2_8_3.model")),
                            {{f, band_new(0.3, 0.7)}},
                            FeasibilityMode::paper_one_sided);
  SampleSet set;
  try {
    grid_coverage(set, problem, 10, {-1, -1}, {1, 1});
    FAIL("expected UnsupportedDimension");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_dimension);
  }
}

TEST_CASE("grid_coverage: monotone as samples accumulate") {
  auto problem = annulus_problem();
  Rng rng(7);
  std::vector<Vec> codes;
  while (codes.size() < 600) {
    Vec c = rng.uniform_vec(2, -2.2, 2.2);
    if (is_feasible(problem, c).all_feasible) codes.push_back(c);
  }
  double last = 0.0;
  for (std::size_t count : {50u, 150u, 300u, 600u}) {
    auto set = set_of({codes.begin(), codes.begin() + count}, problem);
    CoverageGrid grid = grid_coverage(set, problem, 25, {-2.5, -2.5}, {2.5, 2.5});
    CHECK(grid.ratio >= last);
    last = grid.ratio;
  }
}

TEST_CASE("step_accounting: identical runs give ratio one") {
  RunStepStats a{"a", 1200, 120, 20, 100};
  RunStepStats b{"b", 1200, 120, 20, 100};
  StepComparison cmp = step_accounting({a, b});
  CHECK(cmp.ratio_first_to_second.has_value());
  CHECK(*cmp.ratio_first_to_second == doctest::Approx(1.0));
  CHECK(cmp.evals_per_sample[0] == doctest::Approx(12.0));
}

TEST_CASE("step_accounting: single run reports totals only") {
  RunStepStats a{"solo", 900, 90, 0, 60};
  StepComparison cmp = step_accounting({a});
  CHECK_FALSE(cmp.ratio_first_to_second.has_value());
  CHECK(cmp.runs.size() == 1);
  CHECK(cmp.evals_per_sample[0] == doctest::Approx(15.0));
}

TEST_CASE("nearest-neighbor quantiles are ordered") {
  Rng rng(11);
  std::vector<Vec> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(rng.uniform_vec(4, -1.0, 1.0));
  Vec qs = nearest_neighbor_distance_quantiles(pts, {0.25, 0.5, 0.75, 0.9});
  CHECK(qs[0] <= qs[1]);
  CHECK(qs[1] <= qs[2]);
  CHECK(qs[2] <= qs[3]);
  CHECK(qs[0] > 0.0);
}
