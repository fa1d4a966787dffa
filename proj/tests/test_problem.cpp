#include <cmath>

#include <doctest.h>

#include "inverseset/problem.hpp"
#include "inverseset/rng.hpp"
#include "oracle.hpp"

using namespace inverseset;
using testutil::fixture;

namespace {

InverseSetProblem band_problem(double z1, double z2, FeasibilityMode mode) {
  // f(x) = x_0 on a 2-d identity generator/encoder: activations are
  // directly controllable through the code.
  Mat A(1, 2);
  A.data = {1.0, 0.0};
  DiffMap f = DiffMap::affine(A, {0.0});
  return InverseSetProblem(DiffMap::identity(2), DiffMap::identity(2),
                           {{f, band_new(z1, z2)}}, mode);
}

}  // namespace

TEST_CASE("band_new derives width and interior shift") {
  ActivationBand band = band_new(50.0, 60.0);
  CHECK(band.epsilon() == 10.0);
  CHECK(band.epsilon0() == 5.0);

  ActivationBand unit = band_new(0.0, 1.0);
  CHECK(unit.epsilon() == 1.0);
  CHECK(unit.epsilon0() == 0.5);
}

TEST_CASE("band_new rejects zero-width bands") {
  try {
    band_new(5.0, 5.0);
    FAIL("expected DegenerateBand");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_band);
  }
  CHECK_THROWS_AS(band_new(2.0, 1.0), Error);
}

TEST_CASE("is_feasible: interior point feasible in both modes") {
  for (auto mode :
       {FeasibilityMode::paper_one_sided, FeasibilityMode::strict_two_sided}) {
    auto problem = band_problem(50.0, 60.0, mode);
    Vec c = {55.0, 0.0};
    auto verdict = is_feasible(problem, c);
    CHECK(verdict.all_feasible);
    CHECK(verdict.activations[0] == 55.0);
  }
}

TEST_CASE("is_feasible: above z2 exposes the one-sided transform") {
  Vec c = {61.0, 0.0};
  CHECK(is_feasible(band_problem(50, 60, FeasibilityMode::paper_one_sided), c)
            .all_feasible);
  CHECK_FALSE(
      is_feasible(band_problem(50, 60, FeasibilityMode::strict_two_sided), c)
          .all_feasible);
}

TEST_CASE("is_feasible: below z1 infeasible in both modes") {
  Vec c = {49.0, 0.0};
  CHECK_FALSE(
      is_feasible(band_problem(50, 60, FeasibilityMode::paper_one_sided), c)
          .all_feasible);
  CHECK_FALSE(
      is_feasible(band_problem(50, 60, FeasibilityMode::strict_two_sided), c)
          .all_feasible);
}

TEST_CASE("is_feasible: all_feasible is the conjunction over constraints") {
  Mat A0(1, 2), A1(1, 2);
  A0.data = {1.0, 0.0};
  A1.data = {0.0, 1.0};
  InverseSetProblem problem(
      DiffMap::identity(2), DiffMap::identity(2),
      {{DiffMap::affine(A0, {0.0}), band_new(0.0, 1.0)},
       {DiffMap::affine(A1, {0.0}), band_new(0.0, 1.0)}},
      FeasibilityMode::strict_two_sided);
  Vec c = {0.5, 2.0};
  auto verdict = is_feasible(problem, c);
  CHECK(verdict.per_constraint[0]);
  CHECK_FALSE(verdict.per_constraint[1]);
  CHECK_FALSE(verdict.all_feasible);
}

TEST_CASE("analytic inverse set: sigma^{-1}(1/2) gives the axis half space") {
  auto region =
      analytic_inverse_set_linear_logistic({1.0, 0.0}, 0.0, band_new(0.5, 1.0));
  CHECK(region.offset == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(region.contains(Vec{0.2, 0.9}));
  CHECK(region.contains(Vec{0.0, 0.0}));
  CHECK_FALSE(region.contains(Vec{-0.1, 0.5}));   // violates half space
  CHECK_FALSE(region.contains(Vec{0.5, 1.2}));    // leaves the hypercube
}

TEST_CASE("analytic inverse set: sigma(1) threshold is the diagonal") {
  double z1 = 1.0 / (1.0 + std::exp(-1.0));  // sigma(1)
  auto region =
      analytic_inverse_set_linear_logistic({1.0, 1.0}, 0.0, band_new(z1, 1.0));
  CHECK(region.offset == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(region.contains(Vec{0.6, 0.5}));
  CHECK_FALSE(region.contains(Vec{0.4, 0.5}));
}

TEST_CASE("analytic inverse set: bands outside the logistic range rejected") {
  try {
    analytic_inverse_set_linear_logistic({1.0, 0.0}, 0.0, band_new(0.0, 1.0));
    FAIL("expected BandOutsideLogisticRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::band_outside_logistic_range);
  }
  CHECK_THROWS_AS(
      analytic_inverse_set_linear_logistic({1.0}, 0.0, band_new(0.5, 1.5)),
      Error);
}

TEST_CASE("property: strict feasibility implies one-sided feasibility") {
  auto strict = band_problem(-0.5, 0.75, FeasibilityMode::strict_two_sided);
  auto loose = band_problem(-0.5, 0.75, FeasibilityMode::paper_one_sided);
  Rng rng(41);
  for (int t = 0; t < 500; ++t) {
    Vec c = rng.uniform_vec(2, -2.0, 2.0);
    if (is_feasible(strict, c).all_feasible)
      CHECK(is_feasible(loose, c).all_feasible);
  }
}

TEST_CASE("property: analytic membership agrees with strict mode on a grid") {
  // Linear-logistic model with z2 = 1 over the unit square.
  Vec w = {1.0, 1.0};
  double c = 0.0, z1 = 0.6;
  DiffMap f = DiffMap::linear_logistic(w, c);
  InverseSetProblem problem(DiffMap::identity(2), DiffMap::identity(2),
                            {{f, band_new(z1, 1.0)}},
                            FeasibilityMode::strict_two_sided);
  auto region = analytic_inverse_set_linear_logistic(w, c, band_new(z1, 1.0));

  int agree = 0, total = 0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      Vec x = {i / 99.0, j / 99.0};
      double margin = x[0] + x[1] - region.offset;
      if (std::abs(margin) < 1e-12) continue;  // boundary excluded
      ++total;
      bool analytic = region.contains(x);
      bool strict = is_feasible(problem, x).all_feasible;
      if (analytic == strict) ++agree;
    }
  CHECK(total > 9000);
  CHECK(agree == total);
}

TEST_CASE("property: is_feasible is pure") {
  auto problem = band_problem(0.25, 0.5, FeasibilityMode::paper_one_sided);
  Vec c = {0.3, -0.4};
  auto v1 = is_feasible(problem, c);
  auto v2 = is_feasible(problem, c);
  CHECK(v1.all_feasible == v2.all_feasible);
  CHECK(v1.activations == v2.activations);
}
