#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "inverseset/diffmap.hpp"
#include "inverseset/rng.hpp"
#include "oracle.hpp"

using namespace inverseset;
using testutil::fixture;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DiffMap small_affine() {
  Mat A(2, 3);
  A.data = {1.0, -2.0, 0.5, 0.25, 4.0, -1.5};
  return DiffMap::affine(A, {0.1, -0.3});
}

}  // namespace

TEST_CASE("forward: identity returns its input") {
  DiffMap m = DiffMap::identity(2);
  Vec x = {0.3, -0.7};
  CHECK(m.forward(x) == Vec{0.3, -0.7});
}

TEST_CASE("forward: logistic of zero pre-activation is one half") {
  DiffMap m = DiffMap::linear_logistic({1.0, 1.0}, 0.0);
  Vec x = {0.0, 0.0};
  CHECK(m.forward(x)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("forward: mlp fixture matches hand-computed reference") {
  DiffMap m = load_model(fixture("models/mlp_2_4_1.model"));
  Vec x = {1.0, 0.0};

  // Independent layer-by-layer arithmetic on the known fixture weights.
  double pre[4] = {0.5 * 1 + -0.25 * 0 + 0.1, 0.75 * 1 + 0.5 * 0 + -0.2,
                   -0.5 * 1 + 1.0 * 0 + 0.3, 0.25 * 1 + 0.25 * 0 + 0.0};
  double w2[4] = {1.0, -0.5, 0.25, 0.75};
  double expected = 0.05;
  for (int i = 0; i < 4; ++i) expected += w2[i] * std::tanh(pre[i]);

  CHECK(m.forward(x)[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(m.forward(x)[0] == doctest::Approx(0.4711346281494735).epsilon(1e-12));
}

TEST_CASE("forward: dimension and finiteness preconditions") {
  DiffMap m = DiffMap::identity(2);
  Vec bad = {1.0};
  CHECK_THROWS_AS(m.forward(bad), Error);
  Vec inf = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(m.forward(inf), Error);
}

TEST_CASE("vjp: affine maps have constant Jacobian rows") {
  DiffMap m = small_affine();
  Vec x = {0.7, -1.1, 2.2};
  Vec u = {2.0, -3.0};
  Vec g = m.vjp(x, u);
  // u'A by hand.
  CHECK(g[0] == doctest::Approx(2.0 * 1.0 + -3.0 * 0.25).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(2.0 * -2.0 + -3.0 * 4.0).epsilon(1e-15));
  CHECK(g[2] == doctest::Approx(2.0 * 0.5 + -3.0 * -1.5).epsilon(1e-15));
}

TEST_CASE("vjp: logistic gradient at the midpoint") {
  DiffMap m = DiffMap::linear_logistic({2.0, 0.0}, 0.0);
  Vec x = {0.0, 0.0};
  Vec u = {1.0};
  Vec g = m.vjp(x, u);
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));  // sigma'(0) * 2
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("vjp: mlp fixture matches central differences") {
  DiffMap m = load_model(fixture("models/mlp_2_4_1.model"));
  Vec x = {1.0, 0.0};
  Vec analytic = m.vjp(x, Vec{1.0});
  Vec numeric = testutil::fd_grad(testutil::dotted_forward(m, {1.0}), x, 1e-5);
  CHECK(testutil::max_grad_rel_err(analytic, numeric) < 1e-5);
}

TEST_CASE("compose: identity is neutral on random probes") {
  DiffMap m = load_model(fixture("models/mlp_2_4_1.model"));
  DiffMap c = DiffMap::compose(DiffMap::identity(1), m);
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    Vec x = rng.uniform_vec(2, -2.0, 2.0);
    CHECK(c.forward(x) == m.forward(x));
  }
}

TEST_CASE("compose: logistic over affine expands to the direct formula") {
  DiffMap inner = small_affine();
  DiffMap outer = DiffMap::linear_logistic({1.0, -1.0}, 0.25);
  DiffMap c = DiffMap::compose(outer, inner);
  CHECK(c.input_dim() == 3);
  CHECK(c.output_dim() == 1);
  Vec x = {0.4, -0.2, 1.0};
  Vec mid = inner.forward(x);
  double pre = mid[0] - mid[1] + 0.25;
  double expected = 1.0 / (1.0 + std::exp(-pre));
  CHECK(c.forward(x)[0] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("compose: f over G matches central differences") {
  DiffMap f = load_model(fixture("models/mlp_2_4_1.model"));
  DiffMap G = load_model(fixture("models/mlp_G_4_16_2.model"));
  DiffMap c = DiffMap::compose(f, G);
  Rng rng(17);
  Vec x = rng.uniform_vec(4, -1.0, 1.0);
  Vec analytic = c.vjp(x, Vec{1.0});
  Vec numeric = testutil::fd_grad(testutil::dotted_forward(c, {1.0}), x, 1e-5);
  CHECK(testutil::max_grad_rel_err(analytic, numeric) < 1e-5);
}

TEST_CASE("compose: dimension mismatch is rejected") {
  CHECK_THROWS_AS(
      DiffMap::compose(DiffMap::identity(3), DiffMap::identity(2)), Error);
}

TEST_CASE("finite_diff_check: affine is exact to rounding") {
  GradCheckReport report =
      finite_diff_check(small_affine(), Vec{0.3, 0.4, -0.9}, 1e-6, 1e-10);
  CHECK(report.max_rel_error <= 1e-10);
  CHECK_FALSE(report.nondifferentiable_flag);
}

TEST_CASE("finite_diff_check: linear_logistic within 1e-6") {
  DiffMap m = DiffMap::linear_logistic({1.0, 1.0}, 0.0);
  GradCheckReport report = finite_diff_check(m, Vec{0.2, -0.4}, 1e-5, 1e-6);
  CHECK(report.max_rel_error <= 1e-6);
}

TEST_CASE("finite_diff_check: rectifier probed at its kink is flagged") {
  // One relu unit, zero bias: pre-activation is exactly 0 at the origin.
  DiffMap m = DiffMap::mlp({1, 1, 1}, Activation::relu, Activation::none,
                           {1.0, 0.0, 1.0, 0.0});
  GradCheckReport report = finite_diff_check(m, Vec{0.0}, 1e-5, 1e-5);
  CHECK(report.nondifferentiable_flag);
  GradCheckReport away = finite_diff_check(m, Vec{0.5}, 1e-5, 1e-5);
  CHECK_FALSE(away.nondifferentiable_flag);
}

TEST_CASE("model files: fixture round-trips bit-exactly") {
  std::string original = slurp(fixture("models/mlp_2_4_1.model"));
  DiffMap m = load_model(fixture("models/mlp_2_4_1.model"));
  CHECK(serialize_model(m) == original);
}

TEST_CASE("model files: save then load preserves kind, dims, params") {
  Rng rng(5);
  DiffMap m = DiffMap::mlp({3, 5, 2}, Activation::tanh, Activation::logistic,
                           rng.uniform_vec(5 * 3 + 5 + 2 * 5 + 2, -1.0, 1.0));
  std::string path =
      (std::filesystem::temp_directory_path() / "ivs_roundtrip.model").string();
  save_model(m, path);
  DiffMap back = load_model(path);
  CHECK(back.kind() == m.kind());
  CHECK(back.input_dim() == m.input_dim());
  CHECK(back.output_dim() == m.output_dim());
  CHECK(back.parameters() == m.parameters());
  // Second serialization is byte-identical.
  CHECK(serialize_model(back) == serialize_model(m));
  std::filesystem::remove(path);
}

TEST_CASE("model files: inconsistent layer dims rejected") {
  std::string text =
      "inverseset-model v1\n"
      "kind mlp\n"
      "input_dim 2\n"
      "output_dim 1\n"
      "layers 2,4\n"
      "activation tanh,none\n"
      "params:\n";
  for (int i = 0; i < 12; ++i) text += "0.5\n";
  try {
    parse_model(text);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
}

TEST_CASE("model files: unknown kind rejected") {
  std::string text =
      "inverseset-model v1\n"
      "kind rnn\n"
      "input_dim 2\n"
      "output_dim 2\n"
      "params:\n";
  try {
    parse_model(text);
    FAIL("expected UnsupportedKind");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_kind);
  }
}

TEST_CASE("model files: param count mismatch rejected") {
  std::string text =
      "inverseset-model v1\n"
      "kind linear_logistic\n"
      "input_dim 2\n"
      "output_dim 1\n"
      "params:\n"
      "1\n";
  try {
    parse_model(text);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
}

TEST_CASE("property: every zoo model passes the gradient check on random probes") {
  std::vector<DiffMap> zoo = {
      DiffMap::identity(3),
      small_affine(),
      DiffMap::linear_logistic({0.5, -1.5}, 0.2),
      DiffMap::quadratic({1.0, -2.0}, {0.5, 0.0}, -1.0),
      load_model(fixture("models/mlp_2_4_1.model")),
      load_model(fixture("models/mlp_G_4_16_2.model")),
      load_model(fixture("models/mlp_E_2_8_3.model")),
      load_model(fixture("models/squash_2d.model")),
      DiffMap::coordinate_projection(4, {2, 0}),
      DiffMap::compose(load_model(fixture("models/mlp_2_4_1.model")),
                       load_model(fixture("models/mlp_G_4_16_2.model"))),
  };
  Rng rng(23);
  for (const DiffMap& m : zoo) {
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
      Vec x = rng.uniform_vec(m.input_dim(), -2.0, 2.0);
      GradCheckReport report = finite_diff_check(m, x, 1e-5, 1e-5);
      if (report.nondifferentiable_flag) continue;
      ++checked;
      CHECK(report.max_rel_error <= 1e-5);
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("property: composition is associative bit-exactly") {
  DiffMap f = load_model(fixture("models/mlp_2_4_1.model"));
  DiffMap G = load_model(fixture("models/mlp_G_4_16_2.model"));
  DiffMap P = DiffMap::coordinate_projection(6, {0, 1, 2, 3});
  DiffMap left = DiffMap::compose(DiffMap::compose(f, G), P);
  DiffMap right = DiffMap::compose(f, DiffMap::compose(G, P));
  Rng rng(31);
  for (int t = 0; t < 25; ++t) {
    Vec x = rng.uniform_vec(6, -2.0, 2.0);
    CHECK(left.forward(x) == right.forward(x));
  }
}

TEST_CASE("property: linear_logistic output stays inside (0,1)") {
  DiffMap m = DiffMap::linear_logistic({3.0, -2.0}, 0.5);
  Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    Vec x = rng.uniform_vec(2, -8.0, 8.0);
    double y = m.forward(x)[0];
    CHECK(y > 0.0);
    CHECK(y < 1.0);
  }
}
