// Regenerates the model fixtures shipped under models/. Weights are
// drawn from a fixed-seed generator so the files are reproducible;
// usage: gen_fixtures [output_dir]. Also prints activation statistics
// of the mlp f(G(c)) composition to help pick sensible bands.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "inverseset/auglag.hpp"
#include "inverseset/diffmap.hpp"
#include "inverseset/rng.hpp"

using namespace inverseset;

namespace {

Vec random_mlp_params(Rng& rng, const std::vector<std::size_t>& widths,
                      double weight_scale, double bias_scale) {
  Vec params;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    double scale = weight_scale / std::sqrt(static_cast<double>(widths[l]));
    for (std::size_t i = 0; i < widths[l + 1] * widths[l]; ++i)
      params.push_back(rng.uniform(-scale, scale));
    for (std::size_t i = 0; i < widths[l + 1]; ++i)
      params.push_back(rng.uniform(-bias_scale, bias_scale));
  }
  return params;
}

void report_range(const char* label, const DiffMap& f, const DiffMap& G,
                  double radius, Rng& rng) {
  Vec values;
  Vec c(G.input_dim());
  for (int t = 0; t < 20000; ++t) {
    for (auto& v : c) v = rng.uniform(-radius, radius);
    values.push_back(f.forward(G.forward(c))[0]);
  }
  std::sort(values.begin(), values.end());
  auto q = [&](double p) {
    return values[static_cast<std::size_t>(p * (values.size() - 1))];
  };
  std::printf("%s radius %.1f: min=%.4f q10=%.4f q50=%.4f q90=%.4f max=%.4f\n",
              label, radius, values.front(), q(0.1), q(0.5), q(0.9),
              values.back());
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "models";

  auto path = [&](const char* name) { return dir + "/" + name; };

  save_model(DiffMap::identity(2), path("identity_2d.model"));
  save_model(DiffMap::linear_logistic({1.0, 1.0}, 0.0),
             path("linear_logistic_2d.model"));
  save_model(DiffMap::quadratic({1.0, 1.0}, {0.0, 0.0}, 0.0),
             path("quadratic_2d.model"));
  save_model(DiffMap::quadratic({-1.0, -1.0}, {0.0, 0.0}, 0.0),
             path("neg_quadratic_2d.model"));

  // Elementwise logistic squash: G(c) = sigma(c), keeps inputs in (0,1)^2.
  save_model(DiffMap::mlp({2, 2}, Activation::none, Activation::logistic,
                          {1.0, 0.0, 0.0, 1.0, 0.0, 0.0}),
             path("squash_2d.model"));

  // Disks of radius 2 around (-1,0) and (1,0): -|x - a|^2 as a diagonal
  // quadratic with a linear term.
  save_model(DiffMap::quadratic({-1.0, -1.0}, {-2.0, 0.0}, -1.0),
             path("lens_f1_2d.model"));
  save_model(DiffMap::quadratic({-1.0, -1.0}, {2.0, 0.0}, -1.0),
             path("lens_f2_2d.model"));

  // Small activation net with hand-picked weights (easy to recompute by
  // hand in the tests): layers 2-4-1, tanh hidden, linear output.
  Vec mlp_f_params = {
      // W1 (4x2)
      0.5, -0.25,
      0.75, 0.5,
      -0.5, 1.0,
      0.25, 0.25,
      // b1
      0.1, -0.2, 0.3, 0.0,
      // W2 (1x4)
      1.0, -0.5, 0.25, 0.75,
      // b2
      0.05};
  DiffMap mlp_f =
      DiffMap::mlp({2, 4, 1}, Activation::tanh, Activation::none, mlp_f_params);
  save_model(mlp_f, path("mlp_2_4_1.model"));

  Rng rng(20240615);
  DiffMap G = DiffMap::mlp({4, 16, 2}, Activation::tanh, Activation::logistic,
                           random_mlp_params(rng, {4, 16, 2}, 2.2, 0.3));
  save_model(G, path("mlp_G_4_16_2.model"));

  DiffMap E = DiffMap::mlp({2, 8, 3}, Activation::tanh, Activation::none,
                           random_mlp_params(rng, {2, 8, 3}, 2.0, 0.2));
  save_model(E, path("mlp_E_2_8_3.model"));

  std::printf("fixtures written to %s/\n", dir.c_str());

  Rng probe(99);
  report_range("f(G(c))", mlp_f, G, 1.0, probe);
  report_range("f(G(c))", mlp_f, G, 2.0, probe);
  report_range("f(G(c))", mlp_f, G, 4.0, probe);
  Vec x0(2, 0.0);
  std::printf("f((0,0)) over input space corners:\n");
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0}) {
      Vec x = {a, b};
      std::printf("  f(%g,%g) = %.6f\n", a, b, mlp_f.forward(x)[0]);
    }
  return 0;
}
