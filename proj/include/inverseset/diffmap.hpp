#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "inverseset/types.hpp"

namespace inverseset {

enum class MapKind {
  identity,
  affine,
  linear_logistic,
  quadratic,
  mlp,
  composition,
  coordinate_projection,
};

enum class Activation { logistic, tanh, relu, none };

const char* map_kind_name(MapKind k);
const char* activation_name(Activation a);

namespace detail {
class MapImpl;
}

/// A pure map R^a -> R^b with a hand-derived vector-Jacobian product.
/// Instances are immutable after construction; forward/vjp are safe to
/// call from any thread.
class DiffMap {
 public:
  static DiffMap identity(std::size_t dim);
  /// y = A x + b with A of shape out x in (row-major).
  static DiffMap affine(Mat A, Vec b);
  /// y = sigma(w'x + c), scalar output.
  static DiffMap linear_logistic(Vec w, double c);
  /// y = sum_i q_i x_i^2 + sum_i b_i x_i + c, scalar output.
  static DiffMap quadratic(Vec q, Vec b, double c);
  /// Fully connected net. widths = layer widths including input and
  /// output, e.g. {2,4,1}. `hidden` is applied after every layer except
  /// the last, `output` after the last. params: per layer, W row-major
  /// then bias.
  static DiffMap mlp(std::vector<std::size_t> widths, Activation hidden,
                     Activation output, Vec params);
  /// y_k = x[indices[k]].
  static DiffMap coordinate_projection(std::size_t input_dim,
                                       std::vector<std::size_t> indices);
  static DiffMap compose(const DiffMap& outer, const DiffMap& inner);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  MapKind kind() const;
  /// Flat parameter vector, layout per kind (empty for identity,
  /// projection and composition).
  const Vec& parameters() const;

  Vec forward(std::span<const double> x) const;
  /// u' J(x), length input_dim. For scalar maps with u={1} this is the
  /// gradient.
  Vec vjp(std::span<const double> x, std::span<const double> u) const;

  /// Smallest |pre-activation| over rectifier units at x; +inf when the
  /// map is smooth everywhere.
  double kink_distance(std::span<const double> x) const;

  const detail::MapImpl& impl() const { return *impl_; }

 private:
  explicit DiffMap(std::shared_ptr<const detail::MapImpl> impl);
  std::shared_ptr<const detail::MapImpl> impl_;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_coordinate = 0;
  double step_size = 0.0;
  bool nondifferentiable_flag = false;
};

/// Central-difference check of vjp against forward, probing every output
/// cotangent. Relative error denominator is max(|analytic|, |numeric|,
/// 1e-12). Probes whose pre-activations sit within `h` of a rectifier
/// kink are reported via nondifferentiable_flag.
GradCheckReport finite_diff_check(const DiffMap& map, std::span<const double> x,
                                  double h, double tol);

/// Textual model file, header line "inverseset-model v1". Round-trips
/// bit-exactly through the shortest decimal encoding.
DiffMap load_model(const std::string& path);
void save_model(const DiffMap& map, const std::string& path);
std::string serialize_model(const DiffMap& map);
DiffMap parse_model(const std::string& text, const std::string& origin = "<string>");

}  // namespace inverseset
