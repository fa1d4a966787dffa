#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace inverseset {

using Vec = std::vector<double>;

/// Dense row-major matrix. Rows index codes/samples, columns index
/// coordinates. Kept deliberately minimal; the solvers only need row
/// views and elementwise access.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

enum class Errc {
  dimension_mismatch,
  nonfinite_input,
  nonfinite_value,
  schema_violation,
  unsupported_kind,
  degenerate_band,
  band_outside_logistic_range,
  max_outer_iterations,
  walk_budget_exhausted,
  config_invalid,
  model_load,
  fingerprint_mismatch,
  unsupported_dimension,
  empty_set,
  too_few_samples,
  missing_artifacts,
  io_error,
  invalid_argument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) raise(code, what);
}

}  // namespace inverseset
