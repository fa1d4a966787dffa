#include "inverseset/diffmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

namespace inverseset {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::nonfinite_input: return "NonFiniteInput";
    case Errc::nonfinite_value: return "NonFiniteValue";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::unsupported_kind: return "UnsupportedKind";
    case Errc::degenerate_band: return "DegenerateBand";
    case Errc::band_outside_logistic_range: return "BandOutsideLogisticRange";
    case Errc::max_outer_iterations: return "MaxOuterIterationsExceeded";
    case Errc::walk_budget_exhausted: return "WalkBudgetExhausted";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::model_load: return "ModelLoadError";
    case Errc::fingerprint_mismatch: return "FingerprintMismatch";
    case Errc::unsupported_dimension: return "UnsupportedDimension";
    case Errc::empty_set: return "EmptySet";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::missing_artifacts: return "MissingArtifacts";
    case Errc::io_error: return "IoError";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

const char* map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::identity: return "identity";
    case MapKind::affine: return "affine";
    case MapKind::linear_logistic: return "linear_logistic";
    case MapKind::quadratic: return "quadratic";
    case MapKind::mlp: return "mlp";
    case MapKind::composition: return "composition";
    case MapKind::coordinate_projection: return "coordinate_projection";
  }
  return "?";
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::logistic: return "logistic";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::none: return "none";
  }
  return "?";
}

namespace {

double logistic(double t) {
  // Branch keeps exp() off the overflowing side.
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double act_eval(Activation a, double t) {
  switch (a) {
    case Activation::logistic: return logistic(t);
    case Activation::tanh: return std::tanh(t);
    case Activation::relu: return t > 0.0 ? t : 0.0;
    case Activation::none: return t;
  }
  return t;
}

// Derivative expressed via the pre-activation t.
double act_deriv(Activation a, double t) {
  switch (a) {
    case Activation::logistic: {
      double s = logistic(t);
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      double th = std::tanh(t);
      return 1.0 - th * th;
    }
    case Activation::relu: return t > 0.0 ? 1.0 : 0.0;
    case Activation::none: return 1.0;
  }
  return 1.0;
}

void check_finite(std::span<const double> x, const char* what) {
  for (double v : x)
    require(std::isfinite(v), Errc::nonfinite_input,
            std::string(what) + " contains a non-finite entry");
}

}  // namespace

namespace detail {

class MapImpl {
 public:
  MapImpl(MapKind kind, std::size_t in, std::size_t out, Vec params)
      : kind_(kind), input_dim_(in), output_dim_(out), params_(std::move(params)) {}
  virtual ~MapImpl() = default;

  MapKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  const Vec& parameters() const { return params_; }

  virtual Vec forward(std::span<const double> x) const = 0;
  virtual Vec vjp(std::span<const double> x, std::span<const double> u) const = 0;
  virtual double kink_distance(std::span<const double>) const {
    return std::numeric_limits<double>::infinity();
  }

 protected:
  MapKind kind_;
  std::size_t input_dim_;
  std::size_t output_dim_;
  Vec params_;
};

namespace {

class IdentityImpl final : public MapImpl {
 public:
  explicit IdentityImpl(std::size_t dim)
      : MapImpl(MapKind::identity, dim, dim, {}) {}
  Vec forward(std::span<const double> x) const override {
    return Vec(x.begin(), x.end());
  }
  Vec vjp(std::span<const double>, std::span<const double> u) const override {
    return Vec(u.begin(), u.end());
  }
};

class AffineImpl final : public MapImpl {
 public:
  AffineImpl(std::size_t in, std::size_t out, Vec params)
      : MapImpl(MapKind::affine, in, out, std::move(params)) {}

  Vec forward(std::span<const double> x) const override {
    Vec y(output_dim_);
    const double* A = params_.data();
    const double* b = params_.data() + output_dim_ * input_dim_;
    for (std::size_t i = 0; i < output_dim_; ++i) {
      double acc = b[i];
      for (std::size_t j = 0; j < input_dim_; ++j) acc += A[i * input_dim_ + j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  Vec vjp(std::span<const double>, std::span<const double> u) const override {
    Vec g(input_dim_, 0.0);
    const double* A = params_.data();
    for (std::size_t i = 0; i < output_dim_; ++i)
      for (std::size_t j = 0; j < input_dim_; ++j) g[j] += u[i] * A[i * input_dim_ + j];
    return g;
  }
};

class LinearLogisticImpl final : public MapImpl {
 public:
  LinearLogisticImpl(std::size_t in, Vec params)
      : MapImpl(MapKind::linear_logistic, in, 1, std::move(params)) {}

  double pre(std::span<const double> x) const {
    double t = params_[input_dim_];
    for (std::size_t j = 0; j < input_dim_; ++j) t += params_[j] * x[j];
    return t;
  }

  Vec forward(std::span<const double> x) const override {
    return {logistic(pre(x))};
  }

  Vec vjp(std::span<const double> x, std::span<const double> u) const override {
    double t = pre(x);
    double scale = u[0] * act_deriv(Activation::logistic, t);
    Vec g(input_dim_);
    for (std::size_t j = 0; j < input_dim_; ++j) g[j] = scale * params_[j];
    return g;
  }
};

class QuadraticImpl final : public MapImpl {
 public:
  QuadraticImpl(std::size_t in, Vec params)
      : MapImpl(MapKind::quadratic, in, 1, std::move(params)) {}

  Vec forward(std::span<const double> x) const override {
    const double* q = params_.data();
    const double* b = params_.data() + input_dim_;
    double acc = params_[2 * input_dim_];
    for (std::size_t j = 0; j < input_dim_; ++j)
      acc += q[j] * x[j] * x[j] + b[j] * x[j];
    return {acc};
  }

  Vec vjp(std::span<const double> x, std::span<const double> u) const override {
    const double* q = params_.data();
    const double* b = params_.data() + input_dim_;
    Vec g(input_dim_);
    for (std::size_t j = 0; j < input_dim_; ++j)
      g[j] = u[0] * (2.0 * q[j] * x[j] + b[j]);
    return g;
  }
};

class MlpImpl final : public MapImpl {
 public:
  MlpImpl(std::vector<std::size_t> widths, Activation hidden, Activation output,
          Vec params)
      : MapImpl(MapKind::mlp, widths.front(), widths.back(), std::move(params)),
        widths_(std::move(widths)),
        hidden_(hidden),
        output_(output) {}

  const std::vector<std::size_t>& widths() const { return widths_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  static std::size_t param_count(const std::vector<std::size_t>& widths) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
      n += widths[l + 1] * widths[l] + widths[l + 1];
    return n;
  }

  Vec forward(std::span<const double> x) const override {
    Vec h(x.begin(), x.end());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      Activation act = (l + 2 == widths_.size()) ? output_ : hidden_;
      h = layer(h, l, off, act, nullptr);
    }
    return h;
  }

  Vec vjp(std::span<const double> x, std::span<const double> u) const override {
    // Forward pass keeping pre-activations, then reverse accumulation.
    std::size_t L = widths_.size() - 1;
    std::vector<Vec> inputs(L);
    std::vector<Vec> preacts(L);
    Vec h(x.begin(), x.end());
    std::size_t off = 0;
    for (std::size_t l = 0; l < L; ++l) {
      inputs[l] = h;
      Activation act = (l + 1 == L) ? output_ : hidden_;
      h = layer(h, l, off, act, &preacts[l]);
    }

    Vec grad(u.begin(), u.end());
    for (std::size_t l = L; l-- > 0;) {
      Activation act = (l + 1 == L) ? output_ : hidden_;
      std::size_t rows = widths_[l + 1], cols = widths_[l];
      const double* W = params_.data() + layer_offset(l);
      Vec delta(rows);
      for (std::size_t i = 0; i < rows; ++i)
        delta[i] = grad[i] * act_deriv(act, preacts[l][i]);
      Vec next(cols, 0.0);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) next[j] += delta[i] * W[i * cols + j];
      grad = std::move(next);
    }
    return grad;
  }

  double kink_distance(std::span<const double> x) const override {
    if (hidden_ != Activation::relu && output_ != Activation::relu)
      return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Vec h(x.begin(), x.end());
    std::size_t off = 0;
    std::size_t L = widths_.size() - 1;
    for (std::size_t l = 0; l < L; ++l) {
      Activation act = (l + 1 == L) ? output_ : hidden_;
      Vec pre;
      h = layer(h, l, off, act, &pre);
      if (act == Activation::relu)
        for (double t : pre) best = std::min(best, std::abs(t));
    }
    return best;
  }

 private:
  std::size_t layer_offset(std::size_t l) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < l; ++k)
      off += widths_[k + 1] * widths_[k] + widths_[k + 1];
    return off;
  }

  Vec layer(const Vec& in, std::size_t l, std::size_t& off, Activation act,
            Vec* pre_out) const {
    std::size_t rows = widths_[l + 1], cols = widths_[l];
    const double* W = params_.data() + off;
    const double* b = params_.data() + off + rows * cols;
    off += rows * cols + rows;
    Vec out(rows);
    if (pre_out) pre_out->resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      double t = b[i];
      for (std::size_t j = 0; j < cols; ++j) t += W[i * cols + j] * in[j];
      if (pre_out) (*pre_out)[i] = t;
      out[i] = act_eval(act, t);
    }
    return out;
  }

  std::vector<std::size_t> widths_;
  Activation hidden_;
  Activation output_;
};

class ProjectionImpl final : public MapImpl {
 public:
  ProjectionImpl(std::size_t in, std::vector<std::size_t> indices)
      : MapImpl(MapKind::coordinate_projection, in, indices.size(), {}),
        indices_(std::move(indices)) {
    Vec p;
    p.reserve(indices_.size());
    for (std::size_t i : indices_) p.push_back(static_cast<double>(i));
    params_ = std::move(p);
  }

  const std::vector<std::size_t>& indices() const { return indices_; }

  Vec forward(std::span<const double> x) const override {
    Vec y(output_dim_);
    for (std::size_t k = 0; k < output_dim_; ++k) y[k] = x[indices_[k]];
    return y;
  }

  Vec vjp(std::span<const double>, std::span<const double> u) const override {
    Vec g(input_dim_, 0.0);
    for (std::size_t k = 0; k < output_dim_; ++k) g[indices_[k]] += u[k];
    return g;
  }

 private:
  std::vector<std::size_t> indices_;
};

class CompositionImpl final : public MapImpl {
 public:
  CompositionImpl(std::shared_ptr<const MapImpl> outer,
                  std::shared_ptr<const MapImpl> inner)
      : MapImpl(MapKind::composition, inner->input_dim(), outer->output_dim(), {}),
        outer_(std::move(outer)),
        inner_(std::move(inner)) {}

  Vec forward(std::span<const double> x) const override {
    Vec mid = inner_->forward(x);
    return outer_->forward(mid);
  }

  Vec vjp(std::span<const double> x, std::span<const double> u) const override {
    Vec mid = inner_->forward(x);
    Vec u_mid = outer_->vjp(mid, u);
    return inner_->vjp(x, u_mid);
  }

  double kink_distance(std::span<const double> x) const override {
    double inner_d = inner_->kink_distance(x);
    Vec mid = inner_->forward(x);
    return std::min(inner_d, outer_->kink_distance(mid));
  }

 private:
  std::shared_ptr<const MapImpl> outer_;
  std::shared_ptr<const MapImpl> inner_;
};

}  // namespace
}  // namespace detail

DiffMap::DiffMap(std::shared_ptr<const detail::MapImpl> impl)
    : impl_(std::move(impl)) {}

std::size_t DiffMap::input_dim() const { return impl_->input_dim(); }
std::size_t DiffMap::output_dim() const { return impl_->output_dim(); }
MapKind DiffMap::kind() const { return impl_->kind(); }
const Vec& DiffMap::parameters() const { return impl_->parameters(); }

DiffMap DiffMap::identity(std::size_t dim) {
  require(dim > 0, Errc::invalid_argument, "identity: dim must be positive");
  return DiffMap(std::make_shared<detail::IdentityImpl>(dim));
}

DiffMap DiffMap::affine(Mat A, Vec b) {
  require(A.rows == b.size(), Errc::dimension_mismatch,
          "affine: rows(A) must equal len(b)");
  require(A.rows > 0 && A.cols > 0, Errc::invalid_argument, "affine: empty matrix");
  Vec params = std::move(A.data);
  params.insert(params.end(), b.begin(), b.end());
  return DiffMap(
      std::make_shared<detail::AffineImpl>(A.cols, A.rows, std::move(params)));
}

DiffMap DiffMap::linear_logistic(Vec w, double c) {
  require(!w.empty(), Errc::invalid_argument, "linear_logistic: empty weight");
  std::size_t in = w.size();
  w.push_back(c);
  return DiffMap(std::make_shared<detail::LinearLogisticImpl>(in, std::move(w)));
}

DiffMap DiffMap::quadratic(Vec q, Vec b, double c) {
  require(q.size() == b.size(), Errc::dimension_mismatch,
          "quadratic: len(q) must equal len(b)");
  require(!q.empty(), Errc::invalid_argument, "quadratic: empty coefficients");
  std::size_t in = q.size();
  Vec params = std::move(q);
  params.insert(params.end(), b.begin(), b.end());
  params.push_back(c);
  return DiffMap(std::make_shared<detail::QuadraticImpl>(in, std::move(params)));
}

DiffMap DiffMap::mlp(std::vector<std::size_t> widths, Activation hidden,
                     Activation output, Vec params) {
  require(widths.size() >= 2, Errc::invalid_argument,
          "mlp: need at least input and output widths");
  for (std::size_t w : widths)
    require(w > 0, Errc::invalid_argument, "mlp: zero layer width");
  std::size_t expected = detail::MlpImpl::param_count(widths);
  require(params.size() == expected, Errc::dimension_mismatch,
          "mlp: parameter count " + std::to_string(params.size()) +
              " does not match layer widths (expected " +
              std::to_string(expected) + ")");
  return DiffMap(std::make_shared<detail::MlpImpl>(std::move(widths), hidden,
                                                   output, std::move(params)));
}

DiffMap DiffMap::coordinate_projection(std::size_t input_dim,
                                       std::vector<std::size_t> indices) {
  require(!indices.empty(), Errc::invalid_argument, "projection: no indices");
  for (std::size_t i : indices)
    require(i < input_dim, Errc::dimension_mismatch,
            "projection: index out of range");
  return DiffMap(
      std::make_shared<detail::ProjectionImpl>(input_dim, std::move(indices)));
}

DiffMap DiffMap::compose(const DiffMap& outer, const DiffMap& inner) {
  require(outer.input_dim() == inner.output_dim(), Errc::dimension_mismatch,
          "compose: outer.input_dim (" + std::to_string(outer.input_dim()) +
              ") != inner.output_dim (" + std::to_string(inner.output_dim()) + ")");
  return DiffMap(
      std::make_shared<detail::CompositionImpl>(outer.impl_, inner.impl_));
}

Vec DiffMap::forward(std::span<const double> x) const {
  require(x.size() == input_dim(), Errc::dimension_mismatch,
          "forward: input length " + std::to_string(x.size()) +
              " != input_dim " + std::to_string(input_dim()));
  check_finite(x, "forward input");
  return impl_->forward(x);
}

Vec DiffMap::vjp(std::span<const double> x, std::span<const double> u) const {
  require(x.size() == input_dim(), Errc::dimension_mismatch,
          "vjp: input length mismatch");
  require(u.size() == output_dim(), Errc::dimension_mismatch,
          "vjp: cotangent length " + std::to_string(u.size()) +
              " != output_dim " + std::to_string(output_dim()));
  return impl_->vjp(x, u);
}

double DiffMap::kink_distance(std::span<const double> x) const {
  require(x.size() == input_dim(), Errc::dimension_mismatch,
          "kink_distance: input length mismatch");
  return impl_->kink_distance(x);
}

GradCheckReport finite_diff_check(const DiffMap& map, std::span<const double> x,
                                  double h, double tol) {
  require(h > 0 && tol > 0, Errc::invalid_argument,
          "finite_diff_check: h and tol must be positive");
  check_finite(x, "finite_diff_check probe");
  std::size_t in = map.input_dim(), out = map.output_dim();

  GradCheckReport report;
  report.step_size = h;
  report.nondifferentiable_flag = map.kink_distance(x) <= h;

  // Analytic rows u'J for every unit cotangent.
  Mat analytic(out, in);
  Vec u(out, 0.0);
  for (std::size_t j = 0; j < out; ++j) {
    u[j] = 1.0;
    Vec row = map.vjp(x, u);
    u[j] = 0.0;
    std::copy(row.begin(), row.end(), analytic.row(j).begin());
  }

  Vec xp(x.begin(), x.end());
  for (std::size_t i = 0; i < in; ++i) {
    double saved = xp[i];
    xp[i] = saved + h;
    Vec fp = map.forward(xp);
    xp[i] = saved - h;
    Vec fm = map.forward(xp);
    xp[i] = saved;
    for (std::size_t j = 0; j < out; ++j) {
      double numeric = (fp[j] - fm[j]) / (2.0 * h);
      double a = analytic(j, i);
      double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
      double rel = std::abs(a - numeric) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_coordinate = i;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& origin) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(),
          Errc::schema_violation, origin + ": bad number '" + s + "'");
  require(std::isfinite(v), Errc::schema_violation,
          origin + ": non-finite parameter '" + s + "'");
  return v;
}

std::size_t parse_size(const std::string& s, const std::string& origin) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size() && v > 0,
          Errc::schema_violation, origin + ": bad positive integer '" + s + "'");
  return v;
}

Activation parse_activation(const std::string& s, const std::string& origin) {
  if (s == "logistic") return Activation::logistic;
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  if (s == "none") return Activation::none;
  raise(Errc::schema_violation, origin + ": unknown activation '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string serialize_model(const DiffMap& map) {
  std::ostringstream os;
  os << "inverseset-model v1\n";
  os << "kind " << map_kind_name(map.kind()) << "\n";
  os << "input_dim " << map.input_dim() << "\n";
  os << "output_dim " << map.output_dim() << "\n";
  if (map.kind() == MapKind::composition)
    raise(Errc::unsupported_kind,
          "compositions are built in memory and cannot be saved");
  if (map.kind() == MapKind::mlp) {
    const auto& impl = static_cast<const detail::MlpImpl&>(map.impl());
    os << "layers ";
    for (std::size_t l = 0; l < impl.widths().size(); ++l) {
      if (l) os << ',';
      os << impl.widths()[l];
    }
    os << "\n";
    os << "activation " << activation_name(impl.hidden_activation()) << ','
       << activation_name(impl.output_activation()) << "\n";
  }
  os << "params:\n";
  for (double v : map.parameters()) os << format_double(v) << "\n";
  return os.str();
}

DiffMap parse_model(const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), Errc::schema_violation,
          origin + ": empty model file");
  require(line == "inverseset-model v1", Errc::schema_violation,
          origin + ": missing 'inverseset-model v1' header");

  std::string kind;
  std::size_t input_dim = 0, output_dim = 0;
  std::vector<std::size_t> widths;
  Activation hidden = Activation::logistic, output = Activation::none;
  bool have_activation = false;
  Vec params;
  bool in_params = false;

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (in_params) {
      params.push_back(parse_double(line, origin));
      continue;
    }
    if (line == "params:") {
      in_params = true;
      continue;
    }
    auto sp = line.find(' ');
    require(sp != std::string::npos, Errc::schema_violation,
            origin + ": malformed line '" + line + "'");
    std::string key = line.substr(0, sp), value = line.substr(sp + 1);
    if (key == "kind") {
      kind = value;
    } else if (key == "input_dim") {
      input_dim = parse_size(value, origin);
    } else if (key == "output_dim") {
      output_dim = parse_size(value, origin);
    } else if (key == "layers") {
      for (const auto& tok : split(value, ','))
        widths.push_back(parse_size(tok, origin));
    } else if (key == "activation") {
      auto parts = split(value, ',');
      require(parts.size() <= 2 && !parts.empty(), Errc::schema_violation,
              origin + ": bad activation spec '" + value + "'");
      hidden = parse_activation(parts[0], origin);
      output = parts.size() == 2 ? parse_activation(parts[1], origin)
                                 : Activation::none;
      have_activation = true;
    } else {
      raise(Errc::schema_violation, origin + ": unknown key '" + key + "'");
    }
  }

  require(in_params, Errc::schema_violation, origin + ": missing params: section");
  require(!kind.empty(), Errc::schema_violation, origin + ": missing kind");
  require(input_dim > 0 && output_dim > 0, Errc::schema_violation,
          origin + ": missing dims");

  auto expect_params = [&](std::size_t n) {
    require(params.size() == n, Errc::dimension_mismatch,
            origin + ": kind " + kind + " with input_dim " +
                std::to_string(input_dim) + " expects " + std::to_string(n) +
                " params, file has " + std::to_string(params.size()));
  };

  if (kind == "identity") {
    require(input_dim == output_dim, Errc::dimension_mismatch,
            origin + ": identity requires input_dim == output_dim");
    expect_params(0);
    return DiffMap::identity(input_dim);
  }
  if (kind == "affine") {
    expect_params(output_dim * input_dim + output_dim);
    Mat A(output_dim, input_dim);
    std::copy(params.begin(), params.begin() + output_dim * input_dim,
              A.data.begin());
    Vec b(params.begin() + output_dim * input_dim, params.end());
    return DiffMap::affine(std::move(A), std::move(b));
  }
  if (kind == "linear_logistic") {
    require(output_dim == 1, Errc::dimension_mismatch,
            origin + ": linear_logistic output_dim must be 1");
    expect_params(input_dim + 1);
    Vec w(params.begin(), params.begin() + input_dim);
    return DiffMap::linear_logistic(std::move(w), params.back());
  }
  if (kind == "quadratic") {
    require(output_dim == 1, Errc::dimension_mismatch,
            origin + ": quadratic output_dim must be 1");
    expect_params(2 * input_dim + 1);
    Vec q(params.begin(), params.begin() + input_dim);
    Vec b(params.begin() + input_dim, params.begin() + 2 * input_dim);
    return DiffMap::quadratic(std::move(q), std::move(b), params.back());
  }
  if (kind == "mlp") {
    require(!widths.empty(), Errc::schema_violation,
            origin + ": mlp requires a layers field");
    require(have_activation, Errc::schema_violation,
            origin + ": mlp requires an activation field");
    require(widths.front() == input_dim && widths.back() == output_dim,
            Errc::dimension_mismatch,
            origin + ": layers chain does not match input_dim/output_dim");
    expect_params(detail::MlpImpl::param_count(widths));
    return DiffMap::mlp(std::move(widths), hidden, output, std::move(params));
  }
  if (kind == "coordinate_projection") {
    expect_params(output_dim);
    std::vector<std::size_t> idx;
    for (double v : params) {
      require(v >= 0 && v == std::floor(v), Errc::schema_violation,
              origin + ": projection index must be a nonnegative integer");
      idx.push_back(static_cast<std::size_t>(v));
    }
    return DiffMap::coordinate_projection(input_dim, std::move(idx));
  }
  raise(Errc::unsupported_kind, origin + ": unsupported kind '" + kind + "'");
}

DiffMap load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::model_load, "cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path);
}

void save_model(const DiffMap& map, const std::string& path) {
  std::string text = serialize_model(map);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io_error, "cannot write model file " + path);
  out << text;
  require(out.good(), Errc::io_error, "write failed for " + path);
}

}  // namespace inverseset
