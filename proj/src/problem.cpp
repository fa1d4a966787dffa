#include "inverseset/problem.hpp"

#include <cmath>

namespace inverseset {

ActivationBand band_new(double z1, double z2) {
  require(std::isfinite(z1) && std::isfinite(z2), Errc::nonfinite_input,
          "band: z1/z2 must be finite");
  require(z2 > z1, Errc::degenerate_band,
          "band [" + std::to_string(z1) + ", " + std::to_string(z2) +
              "] is degenerate: z2 must exceed z1");
  return ActivationBand{z1, z2};
}

const char* feasibility_mode_name(FeasibilityMode m) {
  return m == FeasibilityMode::paper_one_sided ? "paper_one_sided"
                                               : "strict_two_sided";
}

FeasibilityMode parse_feasibility_mode(const std::string& name) {
  if (name == "paper_one_sided") return FeasibilityMode::paper_one_sided;
  if (name == "strict_two_sided") return FeasibilityMode::strict_two_sided;
  raise(Errc::config_invalid, "unknown feasibility_mode '" + name + "'");
}

InverseSetProblem::InverseSetProblem(DiffMap G, DiffMap E,
                                     std::vector<ConstraintSpec> constraints,
                                     FeasibilityMode mode)
    : G_(std::move(G)), E_(std::move(E)), constraints_(std::move(constraints)),
      mode_(mode) {
  require(!constraints_.empty(), Errc::invalid_argument,
          "problem: at least one constraint required");
  require(E_.input_dim() == G_.output_dim(), Errc::dimension_mismatch,
          "problem: E.input_dim must equal G.output_dim");
  for (const auto& spec : constraints_) {
    require(spec.f.output_dim() == 1, Errc::dimension_mismatch,
            "problem: constraint maps must be scalar");
    require(spec.f.input_dim() == G_.output_dim(), Errc::dimension_mismatch,
            "problem: constraint input_dim must equal G.output_dim");
  }
}

FeasibilityVerdict feasibility_from_activations(
    const InverseSetProblem& problem, std::span<const double> activations) {
  require(activations.size() == problem.constraint_count(),
          Errc::dimension_mismatch, "feasibility: wrong activation count");
  FeasibilityVerdict verdict;
  verdict.activations.assign(activations.begin(), activations.end());
  verdict.all_feasible = true;
  for (std::size_t k = 0; k < activations.size(); ++k) {
    const ActivationBand& band = problem.constraints()[k].band;
    double f = activations[k];
    bool ok;
    if (problem.mode() == FeasibilityMode::paper_one_sided)
      ok = band.z2 - f <= band.epsilon();
    else
      ok = band.z1 <= f && f <= band.z2;
    verdict.per_constraint.push_back(ok);
    verdict.all_feasible = verdict.all_feasible && ok;
  }
  return verdict;
}

FeasibilityVerdict is_feasible(const InverseSetProblem& problem,
                               std::span<const double> code) {
  require(code.size() == problem.code_dim(), Errc::dimension_mismatch,
          "is_feasible: code length != G.input_dim");
  Vec x = problem.G().forward(code);
  Vec acts(problem.constraint_count());
  for (std::size_t k = 0; k < acts.size(); ++k)
    acts[k] = problem.constraints()[k].f.forward(x)[0];
  return feasibility_from_activations(problem, acts);
}

bool HalfSpaceRegion::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim) return false;
  double t = shift;
  for (std::size_t i = 0; i < dim; ++i) {
    if (x[i] < -tol || x[i] > 1.0 + tol) return false;
    t += normal[i] * x[i];
  }
  return t >= offset - tol;
}

HalfSpaceRegion analytic_inverse_set_linear_logistic(const Vec& w, double c,
                                                     const ActivationBand& band) {
  require(band.z1 > 0.0 && band.z2 <= 1.0, Errc::band_outside_logistic_range,
          "analytic inverse set requires 0 < z1 < z2 <= 1");
  HalfSpaceRegion region;
  region.normal = w;
  region.shift = c;
  region.offset = std::log(band.z1 / (1.0 - band.z1));
  region.dim = w.size();
  return region;
}

}  // namespace inverseset
