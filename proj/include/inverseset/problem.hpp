#pragma once

#include <span>
#include <string>
#include <vector>

#include "inverseset/diffmap.hpp"
#include "inverseset/types.hpp"

namespace inverseset {

/// Permitted activation interval [z1, z2]. epsilon is the band width,
/// epsilon0 = epsilon/2 the interior-targeting shift used by the solver.
struct ActivationBand {
  double z1 = 0.0;
  double z2 = 0.0;
  double epsilon() const { return z2 - z1; }
  double epsilon0() const { return (z2 - z1) / 2.0; }
};

/// Throws DegenerateBand unless z2 > z1 strictly.
ActivationBand band_new(double z1, double z2);

enum class FeasibilityMode { paper_one_sided, strict_two_sided };

const char* feasibility_mode_name(FeasibilityMode m);
FeasibilityMode parse_feasibility_mode(const std::string& name);

struct ConstraintSpec {
  DiffMap f;  // scalar activation map on G's output space
  ActivationBand band;
};

/// A generator G (code -> input space), an encoder E (input space ->
/// encoding space), and p >= 1 banded scalar constraints on G's output.
class InverseSetProblem {
 public:
  InverseSetProblem(DiffMap G, DiffMap E, std::vector<ConstraintSpec> constraints,
                    FeasibilityMode mode);

  const DiffMap& G() const { return G_; }
  const DiffMap& E() const { return E_; }
  const std::vector<ConstraintSpec>& constraints() const { return constraints_; }
  FeasibilityMode mode() const { return mode_; }

  std::size_t code_dim() const { return G_.input_dim(); }
  std::size_t input_dim() const { return G_.output_dim(); }
  std::size_t encoding_dim() const { return E_.output_dim(); }
  std::size_t constraint_count() const { return constraints_.size(); }

 private:
  DiffMap G_;
  DiffMap E_;
  std::vector<ConstraintSpec> constraints_;
  FeasibilityMode mode_;
};

struct FeasibilityVerdict {
  std::vector<bool> per_constraint;
  bool all_feasible = false;
  Vec activations;  // f_k(G(c)) in constraint order
};

/// paper_one_sided: constraint k holds iff z2_k - f_k(G(c)) <= eps_k
/// (equivalently f_k >= z1_k). strict_two_sided: z1_k <= f_k <= z2_k.
FeasibilityVerdict is_feasible(const InverseSetProblem& problem,
                               std::span<const double> code);

/// Like is_feasible, but with the activations already evaluated.
FeasibilityVerdict feasibility_from_activations(const InverseSetProblem& problem,
                                                std::span<const double> activations);

/// Closed-form inverse set of sigma(w'x + c) on the unit hypercube:
/// the half space w'x + c >= logit(z1) intersected with [0,1]^d.
/// Membership is exact for bands with z2 = 1.
struct HalfSpaceRegion {
  Vec normal;     // w
  double shift;   // c
  double offset;  // logit(z1); region is normal'x + shift >= offset
  std::size_t dim;

  bool contains(std::span<const double> x, double tol = 0.0) const;
};

HalfSpaceRegion analytic_inverse_set_linear_logistic(const Vec& w, double c,
                                                     const ActivationBand& band);

}  // namespace inverseset
