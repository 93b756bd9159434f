#pragma once

#include "polyclt/constraint_model.hpp"

#include <optional>
#include <vector>

namespace polyclt {

/// Rates w of the entropy-maximising product exponential law whose mean 1/w
/// lies in K, together with the dual optimum lambda0 (w = A^t lambda0).
struct Barycenter {
  Vector w;
  Vector lambda0;
  double dual_value = 0.0;
  double centering_residual = 0.0;  // ||A (1/w) - b||_inf
  double gradient_norm = 0.0;       // ||grad H(lambda0)||_inf
  int iterations = 0;
  bool converged = false;
  bool rescaled = false;            // rows were equilibrated before solving
  std::vector<double> dual_trace;   // H at every accepted iterate

  Vector mean() const { return w.cwiseInverse(); }
};

struct BarycenterOptions {
  double tol = 1e-10;
  int max_iter = 200;
  std::optional<Vector> start;  // strictly feasible lambda; defaults to ones
};

/// H(lambda) = -sum_j log((A^t lambda)_j) + <lambda, b>; +inf outside the
/// domain {A^t lambda > 0}.
double dual_value(const ConstraintSystem& cs, const Vector& lambda);

/// -sum_j A_j / (A^t lambda)_j + b. Throws DomainViolation outside the domain.
Vector dual_gradient(const ConstraintSystem& cs, const Vector& lambda);

/// sum_j A_j A_j^t / (A^t lambda)_j^2. Throws DomainViolation outside the domain.
Matrix dual_hessian(const ConstraintSystem& cs, const Vector& lambda);

/// Damped Newton on H from a strictly feasible start. Stops once
/// ||grad||_inf <= tol * max(1, ||b||_inf). Without an explicit start the
/// system must be positive (then lambda = 1 is feasible), else NotPositivized.
/// Running out of iterations does not throw: the best iterate comes back with
/// converged == false.
Barycenter solve_barycenter(const ConstraintSystem& cs, const BarycenterOptions& options = {});

/// As solve_barycenter, but positivizes first when A or b has a nonpositive
/// entry. w does not depend on the representation of K; lambda0 is mapped
/// back so that w = A^t lambda0 for the system as given.
Barycenter barycenter_of(const ConstraintSystem& cs, const BarycenterOptions& options = {});

struct EntropyCertificate {
  std::vector<double> margins;  // -sum log x - sum log w, one per point
  double min_margin = 0.0;
  bool holds = true;            // every margin >= -1e-9
};

/// Checks that 1/w minimises -sum log x_j over the supplied points of K.
/// Throws InfeasiblePoint for points off K or with a nonpositive coordinate.
EntropyCertificate entropy_certificate(const ConstraintSystem& cs, const Barycenter& bc,
                                       const std::vector<Vector>& points,
                                       double feasibility_tol = 1e-8);

}  // namespace polyclt
