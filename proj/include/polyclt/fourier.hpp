#pragma once

#include "polyclt/constraint_model.hpp"
#include "polyclt/cubature.hpp"
#include "polyclt/entropy_center.hpp"
#include "polyclt/standardization.hpp"

#include <cstdint>

namespace polyclt {

/// log of prod_j e^{-i c_j} / (1 - i c_j): the characteristic function of
/// sum_j c_j (Y_j - 1) for i.i.d. rate-1 exponentials Y_j.
Complex log_product_cf(const Vector& c);
Complex product_cf(const Vector& c);

/// (k-1)! sum_j c_j^k for k >= 2; 0 for k = 1.
double cumulant_sum(const Vector& c, int k);

struct QuadratureOptions {
  double tol = 1e-8;  // absolute, in units of the integral's natural scale (2 pi)^{m/2}
  std::int64_t max_evals = 50'000'000;
  double max_radius = 1e6;
};

struct CfEvaluation {
  Complex value;
  double abs_error_estimate = 0.0;
  std::int64_t quad_points = 0;
  double truncation_radius = 0.0;
  Complex numerator;
  Complex denominator;
};

/// Upper bound on the integral of C prod_j (1 + c_j(eta)^2)^{-1/2} over
/// ||eta|| > radius, with c(eta) = shift + A_hat^t eta. Columns are grouped
/// (see build_column_groups) and each group contributes
/// (1 + (sqrt(mu_l) r - tau_l)_+^2)^{-1/2}, mu_l the smallest eigenvalue of the
/// group Gram and tau_l the norm of the shift on the group.
class TailBound {
 public:
  TailBound(const Matrix& a_hat, const ColumnGroups& groups, const Vector& shift, double log_constant);

  double log_modulus(double r) const;
  /// Tail mass beyond `radius`; +inf when fewer than m + 1 groups are usable.
  double tail(double radius) const;
  /// Smallest radius (to a few percent) with tail <= target, or +inf above max_radius.
  double radius_for(double target, double max_radius) const;
  int usable_groups() const { return static_cast<int>(mu_.size()); }

 private:
  int dim_;
  double log_constant_;
  std::vector<double> mu_;
  std::vector<double> tau_;
};

/// Best truncation radius over several column groupings. log_constants has
/// one entry per column (log of the per-column modulus constant).
double truncation_radius(const Matrix& a_hat, const Vector& shift, const Vector& log_constants,
                         double target, double max_radius);

/// E_{P_n} exp(i t sum_j lambda_hat_j (Y_j - 1)), Y_j = w_j X_j, as a ratio of
/// two integrals over R^m. The Gaussian limit is exp(-t^2 sigma^2 / 2).
/// Throws QuadratureBudgetExceeded or DenominatorTooSmall.
CfEvaluation bartlett_cf(const StandardizedSystem& ss, const WeightSpec& spec, double t,
                         const QuadratureOptions& quad = {});

/// Per-coordinate intervals; hi may be +inf, negative lo is clipped at 0.
struct Box {
  Vector lo;
  Vector hi;
};

/// P_n(box) through the complex mixture representation. The imaginary part
/// of the ratio is folded into the error estimate. Requires that no single
/// column removal reduces rank(A).
CfEvaluation mixture_box_probability(const ConstraintSystem& cs, const Barycenter& bc,
                                     const Box& box, const QuadratureOptions& quad = {});

struct GammaEvaluation {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::int64_t quad_points = 0;
};

/// P_n^gamma(box) for the density exp(-<w,x> - gamma ||Ax - b||^2) on the
/// orthant, by direct cubature. n <= 4 and A > 0 entrywise.
GammaEvaluation gamma_box_probability(const ConstraintSystem& cs, const Barycenter& bc,
                                      double gamma, const Box& box,
                                      const QuadratureOptions& quad = {});

/// (4 pi gamma)^{-1/2} int exp(i eta a - eta^2 / (4 gamma)) d eta by quadrature;
/// equals exp(-gamma a^2).
double hubbard_stratonovich(double a, double gamma, double tol = 1e-12);

}  // namespace polyclt
