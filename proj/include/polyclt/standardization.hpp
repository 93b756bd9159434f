#pragma once

#include "polyclt/constraint_model.hpp"
#include "polyclt/entropy_center.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace polyclt {

/// Constraint matrix rescaled to unit entropy centre (A_tilde = A / w columnwise)
/// and decorrelated (A_hat = (A_tilde A_tilde^t)^{-1/2} A_tilde, so that
/// A_hat A_hat^t = I).
struct StandardizedSystem {
  Matrix a_tilde;
  Matrix a_hat;
  Vector b_hat;
  Matrix gram;            // A_tilde A_tilde^t
  Matrix gram_inv_sqrt;   // symmetric inverse square root of gram
  double max_entry = 0.0; // max |A_hat_ij|
};

/// Requires bc.centering_residual <= 1e-8 * max(1, ||b||_inf) (NotConverged otherwise).
/// Throws GramSingular when the smallest Gram eigenvalue is <= 1e-14 * largest.
StandardizedSystem standardize(const ConstraintSystem& cs, const Barycenter& bc);

struct WeightSpec {
  Vector lambda;
  Vector lambda_hat;          // lambda_j / w_j
  double sigma = 0.0;         // sqrt(||lambda_hat||^2 - ||A_hat lambda_hat||^2), clamped at 0
  double sigma_kernel = 0.0;  // ||P_ker(A_hat) lambda_hat|| through an explicit kernel basis
  double sigma_squared_raw = 0.0;
  bool clamped = false;
  double max_lambda_hat = 0.0;
  double lambda_hat_norm = 0.0;
};

WeightSpec weight_spec(const StandardizedSystem& ss, const Barycenter& bc, const Vector& lambda);

struct AssumptionReport {
  double max_entry = 0.0;
  double threshold = 0.2;
  std::vector<double> column_scores;  // ||A_hat_{.j}||
  std::vector<Eigen::Index> flagged;  // columns with score > threshold
  std::optional<double> max_lambda_hat;
  std::optional<double> lambda_hat_norm;
  std::optional<double> sigma;
};

AssumptionReport assumption_report(const StandardizedSystem& ss,
                                   const std::optional<WeightSpec>& spec = std::nullopt,
                                   double threshold = 0.2);

using ColumnGroups = std::vector<std::vector<Eigen::Index>>;

/// Greedy rearrangement: each group collects unused columns whose outer
/// products A_hat_j A_hat_j^t keep the partial sum closest to the ray
/// {s I : s >= 0}, until the sum reaches trace/m >= 1/(K+1) and lies within
/// relative distance epsilon of the ray (or stops improving). Leftover
/// columns then go to the group with the weakest Gershgorin bound.
/// attempt 0 is deterministic; later attempts shuffle and subsample the
/// candidates. Returns nullopt when some group cannot reach its target.
std::optional<ColumnGroups> build_column_groups(const Matrix& a_hat, int groups, double epsilon,
                                                std::uint64_t seed, int attempt);

/// max(0, min_i (G_ii - sum_{k != i} |G_ik|)) for G = A_I A_I^t.
double gershgorin_lower_bound(const Matrix& gram);

Matrix group_gram(const Matrix& a_hat, const std::vector<Eigen::Index>& group);

struct PropertyAPartition {
  int groups = 0;
  ColumnGroups subsets;
  std::vector<double> det_lower_bounds;  // (Gershgorin bound)^m, certified
  std::vector<double> determinants;      // det(A_I A_I^t) as computed
  double epsilon_achieved = 0.0;         // max relative distance of a group Gram to the ray
  int attempts = 0;
};

struct PartitionOptions {
  int restarts = 32;
  std::uint64_t seed = 1;
};

/// Searches for K disjoint column subsets whose Gram determinants are bounded
/// below by a Gershgorin certificate. Throws PartitionNotFound when n < K m
/// or no attempt certifies; that is a search failure, not a disproof.
PropertyAPartition property_a_partition(const StandardizedSystem& ss, int groups, double epsilon,
                                        const PartitionOptions& options = {});

/// Largest principal angle (radians) between the row spaces of two matrices.
double max_principal_angle(const Matrix& a, const Matrix& b);

}  // namespace polyclt
