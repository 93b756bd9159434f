#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace polyclt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// The polytope K = {x >= 0 : A x = b} with m equality constraints on n > m
/// nonnegative variables.
class ConstraintSystem {
 public:
  /// Throws InvalidArgument for m >= n and DimensionMismatch when b does not
  /// have one entry per row of A. Rank and compactness are left to validate().
  ConstraintSystem(Matrix a, Vector b);

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  Eigen::Index rows() const noexcept { return a_.rows(); }
  Eigen::Index cols() const noexcept { return a_.cols(); }

  /// True when every entry of A and b is strictly positive.
  bool is_positive() const;

 private:
  Matrix a_;
  Vector b_;
};

// ---------------------------------------------------------------------------
// Linear programming

enum class LpSense { Maximize, Minimize };
enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;          // primal point (Optimal) or last basic point (Unbounded)
  double objective = 0.0;
  Vector dual;       // y with A^t y <= c (max) / >= c (min) at optimality
  Vector ray;        // recession direction when Unbounded: A ray = 0, ray >= 0
  int iterations = 0;
};

/// Revised simplex on {A x = b, x >= 0} with Bland's anti-cycling rule.
/// Dense and meant for small problems. A numerically singular basis raises
/// SingularBasis instead of being patched up.
LpResult lp_solve(const Vector& c, const Matrix& a, const Vector& b, LpSense sense);

std::string to_string(LpStatus status);

// ---------------------------------------------------------------------------
// Validation

struct ColumnNote {
  Eigen::Index column = 0;
  bool removal_reduces_rank = false;
};

struct ValidationReport {
  bool rank_ok = false;
  bool feasible = false;
  bool compact = false;
  bool interior_nonempty = false;
  bool column_removal_safe = false;
  Eigen::Index rank = 0;
  double interior_margin = 0.0;  // optimal t of max{t : Ax = b, x_j >= t}
  double interior_tolerance = 1e-12;
  std::vector<ColumnNote> columns;
  std::vector<std::string> notes;

  bool ok() const { return rank_ok && compact && interior_nonempty; }
};

Eigen::Index numerical_rank(const Matrix& a);

ValidationReport validate(const ConstraintSystem& cs);

/// Range of coordinate j over K, each end computed by lp_solve. Requires a
/// nonempty compact K.
std::pair<double, double> coordinate_range(const ConstraintSystem& cs, Eigen::Index j);

/// Returns an equivalent representation (M A, M b), M invertible, whose
/// entries are all strictly positive. Already positive systems come back
/// unchanged. Throws NotCompact or EmptyInterior.
ConstraintSystem positivize(const ConstraintSystem& cs);

}  // namespace polyclt
