#include "polyclt/constraint_model.hpp"
#include "polyclt/error.hpp"

#include <cmath>
#include <limits>

namespace polyclt {
namespace {

constexpr double kInteriorTol = 1e-12;
constexpr double kPositiveTol = 1e-12;

Matrix drop_column(const Matrix& a, Eigen::Index j) {
  Matrix out(a.rows(), a.cols() - 1);
  out.leftCols(j) = a.leftCols(j);
  out.rightCols(a.cols() - j - 1) = a.rightCols(a.cols() - j - 1);
  return out;
}

// Smallest integer k >= 0 with value + k * step > kPositiveTol (step > 0).
double lift_multiplier(double value, double step) {
  if (value > kPositiveTol) return 0.0;
  return std::floor((kPositiveTol - value) / step) + 1.0;
}

}  // namespace

ConstraintSystem::ConstraintSystem(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "A has " + std::to_string(a_.rows()) +
                                                  " rows but b has " +
                                                  std::to_string(b_.size()) + " entries");
  }
  if (a_.rows() < 1) throw Error(ErrorCode::InvalidArgument, "at least one constraint required");
  // m = n is allowed so that single-point systems can be validated and reported.
  if (a_.rows() > a_.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "more constraints than variables (m=" + std::to_string(a_.rows()) +
                    ", n=" + std::to_string(a_.cols()) + ")");
  }
  if (!a_.allFinite() || !b_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "A and b must be finite");
  }
}

bool ConstraintSystem::is_positive() const {
  return (a_.array() > 0.0).all() && (b_.array() > 0.0).all();
}

Eigen::Index numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-10);
  return qr.rank();
}

ValidationReport validate(const ConstraintSystem& cs) {
  const Matrix& a = cs.a();
  const Eigen::Index m = cs.rows();
  const Eigen::Index n = cs.cols();

  ValidationReport report;
  report.interior_tolerance = kInteriorTol;
  report.rank = numerical_rank(a);
  report.rank_ok = report.rank == m;

  report.column_removal_safe = report.rank_ok;
  for (Eigen::Index j = 0; j < n; ++j) {
    ColumnNote note{j, numerical_rank(drop_column(a, j)) < report.rank};
    if (note.removal_reduces_rank) report.column_removal_safe = false;
    report.columns.push_back(note);
  }

  if (!report.rank_ok) {
    report.notes.push_back("A is rank deficient; LP-based checks skipped");
    return report;
  }

  const LpResult total = lp_solve(Vector::Ones(n), a, cs.b(), LpSense::Maximize);
  report.feasible = total.status != LpStatus::Infeasible;
  report.compact = total.status != LpStatus::Unbounded;
  if (!report.feasible) {
    report.notes.push_back("K is empty");
    return report;
  }
  if (!report.compact) report.notes.push_back("K has a recession direction");

  // max t s.t. A y + (A 1) t = b, y >= 0, with x = y + t 1 and t split in +/- parts.
  Matrix margin_a(m, n + 2);
  margin_a.leftCols(n) = a;
  margin_a.col(n) = a.rowwise().sum();
  margin_a.col(n + 1) = -margin_a.col(n);
  Vector margin_c = Vector::Zero(n + 2);
  margin_c[n] = 1.0;
  margin_c[n + 1] = -1.0;
  const LpResult margin = lp_solve(margin_c, margin_a, cs.b(), LpSense::Maximize);
  if (margin.status == LpStatus::Unbounded) {
    report.interior_margin = std::numeric_limits<double>::infinity();
  } else if (margin.status == LpStatus::Optimal) {
    report.interior_margin = margin.objective;
  } else {
    report.interior_margin = -std::numeric_limits<double>::infinity();
  }
  report.interior_nonempty = report.interior_margin > kInteriorTol;
  if (!report.interior_nonempty) report.notes.push_back("no strictly positive feasible point");
  if (!report.column_removal_safe) {
    report.notes.push_back("some column carries a constraint alone (a coordinate is constant on K)");
  }
  return report;
}

std::pair<double, double> coordinate_range(const ConstraintSystem& cs, Eigen::Index j) {
  Vector e = Vector::Zero(cs.cols());
  e[j] = 1.0;
  const LpResult lo = lp_solve(e, cs.a(), cs.b(), LpSense::Minimize);
  const LpResult hi = lp_solve(e, cs.a(), cs.b(), LpSense::Maximize);
  if (lo.status == LpStatus::Infeasible) throw Error(ErrorCode::EmptyInterior, "K is empty");
  if (hi.status != LpStatus::Optimal) throw Error(ErrorCode::NotCompact, "coordinate unbounded");
  return {lo.objective, hi.objective};
}

ConstraintSystem positivize(const ConstraintSystem& cs) {
  if (cs.is_positive()) return cs;

  const ValidationReport report = validate(cs);
  if (!report.rank_ok) throw Error(ErrorCode::RankDeficient, "A is rank deficient");
  if (!report.compact) throw Error(ErrorCode::NotCompact, "K is unbounded");
  if (!report.feasible || !report.interior_nonempty) {
    throw Error(ErrorCode::EmptyInterior, "K has no strictly positive point");
  }

  const Matrix& a = cs.a();
  const Eigen::Index m = cs.rows();
  const Eigen::Index n = cs.cols();

  // The optimal dual of max 1^t x over K solves min y^t b s.t. y^t A >= 1.
  const LpResult lp = lp_solve(Vector::Ones(n), a, cs.b(), LpSense::Maximize);
  const Vector& y = lp.dual;
  const Vector lifted_row = a.transpose() * y;
  const double lifted_rhs = y.dot(cs.b());
  if (lifted_row.minCoeff() < 1.0 - 1e-8 || !(lifted_rhs > 0.0)) {
    throw Error(ErrorCode::NotConverged, "dual certificate y^t A >= 1 not satisfied");
  }

  Eigen::Index replaced = 0;
  const double y_scale = y.cwiseAbs().maxCoeff();
  while (std::abs(y[replaced]) <= 1e-9 * y_scale) ++replaced;

  Matrix out_a = a;
  Vector out_b = cs.b();
  out_a.row(replaced) = lifted_row.transpose();
  out_b[replaced] = lifted_rhs;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i == replaced) continue;
    double k = lift_multiplier(out_b[i], lifted_rhs);
    for (Eigen::Index j = 0; j < n; ++j) k = std::max(k, lift_multiplier(a(i, j), lifted_row[j]));
    if (k > 0.0) {
      out_a.row(i) += k * lifted_row.transpose();
      out_b[i] += k * lifted_rhs;
    }
  }
  return ConstraintSystem(std::move(out_a), std::move(out_b));
}

}  // namespace polyclt
