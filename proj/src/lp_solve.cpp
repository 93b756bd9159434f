#include "polyclt/constraint_model.hpp"
#include "polyclt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polyclt {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kMinRcond = 1e-13;

enum class PhaseStatus { Optimal, Unbounded };

// Dense revised simplex over the columns [0, allowed) of `a`, minimising
// cost^t x. `basis` must index a feasible basis on entry and holds the final
// basis on exit.
struct Simplex {
  Simplex(const Matrix& a_in, const Vector& b_in, std::vector<Eigen::Index>& basis_in)
      : a(a_in), b(b_in), basis(basis_in) {}

  const Matrix& a;
  const Vector& b;
  std::vector<Eigen::Index>& basis;
  int iterations = 0;
  int max_iterations = 0;

  Vector x_basic;
  Vector dual;
  Vector direction;  // B^{-1} A_q for the last entering column
  Eigen::Index entering = -1;

  Eigen::PartialPivLU<Matrix> factor() const {
    const Eigen::Index m = a.rows();
    Matrix basis_matrix(m, m);
    for (Eigen::Index i = 0; i < m; ++i) basis_matrix.col(i) = a.col(basis[i]);
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    if (!(lu.rcond() > kMinRcond)) {
      throw Error(ErrorCode::SingularBasis,
                  "basis reciprocal condition " + std::to_string(lu.rcond()));
    }
    return lu;
  }

  PhaseStatus run(const Vector& cost, Eigen::Index allowed) {
    const Eigen::Index m = a.rows();
    const double opt_tol = 1e-9 * std::max(1.0, cost.head(allowed).cwiseAbs().maxCoeff());
    std::vector<char> in_basis(a.cols(), 0);
    for (auto j : basis) in_basis[j] = 1;

    for (;;) {
      if (++iterations > max_iterations) {
        throw Error(ErrorCode::NotConverged, "simplex iteration limit reached");
      }
      const auto lu = factor();
      x_basic = lu.solve(b);
      Vector cost_basic(m);
      for (Eigen::Index i = 0; i < m; ++i) cost_basic[i] = cost[basis[i]];
      dual = lu.transpose().solve(cost_basic);

      // Bland: lowest-index column with negative reduced cost enters.
      entering = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (in_basis[j]) continue;
        const double reduced = cost[j] - dual.dot(a.col(j));
        if (reduced < -opt_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return PhaseStatus::Optimal;

      direction = lu.solve(a.col(entering));
      const double scale = std::max(1.0, direction.cwiseAbs().maxCoeff());
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (direction[i] <= kPivotTol * scale) continue;
        const double ratio = std::max(x_basic[i], 0.0) / direction[i];
        const double slack = 1e-12 * std::max(1.0, ratio);
        if (leave < 0 || ratio < best_ratio - slack) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio <= best_ratio + slack && basis[i] < basis[leave]) {
          // Bland tie-break: smallest variable index leaves.
          best_ratio = std::min(ratio, best_ratio);
          leave = i;
        }
      }
      if (leave < 0) return PhaseStatus::Unbounded;
      in_basis[basis[leave]] = 0;
      in_basis[entering] = 1;
      basis[leave] = entering;
    }
  }
};

}  // namespace

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

LpResult lp_solve(const Vector& c, const Matrix& a, const Vector& b, LpSense sense) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "lp_solve: A is " + std::to_string(m) + "x" +
                                                  std::to_string(n) + ", b has " +
                                                  std::to_string(b.size()) + ", c has " +
                                                  std::to_string(c.size()));
  }
  if (m == 0) throw Error(ErrorCode::DimensionMismatch, "lp_solve: no constraints");

  // Flip rows so that b >= 0, then append one artificial column per row.
  Vector sign = Vector::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i)
    if (b[i] < 0) sign[i] = -1.0;
  Matrix aug(m, n + m);
  aug.leftCols(n) = sign.asDiagonal() * a;
  aug.rightCols(m) = Matrix::Identity(m, m);
  const Vector rhs = sign.cwiseProduct(b);

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  Simplex simplex(aug, rhs, basis);
  simplex.max_iterations = static_cast<int>(50 * (n + m) + 1000);

  Vector phase1_cost = Vector::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  simplex.run(phase1_cost, n + m);

  LpResult result;
  double infeasibility = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] >= n) infeasibility += std::max(simplex.x_basic[i], 0.0);
  if (infeasibility > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
    result.status = LpStatus::Infeasible;
    result.iterations = simplex.iterations;
    return result;
  }

  // Pivot remaining (zero-level) artificials out of the basis.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    const auto lu = simplex.factor();
    Vector unit = Vector::Zero(m);
    unit[i] = 1.0;
    const Vector row = lu.transpose().solve(unit);  // row i of B^{-1}
    Eigen::Index pick = -1;
    double best = 1e-9;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      const double entry = std::abs(row.dot(aug.col(j)));
      if (entry > best) {
        best = entry;
        pick = j;
      }
    }
    if (pick < 0) throw Error(ErrorCode::RankDeficient, "lp_solve: A is not of full row rank");
    basis[i] = pick;
  }

  Vector cost = Vector::Zero(n + m);
  cost.head(n) = sense == LpSense::Maximize ? Vector(-c) : c;
  const PhaseStatus status = simplex.run(cost, n);
  result.iterations = simplex.iterations;

  result.x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) result.x[basis[i]] = std::max(simplex.x_basic[i], 0.0);

  if (status == PhaseStatus::Unbounded) {
    result.status = LpStatus::Unbounded;
    result.ray = Vector::Zero(n);
    result.ray[simplex.entering] = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) result.ray[basis[i]] -= simplex.direction[i];
    result.objective = sense == LpSense::Maximize ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
    return result;
  }

  result.status = LpStatus::Optimal;
  result.objective = c.dot(result.x);
  // Undo the row flips; for maximisation the internal problem was min -c.
  result.dual = sign.cwiseProduct(simplex.dual);
  if (sense == LpSense::Maximize) result.dual = -result.dual;
  return result;
}

}  // namespace polyclt
