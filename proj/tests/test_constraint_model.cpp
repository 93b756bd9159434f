#include "doctest.h"

#include "polyclt/constraint_model.hpp"
#include "polyclt/entropy_center.hpp"
#include "polyclt/error.hpp"
#include "polyclt/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

using namespace polyclt;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index k = 0;
    for (double x : r) m(i, k++) = x;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(xs.size());
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

// Best objective over basic feasible solutions, or nullopt if none exists.
std::optional<double> enumerate_vertices(const Vector& c, const Matrix& a, const Vector& b,
                                         bool maximize) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  std::optional<double> best;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + m, true);
  do {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (pick[j]) cols.push_back(j);
    Matrix basis(m, m);
    for (Eigen::Index k = 0; k < m; ++k) basis.col(k) = a.col(cols[k]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (lu.rank() < m) continue;
    const Vector xb = lu.solve(b);
    if (xb.minCoeff() < -1e-12) continue;
    double value = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) value += c[cols[k]] * xb[k];
    if (!best || (maximize ? value > *best : value < *best)) best = value;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_CASE("lp_solve small cases") {
  const LpResult fixed = lp_solve(vec({1, 1}), mat({{1, 1}}), vec({1}), LpSense::Maximize);
  CHECK(fixed.status == LpStatus::Optimal);
  CHECK(fixed.objective == doctest::Approx(1.0).epsilon(1e-14));

  const LpResult ray = lp_solve(vec({1, 1}), mat({{1, -1}}), vec({0}), LpSense::Maximize);
  REQUIRE(ray.status == LpStatus::Unbounded);
  CHECK((mat({{1, -1}}) * ray.ray).norm() < 1e-12);
  CHECK(ray.ray.minCoeff() >= 0.0);
  CHECK(ray.ray[0] == doctest::Approx(ray.ray[1]));

  for (auto sense : {LpSense::Maximize, LpSense::Minimize}) {
    CHECK(lp_solve(vec({1, 0}), mat({{1, 1}}), vec({-1}), sense).status == LpStatus::Infeasible);
  }
}

TEST_CASE("lp_solve dimension checks") {
  CHECK(code_of([] { lp_solve(vec({1, 1, 1}), mat({{1, 1}}), vec({1}), LpSense::Maximize); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] { lp_solve(vec({1, 1}), mat({{1, 1}}), vec({1, 2}), LpSense::Maximize); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("lp_solve agrees with vertex enumeration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> entry(-1.0, 2.0);
  std::uniform_int_distribution<int> pick_m(1, 3);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = pick_m(rng);
    const int n = std::uniform_int_distribution<int>(m + 1, 6)(rng);
    Matrix a(m, n);
    for (auto& x : a.reshaped()) x = entry(rng);
    a.row(0) = a.row(0).cwiseAbs().array() + 0.1;  // keeps K bounded
    Vector b(m);
    for (auto& x : b) x = entry(rng);
    b[0] = std::abs(b[0]) + 0.5;
    Vector c(n);
    for (auto& x : c) x = entry(rng);
    for (auto sense : {LpSense::Maximize, LpSense::Minimize}) {
      const LpResult lp = lp_solve(c, a, b, sense);
      const auto oracle = enumerate_vertices(c, a, b, sense == LpSense::Maximize);
      if (!oracle) {
        CHECK(lp.status == LpStatus::Infeasible);
        ++infeasible;
        continue;
      }
      REQUIRE(lp.status == LpStatus::Optimal);
      CHECK(std::abs(lp.objective - *oracle) <= 1e-9 * std::max(1.0, std::abs(*oracle)));
      CHECK((a * lp.x - b).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(lp.x.minCoeff() >= -1e-12);
      // Dual feasibility and a zero duality gap certify optimality.
      const Vector reduced = c - a.transpose() * lp.dual;
      if (sense == LpSense::Maximize) {
        CHECK(reduced.maxCoeff() <= 1e-9);
      } else {
        CHECK(reduced.minCoeff() >= -1e-9);
      }
      CHECK(lp.dual.dot(b) == doctest::Approx(lp.objective).epsilon(1e-9));
      ++optimal;
    }
  }
  CHECK(optimal > 300);
  CHECK(infeasible > 0);
}

TEST_CASE("constraint system construction") {
  CHECK(code_of([] { ConstraintSystem(mat({{1, 0}, {0, 1}, {1, 1}}), vec({1, 1, 2})); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { ConstraintSystem(mat({{1, 1, 1}}), vec({1, 2})); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] {
          ConstraintSystem(mat({{1, std::numeric_limits<double>::quiet_NaN()}}), vec({1}));
        }) == ErrorCode::InvalidArgument);
  CHECK(ConstraintSystem(mat({{1, 2}}), vec({1})).is_positive());
  CHECK_FALSE(ConstraintSystem(mat({{1, 0}}), vec({1})).is_positive());
}

TEST_CASE("validate flags") {
  SUBCASE("segment") {
    const ValidationReport r = validate(ConstraintSystem(mat({{1, 1}}), vec({1})));
    CHECK(r.rank_ok);
    CHECK(r.feasible);
    CHECK(r.compact);
    CHECK(r.interior_nonempty);
    CHECK(r.column_removal_safe);
    CHECK(r.ok());
    CHECK(r.interior_margin == doctest::Approx(0.5));
  }
  SUBCASE("single point") {
    const ValidationReport r = validate(ConstraintSystem(mat({{1, 0}, {0, 1}}), vec({1, 1})));
    CHECK(r.compact);
    CHECK_FALSE(r.column_removal_safe);
    CHECK(r.columns[0].removal_reduces_rank);
    CHECK(r.columns[1].removal_reduces_rank);
  }
  SUBCASE("fixed coordinate") {
    // x1 = 1 on K, so dropping column 1 loses rank.
    const ValidationReport r = validate(ConstraintSystem(mat({{1, 0, 0}, {0, 1, 1}}), vec({1, 1})));
    CHECK(r.compact);
    CHECK(r.interior_nonempty);
    CHECK_FALSE(r.column_removal_safe);
    CHECK(r.columns[0].removal_reduces_rank);
    CHECK_FALSE(r.columns[1].removal_reduces_rank);
  }
  SUBCASE("recession direction") {
    const ValidationReport r = validate(ConstraintSystem(mat({{1, -1}}), vec({0})));
    CHECK_FALSE(r.compact);
    CHECK_FALSE(r.ok());
  }
  SUBCASE("empty") {
    const ValidationReport r = validate(ConstraintSystem(mat({{1, 1}}), vec({-1})));
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.interior_nonempty);
  }
  SUBCASE("face only") {
    const ValidationReport r =
        validate(ConstraintSystem(mat({{1, 1, 1}, {1, 1, 0}}), vec({1, 0})));
    CHECK(r.compact);
    CHECK(r.feasible);
    CHECK_FALSE(r.interior_nonempty);
  }
  SUBCASE("rank deficient") {
    const ValidationReport r = validate(ConstraintSystem(mat({{1, 1, 1}, {2, 2, 2}}), vec({1, 2})));
    CHECK_FALSE(r.rank_ok);
    CHECK(r.rank == 1);
  }
}

TEST_CASE("column_removal_safe matches coordinate ranges") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> entry(0.2, 1.5);
  int unsafe = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + trial % 3;
    const int n = std::uniform_int_distribution<int>(m + 1, 8)(rng);
    Matrix a(m, n);
    for (auto& x : a.reshaped()) x = entry(rng);
    if (m > 1 && trial % 2 == 0) {
      // Pin x_0 with a constraint that only sees it.
      a.row(m - 1).setZero();
      a(m - 1, 0) = 1.0;
    }
    const Vector x0 = Vector::NullaryExpr(n, [&](Eigen::Index) { return entry(rng); });
    const ConstraintSystem cs(a, a * x0);
    const ValidationReport r = validate(cs);
    REQUIRE(r.ok());
    bool all_move = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto [lo, hi] = coordinate_range(cs, j);
      all_move = all_move && hi - lo > 1e-9;
    }
    CHECK(r.column_removal_safe == all_move);
    unsafe += !all_move;
  }
  CHECK(unsafe > 0);
}

TEST_CASE("positivize examples") {
  SUBCASE("sign flip") {
    const ConstraintSystem p = positivize(ConstraintSystem(mat({{-1, -1}}), vec({-1})));
    CHECK(p.a().isApprox(mat({{1, 1}})));
    CHECK(p.b().isApprox(vec({1})));
  }
  SUBCASE("hand-solved dual") {
    const ConstraintSystem p = positivize(ConstraintSystem(mat({{1, -1}, {0, 1}}), vec({0, 1})));
    CHECK(p.a().isApprox(mat({{1, 1}, {1, 2}}), 1e-12));
    CHECK(p.b().isApprox(vec({2, 3}), 1e-12));
    CHECK((p.a() * vec({1, 1}) - p.b()).norm() < 1e-12);
  }
  SUBCASE("already positive") {
    const ConstraintSystem cs(mat({{1, 2, 3}, {3, 1, 1}}), vec({2, 2}));
    const ConstraintSystem p = positivize(cs);
    CHECK(p.a() == cs.a());
    CHECK(p.b() == cs.b());
  }
  SUBCASE("failures") {
    CHECK(code_of([] { positivize(ConstraintSystem(mat({{1, -1}}), vec({0}))); }) ==
          ErrorCode::NotCompact);
    CHECK(code_of([] { positivize(ConstraintSystem(mat({{1, 1, 1}, {1, 1, -1}}), vec({1, -1}))); }) ==
          ErrorCode::EmptyInterior);
  }
}

TEST_CASE("positivize preserves K on random mixed-sign systems") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3;
    const int n = m + 4 + trial % 5;
    Matrix pos(m, n);
    for (auto& x : pos.reshaped()) x = unif(rng);
    const Vector x0 = Vector::NullaryExpr(n, [&](Eigen::Index) { return unif(rng); });
    Matrix mix(m, m);
    for (auto& x : mix.reshaped()) x = normal(rng);
    mix += 0.5 * Matrix::Identity(m, m);
    const ConstraintSystem cs(mix * pos, mix * pos * x0);
    const ConstraintSystem p = positivize(cs);
    CHECK(p.a().minCoeff() > 0.0);
    CHECK(p.b().minCoeff() > 0.0);

    // Points of the original K satisfy the new equations.
    const Barycenter bc = barycenter_of(cs);
    HitAndRun walker(cs, bc.mean(), 99, trial);
    for (int k = 0; k < 100; ++k) {
      const Vector& x = walker.advance(n);
      CHECK((p.a() * x - p.b()).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, p.b().maxCoeff()));
    }
  }
}

TEST_CASE("coordinate_range") {
  const ConstraintSystem cs(mat({{1, 1, 1}, {1, 0, 0}}), vec({1, 0.25}));
  const auto [lo0, hi0] = coordinate_range(cs, 0);
  CHECK(lo0 == doctest::Approx(0.25));
  CHECK(hi0 == doctest::Approx(0.25));
  const auto [lo1, hi1] = coordinate_range(cs, 1);
  CHECK(lo1 == doctest::Approx(0.0));
  CHECK(hi1 == doctest::Approx(0.75));
}
