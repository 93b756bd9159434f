#include "doctest.h"

#include "polyclt/entropy_center.hpp"
#include "polyclt/diagnostics.hpp"
#include "polyclt/error.hpp"
#include "polyclt/samplers.hpp"
#include "polyclt/standardization.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace polyclt;

namespace {

ConstraintSystem simplex(Eigen::Index n) {
  return ConstraintSystem(Matrix::Ones(1, n), Vector::Ones(1));
}

ConstraintSystem two_rows(Eigen::Index n, const std::vector<double>& head) {
  Matrix a = Matrix::Zero(2, n);
  a.row(0).setOnes();
  for (std::size_t j = 0; j < head.size(); ++j) a(1, j) = head[j];
  return ConstraintSystem(a, (Vector(2) << 2.0, 1.0).finished());
}

StandardizedSystem standardized(const ConstraintSystem& cs) {
  return standardize(cs, barycenter_of(cs));
}

}  // namespace

TEST_CASE("simplex standardization") {
  const Eigen::Index n = 25;
  const ConstraintSystem cs = simplex(n);
  const Barycenter bc = solve_barycenter(cs);
  const StandardizedSystem ss = standardize(cs, bc);
  CHECK((ss.a_tilde.array() - 1.0 / n).abs().maxCoeff() < 1e-14);
  CHECK(ss.gram(0, 0) == doctest::Approx(1.0 / n));
  CHECK((ss.a_hat.array() - 1.0 / std::sqrt(n)).abs().maxCoeff() < 1e-14);
  CHECK(ss.b_hat[0] == doctest::Approx(std::sqrt(n)));
  CHECK(standardized(simplex(100)).max_entry == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("two-row example at n = 7") {
  const StandardizedSystem ss = standardized(two_rows(7, {1, 1, 1}));
  // b_hat = A_hat 1 and 1 lies in the row span of A_hat, so ||b_hat|| = sqrt(n) = sqrt(7),
  // not sqrt(2n). Representative (sqrt(n - 3), sqrt(3)).
  CHECK(ss.b_hat.norm() == doctest::Approx(std::sqrt(7.0)).epsilon(1e-10));
  CHECK((ss.b_hat - ss.a_hat * Vector::Ones(7)).norm() < 1e-12);
  Matrix span = Matrix::Zero(2, 7);
  span.row(0).tail(4).setOnes();
  span.row(1).head(3).setOnes();
  CHECK(max_principal_angle(ss.a_hat, span) < 1e-8);
  CHECK((ss.a_hat * ss.a_hat.transpose() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // <eta, b_hat> = sum_j <eta, A_hat_j>
  const Vector eta = (Vector(2) << 0.3, -1.7).finished();
  CHECK(eta.dot(ss.b_hat) == doctest::Approx((ss.a_hat.transpose() * eta).sum()).epsilon(1e-12));

  // Gram-Schmidt representative gives the same ||b_hat||.
  const ConstraintSystem cs = two_rows(7, {1, 1, 1});
  const Barycenter bc = barycenter_of(cs);
  const Matrix a_tilde = cs.a() * bc.w.cwiseInverse().asDiagonal();
  Eigen::HouseholderQR<Matrix> qr(a_tilde.transpose());
  const Matrix r = qr.matrixQR().topRows(2).triangularView<Eigen::Upper>();
  const Vector b_gs = r.transpose().triangularView<Eigen::Lower>().solve(cs.b());
  CHECK(b_gs.norm() == doctest::Approx(ss.b_hat.norm()).epsilon(1e-12));
}

TEST_CASE("assumption report flags") {
  SUBCASE("simplex") {
    const AssumptionReport r = assumption_report(standardized(simplex(100)));
    CHECK(r.max_entry == doctest::Approx(0.1));
    CHECK(r.flagged.empty());
  }
  SUBCASE("first two-row example") {
    // At n = 7 the tail columns still score 0.5; at n = 100 only the head stands out.
    const AssumptionReport r = assumption_report(standardized(two_rows(100, {1, 1, 1})));
    CHECK(r.flagged == std::vector<Eigen::Index>{0, 1, 2});
    CHECK(r.column_scores[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-8));
  }
  SUBCASE("second two-row example") {
    const AssumptionReport r = assumption_report(standardized(two_rows(2000, {1, 2, 3})));
    CHECK(r.flagged == std::vector<Eigen::Index>{2});
  }
  SUBCASE("weights") {
    const ConstraintSystem cs = simplex(10);
    const Barycenter bc = solve_barycenter(cs);
    const StandardizedSystem ss = standardize(cs, bc);
    Vector lambda = Vector::Zero(10);
    lambda[0] = 10.0;
    lambda[1] = -20.0;
    const AssumptionReport r = assumption_report(ss, weight_spec(ss, bc, lambda));
    REQUIRE(r.max_lambda_hat);
    CHECK(*r.max_lambda_hat == doctest::Approx(2.0));
    CHECK(*r.lambda_hat_norm == doctest::Approx(std::sqrt(5.0)));
  }
}

TEST_CASE("weight_spec closed forms") {
  const ConstraintSystem cs = simplex(4);
  const Barycenter bc = solve_barycenter(cs);
  const StandardizedSystem ss = standardize(cs, bc);

  Vector e1 = Vector::Zero(4);
  e1[0] = 1.0;
  const WeightSpec a = weight_spec(ss, bc, e1);
  CHECK(a.lambda_hat[0] == doctest::Approx(0.25));
  CHECK(a.sigma * a.sigma == doctest::Approx(3.0 / 64.0).epsilon(1e-12));
  CHECK(a.sigma_kernel == doctest::Approx(a.sigma).epsilon(1e-12));

  Vector kernel_dir = Vector::Zero(4);
  kernel_dir[0] = 1.0 / std::sqrt(2.0);
  kernel_dir[1] = -1.0 / std::sqrt(2.0);
  const WeightSpec b = weight_spec(ss, bc, bc.w.cwiseProduct(kernel_dir));
  CHECK(b.sigma == doctest::Approx(1.0).epsilon(1e-12));

  const WeightSpec c = weight_spec(ss, bc, bc.w.cwiseProduct(ss.a_hat.row(0).transpose()));
  CHECK(c.sigma < 1e-7);
  CHECK(c.sigma_kernel < 1e-12);

  CHECK_THROWS_AS(weight_spec(ss, bc, Vector::Ones(3)), Error);
}

TEST_CASE("standardization identities on random instances") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 1 + trial % 3;
    const Eigen::Index n = 8 + 11 * trial;
    Matrix a(m, n);
    for (auto& x : a.reshaped()) x = unif(rng);
    const Vector x0 = Vector::NullaryExpr(n, [&](Eigen::Index) { return unif(rng); });
    const ConstraintSystem cs(a, a * x0);
    const Barycenter bc = solve_barycenter(cs);
    const StandardizedSystem ss = standardize(cs, bc);
    CHECK((ss.a_hat * ss.a_hat.transpose() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(max_principal_angle(ss.a_hat, a * bc.w.cwiseInverse().asDiagonal()) < 1e-8);
    const Vector lambda = Vector::NullaryExpr(n, [&](Eigen::Index) { return normal(rng); });
    const WeightSpec spec = weight_spec(ss, bc, lambda);
    CHECK(std::abs(spec.sigma - spec.sigma_kernel) <= 1e-10);

    Matrix mix(m, m);
    for (auto& x : mix.reshaped()) x = normal(rng);
    mix += 2.0 * Matrix::Identity(m, m);
    const ConstraintSystem moved(mix * a, mix * cs.b());
    const Barycenter bc2 = barycenter_of(moved);
    const StandardizedSystem ss2 = standardize(moved, bc2);
    CHECK(std::abs(weight_spec(ss2, bc2, lambda).sigma - spec.sigma) <= 1e-8);
    CHECK(ss2.b_hat.norm() == doctest::Approx(ss.b_hat.norm()).epsilon(1e-8));
  }
}

TEST_CASE("standardize preconditions") {
  const ConstraintSystem cs = simplex(5);
  Barycenter bc = solve_barycenter(cs);
  bc.centering_residual = 1e-3;
  try {
    standardize(cs, bc);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
}

TEST_CASE("Gershgorin bound") {
  Matrix g(2, 2);
  g << 2.0, 0.5, 0.5, 1.0;
  CHECK(gershgorin_lower_bound(g) == doctest::Approx(0.5));
  g << 1.0, 2.0, 2.0, 1.0;
  CHECK(gershgorin_lower_bound(g) == 0.0);
  CHECK(gershgorin_lower_bound(Matrix::Identity(3, 3)) == 1.0);
}

TEST_CASE("Property A partitions") {
  SUBCASE("symmetric simplex") {
    const PropertyAPartition p = property_a_partition(standardized(simplex(30)), 3, 0.05);
    REQUIRE(p.subsets.size() == 3);
    std::set<Eigen::Index> seen;
    for (int l = 0; l < 3; ++l) {
      CHECK(p.subsets[l].size() == 10);
      CHECK(p.determinants[l] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
      seen.insert(p.subsets[l].begin(), p.subsets[l].end());
    }
    CHECK(seen.size() == 30);
  }
  SUBCASE("first two-row example separates the head columns") {
    for (Eigen::Index n : {7, 40, 100}) {
      const PropertyAPartition p = property_a_partition(standardized(two_rows(n, {1, 1, 1})), 3, 0.05);
      REQUIRE(p.subsets.size() == 3);
      for (const auto& group : p.subsets) {
        CHECK(std::count_if(group.begin(), group.end(), [](Eigen::Index j) { return j < 3; }) == 1);
      }
    }
  }
  SUBCASE("certificates are lower bounds") {
    InstanceRecipe r;
    r.m = 3;
    r.n = 120;
    r.v = Vector::Ones(3);
    r.seed = 2;
    const GeneratedInstance g = random_instance(r);
    const StandardizedSystem ss = standardize(g.cs, solve_barycenter(g.cs));
    const PropertyAPartition p = property_a_partition(ss, 4, 0.1);
    std::set<Eigen::Index> seen;
    std::size_t total = 0;
    for (std::size_t l = 0; l < p.subsets.size(); ++l) {
      const double det = group_gram(ss.a_hat, p.subsets[l]).determinant();
      CHECK(p.det_lower_bounds[l] > 0.0);
      CHECK(p.det_lower_bounds[l] <= det * (1.0 + 1e-12));
      CHECK(p.determinants[l] == doctest::Approx(det));
      seen.insert(p.subsets[l].begin(), p.subsets[l].end());
      total += p.subsets[l].size();
    }
    CHECK(seen.size() == total);
  }
  SUBCASE("too many groups") {
    try {
      property_a_partition(standardized(simplex(4)), 5, 0.05);
      FAIL("expected PartitionNotFound");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PartitionNotFound);
    }
  }
}

TEST_CASE("principal angles") {
  Matrix a(1, 3), b(1, 3);
  a << 1, 0, 0;
  b << 1, 1, 0;
  CHECK(max_principal_angle(a, b) == doctest::Approx(M_PI / 4.0));
  CHECK(max_principal_angle(a, 3.0 * a) < 1e-12);
}
