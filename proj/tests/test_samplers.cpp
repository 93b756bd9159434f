#include "doctest.h"

#include "polyclt/diagnostics.hpp"
#include "polyclt/entropy_center.hpp"
#include "polyclt/error.hpp"
#include "polyclt/samplers.hpp"

#include <cmath>
#include <random>

using namespace polyclt;

namespace {

std::vector<double> column(const Matrix& points, Eigen::Index j) {
  std::vector<double> out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = points(i, j);
  return out;
}

void check_feasible(const ConstraintSystem& cs, const Matrix& points) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector x = points.row(i).transpose();
    REQUIRE(x.minCoeff() >= -1e-12);
    REQUIRE((cs.a() * x - cs.b()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

ReferenceCdf beta1(double k) {
  ReferenceCdf cdf;
  cdf.kind = ReferenceCdf::Kind::Beta1k;
  cdf.k = k;
  return cdf;
}

}  // namespace

TEST_CASE("kernel basis") {
  const Matrix k = kernel_basis(Matrix::Ones(1, 2));
  REQUIRE(k.cols() == 1);
  CHECK(std::abs(k(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(k(0, 0) == doctest::Approx(-k(1, 0)));

  Matrix padded = Matrix::Zero(2, 3);
  padded(0, 0) = 1.0;
  padded(1, 1) = 1.0;
  const Matrix e3 = kernel_basis(padded);
  CHECK(std::abs(e3(2, 0)) == doctest::Approx(1.0));
  CHECK(e3.col(0).head(2).norm() < 1e-15);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Matrix a(2, 6);
  for (auto& x : a.reshaped()) x = normal(rng);
  const Matrix basis = kernel_basis(a);
  CHECK(basis.cols() == 4);
  CHECK((basis.transpose() * basis - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a * basis).cwiseAbs().maxCoeff() < 1e-10);

  Matrix deficient(2, 4);
  deficient << 1, 2, 3, 4, 2, 4, 6, 8;
  try {
    kernel_basis(deficient);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("chord") {
  Vector x(2), d(2);
  x << 0.5, 0.5;
  d << 1.0, -1.0;
  d /= std::sqrt(2.0);
  const auto [lo, hi] = chord(x, d);
  CHECK(lo == doctest::Approx(-std::sqrt(0.5)));
  CHECK(hi == doctest::Approx(std::sqrt(0.5)));
  d << 1.0, 0.0;
  CHECK(std::isinf(chord(x, d).second));
}

TEST_CASE("hit-and-run on the segment") {
  const ConstraintSystem cs(Matrix::Ones(1, 2), Vector::Ones(1));
  HitAndRunOptions opts;
  opts.count = 10000;
  opts.seed = 31;
  const SampleChain chain = hit_and_run(cs, Vector::Constant(2, 0.5), opts);
  CHECK(chain.burn_in == 10);
  CHECK(chain.thin == 1);
  check_feasible(cs, chain.points);
  ReferenceCdf uniform;
  uniform.kind = ReferenceCdf::Kind::Uniform01;
  CHECK(ks_test(column(chain.points, 0), uniform).statistic <= 0.02);
}

TEST_CASE("hit-and-run on the 3-simplex matches Beta(1,2)") {
  const ConstraintSystem cs(Matrix::Ones(1, 3), Vector::Ones(1));
  HitAndRunOptions opts;
  opts.count = 10000;
  opts.seed = 32;
  const SampleChain chain = hit_and_run(cs, Vector::Constant(3, 1.0 / 3.0), opts);
  check_feasible(cs, chain.points);
  CHECK(ks_test(column(chain.points, 0), beta1(2.0)).statistic <= 0.02);
}

TEST_CASE("hit-and-run agrees with the exact simplex sampler") {
  // Single coordinates decorrelate in roughly d^2 steps, so thin at d^2.
  const Eigen::Index n = 8;
  const ConstraintSystem cs(Matrix::Ones(1, n), Vector::Ones(1));
  HitAndRunOptions opts;
  opts.count = 10000;
  opts.thin = (n - 1) * (n - 1);
  opts.seed = 33;
  const SampleChain walk = hit_and_run(cs, Vector::Constant(n, 1.0 / n), opts);
  const SampleChain exact = dirichlet_exact(n, 1.0, 1.0, 10000, 34);
  for (Eigen::Index j : {0, 5}) {
    CHECK(ks_two_sample(column(walk.points, j), column(exact.points, j)).statistic <= 0.03);
  }
}

TEST_CASE("hit-and-run errors and drift control") {
  const ConstraintSystem cs(Matrix::Ones(1, 3), Vector::Ones(1));
  try {
    HitAndRun(cs, Vector::Constant(3, 0.5), 1);
    FAIL("expected StartNotInterior");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StartNotInterior);
  }
  Vector boundary(3);
  boundary << 0.5, 0.5, 0.0;
  CHECK_THROWS_AS(HitAndRun(cs, boundary, 1), Error);

  Matrix open(1, 3);
  open << 1.0, -1.0, 1.0;
  const ConstraintSystem unbounded(open, Vector::Ones(1));
  HitAndRun walker(unbounded, Vector::Ones(3), 2);
  try {
    walker.advance(100);
    FAIL("expected NotCompact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotCompact);
  }

  InstanceRecipe r;
  r.m = 3;
  r.n = 40;
  r.v = Vector::Ones(3);
  r.seed = 8;
  const GeneratedInstance g = random_instance(r);
  const Barycenter bc = solve_barycenter(g.cs);
  HitAndRun long_walk(g.cs, bc.mean(), 3);
  const Vector& x = long_walk.advance(100000);
  CHECK((g.cs.a() * x - g.cs.b()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(long_walk.steps_taken() == 100000);
}

TEST_CASE("exact simplex sampler") {
  const Eigen::Index count = 20000;
  const SampleChain chain = dirichlet_exact(3, 2.0, 3.0, count, 5);
  const ConstraintSystem cs(Matrix::Constant(1, 3, 2.0), Vector::Constant(1, 3.0));
  check_feasible(cs, chain.points);
  const Vector mean = chain.points.colwise().mean().transpose();
  CHECK((mean.array() - 0.5).abs().maxCoeff() < 0.01);  // 1/w = b/(n c)

  const SampleChain unit = dirichlet_exact(3, 1.0, 1.0, count, 6);
  const double hits = static_cast<double>(
      (unit.points.array() <= 0.5).rowwise().all().count());
  const double p = hits / count;
  CHECK(std::abs(p - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / count));

  CHECK(ks_two_sample(column(unit.points, 0), column(unit.points, 1)).p_value > 0.01);
  CHECK_THROWS_AS(dirichlet_exact(3, 0.0, 1.0, 10, 1), Error);
}

TEST_CASE("exponential product sampler") {
  Vector w(3);
  w << 1.0, 2.0, 5.0;
  const Eigen::Index count = 40000;
  const SampleChain chain = exp_product(w, count, 9);
  const Eigen::ArrayXd mean = chain.points.colwise().mean().transpose().array();
  const Eigen::ArrayXd inv = w.cwiseInverse().array();
  CHECK(((mean - inv).abs() <= 3.0 * inv / std::sqrt(count)).all());
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double var = (chain.points.col(j).array() - mean[j]).square().sum() / (count - 1);
    // Var of the sample variance of Exp(rate) is 8 / rate^4 / count.
    CHECK(std::abs(var - inv[j] * inv[j]) <= 3.0 * std::sqrt(8.0 / count) * inv[j] * inv[j]);
  }

  Matrix a(1, 3);
  a << 1.0, 2.0, 5.0;  // A (1/w) = 3
  const double centred = (a * mean.matrix())(0);
  const Vector row = (chain.points * a.transpose());
  const double se = std::sqrt((row.array() - row.mean()).square().sum() / (count - 1) / count);
  CHECK(std::abs(centred - 3.0) <= 3.0 * se);
}

TEST_CASE("determinism and chain layout") {
  InstanceRecipe r;
  r.m = 2;
  r.n = 25;
  r.v = Vector::Ones(2);
  r.seed = 1;
  const GeneratedInstance g = random_instance(r);
  const Barycenter bc = solve_barycenter(g.cs);
  SamplerConfig cfg;
  cfg.count = 301;
  cfg.seed = 77;
  cfg.chains = 4;
  const SampleChain a = draw(g.cs, bc.mean(), bc.w, cfg);
  const SampleChain b = draw(g.cs, bc.mean(), bc.w, cfg);
  CHECK(a.points == b.points);
  cfg.jobs = 3;
  CHECK(draw(g.cs, bc.mean(), bc.w, cfg).points == a.points);
  check_feasible(g.cs, a.points);
  CHECK(a.burn_in == 230);
  CHECK(a.thin == 23);

  cfg.seed = 78;
  CHECK(draw(g.cs, bc.mean(), bc.w, cfg).points != a.points);

  // The first chain of a multi-chain draw is the single chain on stream 0.
  HitAndRunOptions single;
  single.count = 76;
  single.seed = 77;
  CHECK(hit_and_run(g.cs, bc.mean(), single).points == a.points.topRows(76));

  CHECK(dirichlet_exact(10, 1.0, 1.0, 50, 4).points == dirichlet_exact(10, 1.0, 1.0, 50, 4).points);
  CHECK(exp_product(bc.w, 50, 4).points == exp_product(bc.w, 50, 4).points);
}

TEST_CASE("exact sampler requires a symmetric simplex") {
  Matrix a(1, 3);
  a << 1.0, 2.0, 1.0;
  const ConstraintSystem cs(a, Vector::Ones(1));
  SamplerConfig cfg;
  cfg.kind = SamplerKind::DirichletExact;
  CHECK_THROWS_AS(draw(cs, Vector::Constant(3, 0.25), Vector::Ones(3), cfg), Error);
  CHECK(symmetric_simplex_coefficient(ConstraintSystem(Matrix::Constant(1, 4, 3.0), Vector::Ones(1))) == 3.0);
  CHECK_FALSE(symmetric_simplex_coefficient(cs));
}

TEST_CASE("sampler names") {
  for (auto kind : {SamplerKind::HitAndRun, SamplerKind::DirichletExact, SamplerKind::ExpProduct}) {
    CHECK(parse_sampler_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_sampler_kind("gibbs"), Error);
}

TEST_CASE("single-point systems have nothing to sample") {
  const ConstraintSystem point(Matrix::Identity(2, 2), Vector::Ones(2));
  CHECK_THROWS_AS(HitAndRun(point, Vector::Ones(2), 1), Error);
  CHECK(kernel_basis(point.a()).cols() == 0);
}
