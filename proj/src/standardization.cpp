#include "polyclt/standardization.hpp"
#include "polyclt/error.hpp"
#include "polyclt/samplers.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace polyclt {
namespace {

Matrix orthonormal_row_basis(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a.transpose());
  return qr.householderQ() * Matrix::Identity(a.cols(), a.rows());
}

// Distance (Frobenius) from x to the ray {s I : s >= 0} and the foot point s.
std::pair<double, double> ray_distance(const Matrix& x) {
  const double s = std::max(0.0, x.trace() / static_cast<double>(x.rows()));
  return {(x - s * Matrix::Identity(x.rows(), x.cols())).norm(), s};
}

}  // namespace

StandardizedSystem standardize(const ConstraintSystem& cs, const Barycenter& bc) {
  if (bc.w.size() != cs.cols()) throw Error(ErrorCode::DimensionMismatch, "w size");
  if (!(bc.centering_residual <= 1e-8 * std::max(1.0, cs.b().cwiseAbs().maxCoeff()))) {
    throw Error(ErrorCode::NotConverged,
                "barycenter residual " + std::to_string(bc.centering_residual) + " too large");
  }
  StandardizedSystem ss;
  ss.a_tilde = cs.a() * bc.w.cwiseInverse().asDiagonal();
  ss.gram = ss.a_tilde * ss.a_tilde.transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(ss.gram);
  const Vector& ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-14 * ev.maxCoeff())) {
    throw Error(ErrorCode::GramSingular, "Gram eigenvalues span [" + std::to_string(ev.minCoeff()) +
                                             ", " + std::to_string(ev.maxCoeff()) + "]");
  }
  ss.gram_inv_sqrt = eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                     eig.eigenvectors().transpose();
  ss.a_hat = ss.gram_inv_sqrt * ss.a_tilde;
  ss.b_hat = ss.gram_inv_sqrt * cs.b();
  ss.max_entry = ss.a_hat.cwiseAbs().maxCoeff();
  return ss;
}

WeightSpec weight_spec(const StandardizedSystem& ss, const Barycenter& bc, const Vector& lambda) {
  if (lambda.size() != ss.a_hat.cols()) throw Error(ErrorCode::DimensionMismatch, "lambda size");
  if (!lambda.allFinite()) throw Error(ErrorCode::InvalidArgument, "lambda must be finite");
  WeightSpec spec;
  spec.lambda = lambda;
  spec.lambda_hat = lambda.cwiseQuotient(bc.w);
  spec.lambda_hat_norm = spec.lambda_hat.norm();
  spec.max_lambda_hat = spec.lambda_hat.cwiseAbs().maxCoeff();
  spec.sigma_squared_raw =
      spec.lambda_hat.squaredNorm() - (ss.a_hat * spec.lambda_hat).squaredNorm();
  if (spec.sigma_squared_raw < 0.0) {
    spec.clamped = true;
    if (spec.sigma_squared_raw < -1e-12) {
      spdlog::warn("sigma^2 = {} below zero beyond roundoff; clamped", spec.sigma_squared_raw);
    }
  }
  spec.sigma = std::sqrt(std::max(0.0, spec.sigma_squared_raw));
  const Matrix kernel = kernel_basis(ss.a_hat);
  spec.sigma_kernel = (kernel.transpose() * spec.lambda_hat).norm();
  return spec;
}

AssumptionReport assumption_report(const StandardizedSystem& ss,
                                   const std::optional<WeightSpec>& spec, double threshold) {
  AssumptionReport report;
  report.threshold = threshold;
  report.max_entry = ss.max_entry;
  const Eigen::Index n = ss.a_hat.cols();
  report.column_scores.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    report.column_scores[j] = ss.a_hat.col(j).norm();
    if (report.column_scores[j] > threshold) report.flagged.push_back(j);
  }
  if (spec) {
    report.max_lambda_hat = spec->max_lambda_hat;
    report.lambda_hat_norm = spec->lambda_hat_norm;
    report.sigma = spec->sigma;
  }
  return report;
}

double gershgorin_lower_bound(const Matrix& gram) {
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    const double off = gram.row(i).cwiseAbs().sum() - std::abs(gram(i, i));
    bound = std::min(bound, gram(i, i) - off);
  }
  return std::max(0.0, bound);
}

Matrix group_gram(const Matrix& a_hat, const std::vector<Eigen::Index>& group) {
  Matrix g = Matrix::Zero(a_hat.rows(), a_hat.rows());
  for (auto j : group) g.noalias() += a_hat.col(j) * a_hat.col(j).transpose();
  return g;
}

std::optional<ColumnGroups> build_column_groups(const Matrix& a_hat, int groups, double epsilon,
                                                std::uint64_t seed, int attempt) {
  const Eigen::Index m = a_hat.rows();
  const Eigen::Index n = a_hat.cols();
  if (groups < 1 || n < groups * m) return std::nullopt;

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::seed_seq seq{seed, static_cast<std::uint64_t>(attempt)};
  std::mt19937_64 rng(seq);
  if (attempt > 0) std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution keep(0.5);

  std::vector<Matrix> outer(n);
  for (Eigen::Index j = 0; j < n; ++j) outer[j] = a_hat.col(j) * a_hat.col(j).transpose();

  const double target = 1.0 / (groups + 1.0);
  std::vector<char> used(n, 0);
  ColumnGroups result(groups);
  std::vector<Matrix> sums(groups, Matrix::Zero(m, m));

  for (int l = 0; l < groups; ++l) {
    Matrix& sum = sums[l];
    for (;;) {
      auto [dist, level] = ray_distance(sum);
      Eigen::Index best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      bool any_left = false;
      for (auto j : order) {
        if (used[j]) continue;
        any_left = true;
        if (attempt > 0 && !keep(rng)) continue;
        const double d = ray_distance(sum + outer[j]).first;
        if (d < best_dist) {
          best_dist = d;
          best = j;
        }
      }
      if (!any_left) break;
      if (best < 0) continue;  // subsample came up empty; draw again
      if (level >= target && (dist <= epsilon * level || best_dist >= dist)) break;
      used[best] = 1;
      result[l].push_back(best);
      sum += outer[best];
    }
    if (ray_distance(sum).second < target) return std::nullopt;
  }

  for (auto j : order) {
    if (used[j]) continue;
    int weakest = 0;
    double weakest_bound = std::numeric_limits<double>::infinity();
    for (int l = 0; l < groups; ++l) {
      const double bound = gershgorin_lower_bound(sums[l]);
      if (bound < weakest_bound) {
        weakest_bound = bound;
        weakest = l;
      }
    }
    result[weakest].push_back(j);
    sums[weakest] += outer[j];
    used[j] = 1;
  }
  for (auto& group : result) std::sort(group.begin(), group.end());
  return result;
}

PropertyAPartition property_a_partition(const StandardizedSystem& ss, int groups, double epsilon,
                                        const PartitionOptions& options) {
  const Eigen::Index m = ss.a_hat.rows();
  const Eigen::Index n = ss.a_hat.cols();
  if (groups < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  if (n < groups * m) {
    throw Error(ErrorCode::PartitionNotFound, "n = " + std::to_string(n) + " < K m = " +
                                                  std::to_string(groups * m));
  }
  for (int attempt = 0; attempt <= options.restarts; ++attempt) {
    auto subsets = build_column_groups(ss.a_hat, groups, epsilon, options.seed, attempt);
    if (!subsets) continue;
    PropertyAPartition partition;
    partition.groups = groups;
    partition.attempts = attempt + 1;
    bool certified = true;
    for (const auto& group : *subsets) {
      const Matrix g = group_gram(ss.a_hat, group);
      const double bound = gershgorin_lower_bound(g);
      if (!(bound > 0.0)) {
        certified = false;
        break;
      }
      partition.det_lower_bounds.push_back(std::pow(bound, static_cast<double>(m)));
      partition.determinants.push_back(g.determinant());
      const auto [dist, level] = ray_distance(g);
      partition.epsilon_achieved = std::max(partition.epsilon_achieved, dist / level);
    }
    if (!certified) continue;
    partition.subsets = std::move(*subsets);
    return partition;
  }
  throw Error(ErrorCode::PartitionNotFound,
              "no certified partition after " + std::to_string(options.restarts + 1) + " attempts");
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormal_row_basis(a);
  const Matrix qb = orthonormal_row_basis(b);
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  return std::asin(std::min(1.0, s));
}

}  // namespace polyclt
