#pragma once

#include "polyclt/constraint_model.hpp"
#include "polyclt/entropy_center.hpp"
#include "polyclt/samplers.hpp"
#include "polyclt/standardization.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace polyclt {

/// Reference law for KS tests, optionally relocated: F((x - loc) / scale).
struct ReferenceCdf {
  enum class Kind { StdNormal, Exp1, Uniform01, Beta1k };
  Kind kind = Kind::StdNormal;
  double k = 1.0;  // second Beta parameter
  double loc = 0.0;
  double scale = 1.0;

  double operator()(double x) const;
  std::string name() const;
  /// "std_normal", "exp1", "uniform01" or "beta(1,k)".
  static ReferenceCdf parse(const std::string& text);
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Eigen::Index sample_size = 0;
};

/// Exact one-sample sup distance; no minimum sample size.
double ks_statistic(std::vector<double> samples, const ReferenceCdf& cdf);
/// P(sup |B| > lambda) for the Brownian bridge, 20 series terms.
double kolmogorov_pvalue(double lambda);
/// Throws TooFewSamples below 10 samples.
KsResult ks_test(const std::vector<double>& samples, const ReferenceCdf& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Moments with batch-means standard errors (25 batches).
struct MomentReport {
  Eigen::Index count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
};

MomentReport moment_report(const std::vector<double>& values);

struct CltReport {
  KsResult ks;
  double sigma = 0.0;
  double mean_shift = 0.0;  // empirical mean of S / sigma
  MomentReport moments;
  std::vector<double> values;  // S / sigma per draw
};

/// S = sum_j lambda_j (X_j - 1/w_j) / sigma over sampled points of K, tested
/// against N(0, 1). Throws SigmaZero when sigma vanishes.
CltReport clt_experiment(const ConstraintSystem& cs, const Barycenter& bc, const Vector& lambda,
                         const SamplerConfig& cfg);

/// Same statistics from stored points (one per row).
CltReport clt_report(const ConstraintSystem& cs, const Barycenter& bc, const Vector& lambda,
                     const Matrix& points);

struct MarginalReport {
  std::vector<Eigen::Index> coords;
  std::vector<KsResult> ks;  // w_j X_j against Exp(1)
  Matrix correlation;        // between the rescaled coordinates
  Matrix values;             // count x coords.size()
};

MarginalReport marginal_experiment(const ConstraintSystem& cs, const Barycenter& bc,
                                   const std::vector<Eigen::Index>& coords,
                                   const SamplerConfig& cfg);

MarginalReport marginal_report(const Barycenter& bc, const std::vector<Eigen::Index>& coords,
                               const Matrix& points);

/// Law of one column of A: uniform on [lo, hi]^m, or uniform over a finite
/// set of atoms (columns of `atoms`).
struct ColumnLaw {
  enum class Kind { Box, Atoms };
  Kind kind = Kind::Box;
  double lo = 1.0;
  double hi = 2.0;
  Matrix atoms;

  /// "box:lo,hi" or "points:a1,a2;b1,b2;..." (one atom per ';').
  static ColumnLaw parse(const std::string& text, Eigen::Index m);
  std::string describe() const;
};

struct InstanceRecipe {
  Eigen::Index m = 1;
  Eigen::Index n = 10;
  ColumnLaw law;
  Vector v;
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  ConstraintSystem cs;
  Vector exact_lambda0;  // n v
};

/// i.i.d. columns with b = (1/n) sum_j A_j / <v, A_j>, so that the dual
/// optimum is exactly n v. Throws SupportViolation when <v, u> <= 0 somewhere
/// on the support or the support does not span R^m.
GeneratedInstance random_instance(const InstanceRecipe& recipe);

}  // namespace polyclt
