#include "polyclt/diagnostics.hpp"
#include "polyclt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace polyclt {

double ReferenceCdf::operator()(double x) const {
  const double z = (x - loc) / scale;
  switch (kind) {
    case Kind::StdNormal: return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    case Kind::Exp1: return z <= 0.0 ? 0.0 : -std::expm1(-z);
    case Kind::Uniform01: return std::clamp(z, 0.0, 1.0);
    case Kind::Beta1k:
      if (z <= 0.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return -std::expm1(k * std::log1p(-z));
  }
  return 0.0;
}

std::string ReferenceCdf::name() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::StdNormal: out << "std_normal"; break;
    case Kind::Exp1: out << "exp1"; break;
    case Kind::Uniform01: out << "uniform01"; break;
    case Kind::Beta1k: out << "beta(1," << k << ")"; break;
  }
  if (loc != 0.0 || scale != 1.0) out << " loc=" << loc << " scale=" << scale;
  return out.str();
}

ReferenceCdf ReferenceCdf::parse(const std::string& text) {
  ReferenceCdf ref;
  if (text == "std_normal" || text == "normal") {
    ref.kind = Kind::StdNormal;
  } else if (text == "exp1") {
    ref.kind = Kind::Exp1;
  } else if (text == "uniform01") {
    ref.kind = Kind::Uniform01;
  } else if (text.rfind("beta(1,", 0) == 0 && text.back() == ')') {
    ref.kind = Kind::Beta1k;
    try {
      ref.k = std::stod(text.substr(7, text.size() - 8));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad Beta parameter in '" + text + "'");
    }
    if (!(ref.k > 0.0)) throw Error(ErrorCode::InvalidArgument, "Beta parameter must be > 0");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown reference law '" + text + "'");
  }
  return ref;
}

double ks_statistic(std::vector<double> samples, const ReferenceCdf& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double kolmogorov_pvalue(double lambda) {
  if (lambda < 0.2) return 1.0;  // the alternating series is useless here; Q > 0.99999
  double sum = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(const std::vector<double>& samples, const ReferenceCdf& cdf) {
  if (samples.size() < 10) {
    throw Error(ErrorCode::TooFewSamples,
                "KS test needs at least 10 samples, got " + std::to_string(samples.size()));
  }
  KsResult r;
  r.sample_size = static_cast<Eigen::Index>(samples.size());
  r.statistic = ks_statistic(samples, cdf);
  r.p_value = kolmogorov_pvalue(std::sqrt(static_cast<double>(samples.size())) * r.statistic);
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 10 || b.size() < 10) {
    throw Error(ErrorCode::TooFewSamples, "two-sample KS needs at least 10 samples per side");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  KsResult r;
  r.statistic = d;
  r.sample_size = static_cast<Eigen::Index>(std::min(a.size(), b.size()));
  r.p_value = kolmogorov_pvalue(std::sqrt(na * nb / (na + nb)) * d);
  return r;
}

namespace {

struct Moments {
  double mean = 0.0, variance = 0.0, skewness = 0.0, kurtosis = 0.0;
};

Moments moments_of(const double* x, std::size_t n) {
  Moments m;
  if (n == 0) return m;
  m.mean = std::accumulate(x, x + n, 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = n > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double spread(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (v.size() - 1.0) / v.size());
}

}  // namespace

MomentReport moment_report(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::TooFewSamples, "moment report of an empty chain");
  MomentReport r;
  r.count = static_cast<Eigen::Index>(values.size());
  const Moments all = moments_of(values.data(), values.size());
  r.mean = all.mean;
  r.variance = all.variance;
  r.skewness = all.skewness;
  r.excess_kurtosis = all.kurtosis;

  const std::size_t batches = std::min<std::size_t>(25, values.size());
  const std::size_t size = values.size() / batches;
  std::vector<double> means, variances, skews, kurts;
  for (std::size_t k = 0; k < batches; ++k) {
    const Moments b = moments_of(values.data() + k * size, size);
    means.push_back(b.mean);
    variances.push_back(b.variance);
    skews.push_back(b.skewness);
    kurts.push_back(b.kurtosis);
  }
  r.se_mean = spread(means);
  r.se_variance = spread(variances);
  r.se_skewness = spread(skews);
  r.se_kurtosis = spread(kurts);
  return r;
}

namespace {

struct CltSetup {
  Vector lambda;
  Vector centre;
  double sigma = 0.0;

  double operator()(const Vector& x) const { return lambda.dot(x - centre) / sigma; }
};

CltSetup clt_setup(const ConstraintSystem& cs, const Barycenter& bc, const Vector& lambda) {
  const StandardizedSystem ss = standardize(cs, bc);
  const WeightSpec spec = weight_spec(ss, bc, lambda);
  // The kernel projection avoids the cancellation in ||l||^2 - ||A l||^2.
  if (!(spec.sigma_kernel > 1e-10 * std::max(1.0, spec.lambda_hat_norm))) {
    throw Error(ErrorCode::SigmaZero, "lambda_hat is orthogonal to ker A_hat; sigma = 0");
  }
  return {lambda, bc.mean(), spec.sigma};
}

CltReport finish_clt(double sigma, std::vector<double> values) {
  CltReport report;
  report.sigma = sigma;
  report.values = std::move(values);
  report.ks = ks_test(report.values, ReferenceCdf{});
  report.moments = moment_report(report.values);
  report.mean_shift = report.moments.mean;
  return report;
}

void check_coords(const std::vector<Eigen::Index>& coords, Eigen::Index n) {
  if (coords.empty()) throw Error(ErrorCode::InvalidArgument, "no coordinates requested");
  for (auto j : coords) {
    if (j < 0 || j >= n) {
      throw Error(ErrorCode::InvalidArgument, "coordinate " + std::to_string(j) + " out of range");
    }
  }
}

MarginalReport finish_marginal(const std::vector<Eigen::Index>& coords, Matrix values) {
  MarginalReport report;
  report.coords = coords;
  report.values = std::move(values);
  ReferenceCdf exp1;
  exp1.kind = ReferenceCdf::Kind::Exp1;
  for (Eigen::Index i = 0; i < report.values.cols(); ++i) {
    const Vector col = report.values.col(i);
    report.ks.push_back(ks_test(std::vector<double>(col.data(), col.data() + col.size()), exp1));
  }
  const Matrix centred = report.values.rowwise() - report.values.colwise().mean();
  const Matrix cov = centred.transpose() * centred;
  const Vector sd = cov.diagonal().cwiseSqrt();
  report.correlation = cov.cwiseQuotient(sd * sd.transpose());
  return report;
}

}  // namespace

CltReport clt_experiment(const ConstraintSystem& cs, const Barycenter& bc, const Vector& lambda,
                         const SamplerConfig& cfg) {
  const CltSetup s = clt_setup(cs, bc, lambda);
  const Matrix values = sample_features(
      cs, s.centre, bc.w, cfg, 1, [&](const Vector& x, Eigen::Ref<Vector> out) { out[0] = s(x); });
  return finish_clt(s.sigma, std::vector<double>(values.data(), values.data() + values.size()));
}

CltReport clt_report(const ConstraintSystem& cs, const Barycenter& bc, const Vector& lambda,
                     const Matrix& points) {
  if (points.cols() != cs.cols()) throw Error(ErrorCode::DimensionMismatch, "point size");
  const CltSetup s = clt_setup(cs, bc, lambda);
  std::vector<double> values(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) values[i] = s(points.row(i).transpose());
  return finish_clt(s.sigma, std::move(values));
}

MarginalReport marginal_experiment(const ConstraintSystem& cs, const Barycenter& bc,
                                   const std::vector<Eigen::Index>& coords,
                                   const SamplerConfig& cfg) {
  check_coords(coords, cs.cols());
  const auto k = static_cast<Eigen::Index>(coords.size());
  return finish_marginal(coords, sample_features(cs, bc.mean(), bc.w, cfg, k,
                                                 [&](const Vector& x, Eigen::Ref<Vector> out) {
                                                   for (Eigen::Index i = 0; i < k; ++i) {
                                                     out[i] = bc.w[coords[i]] * x[coords[i]];
                                                   }
                                                 }));
}

MarginalReport marginal_report(const Barycenter& bc, const std::vector<Eigen::Index>& coords,
                               const Matrix& points) {
  check_coords(coords, points.cols());
  Matrix values(points.rows(), static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    values.col(static_cast<Eigen::Index>(i)) = bc.w[coords[i]] * points.col(coords[i]);
  }
  return finish_marginal(coords, std::move(values));
}

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "not a number: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

ColumnLaw ColumnLaw::parse(const std::string& text, Eigen::Index m) {
  ColumnLaw law;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "box") {
    const auto bounds = parse_numbers(body, ',');
    if (bounds.size() != 2 || !(bounds[0] < bounds[1])) {
      throw Error(ErrorCode::InvalidArgument, "box law needs 'box:lo,hi' with lo < hi");
    }
    law.kind = Kind::Box;
    law.lo = bounds[0];
    law.hi = bounds[1];
  } else if (kind == "points") {
    law.kind = Kind::Atoms;
    std::vector<std::vector<double>> atoms;
    std::stringstream in(body);
    std::string atom;
    while (std::getline(in, atom, ';')) atoms.push_back(parse_numbers(atom, ','));
    if (atoms.empty()) throw Error(ErrorCode::InvalidArgument, "points law without atoms");
    law.atoms.resize(m, static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (static_cast<Eigen::Index>(atoms[k].size()) != m) {
        throw Error(ErrorCode::DimensionMismatch, "atom " + std::to_string(k) + " needs " +
                                                      std::to_string(m) + " entries");
      }
      for (Eigen::Index l = 0; l < m; ++l) law.atoms(l, k) = atoms[k][l];
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown column law '" + text + "'");
  }
  return law;
}

std::string ColumnLaw::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == Kind::Box) {
    out << "box:" << lo << "," << hi;
  } else {
    out << "points:";
    for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
      if (k) out << ";";
      for (Eigen::Index l = 0; l < atoms.rows(); ++l) out << (l ? "," : "") << atoms(l, k);
    }
  }
  return out.str();
}

GeneratedInstance random_instance(const InstanceRecipe& recipe) {
  const Eigen::Index m = recipe.m;
  const Eigen::Index n = recipe.n;
  if (m < 1 || n <= m) throw Error(ErrorCode::InvalidArgument, "need 1 <= m < n");
  if (recipe.v.size() != m) throw Error(ErrorCode::DimensionMismatch, "v must have m entries");
  const ColumnLaw& law = recipe.law;
  const Vector& v = recipe.v;

  if (law.kind == ColumnLaw::Kind::Box) {
    if (!(law.lo < law.hi) || law.lo < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "box law needs 0 <= lo < hi");
    }
    // Smallest <v, u> over the cube is attained at a corner.
    double worst = 0.0;
    for (Eigen::Index l = 0; l < m; ++l) worst += std::min(v[l] * law.lo, v[l] * law.hi);
    if (!(worst > 0.0)) {
      throw Error(ErrorCode::SupportViolation, "<v, u> is not positive on the whole box");
    }
  } else {
    if (law.atoms.rows() != m) throw Error(ErrorCode::DimensionMismatch, "atoms must have m rows");
    if (numerical_rank(law.atoms) < m) {
      throw Error(ErrorCode::SupportViolation, "atoms do not span R^m");
    }
    for (Eigen::Index k = 0; k < law.atoms.cols(); ++k) {
      if (!(v.dot(law.atoms.col(k)) > 0.0)) {
        throw Error(ErrorCode::SupportViolation,
                    "<v, atom " + std::to_string(k) + "> is not positive");
      }
    }
  }

  Rng rng = make_rng(recipe.seed, 0);
  Matrix a(m, n);
  if (law.kind == ColumnLaw::Kind::Box) {
    std::uniform_real_distribution<double> unif(law.lo, law.hi);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = 0; l < m; ++l) a(l, j) = unif(rng);
  } else {
    std::uniform_int_distribution<Eigen::Index> pick(0, law.atoms.cols() - 1);
    for (Eigen::Index j = 0; j < n; ++j) a.col(j) = law.atoms.col(pick(rng));
  }

  Vector b = Vector::Zero(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = v.dot(a.col(j));
    if (!(s > 0.0)) throw Error(ErrorCode::SupportViolation, "<v, A_j> <= 0 for a drawn column");
    b += a.col(j) / s;
  }
  b /= static_cast<double>(n);
  return {ConstraintSystem(std::move(a), std::move(b)), static_cast<double>(n) * v};
}

}  // namespace polyclt
