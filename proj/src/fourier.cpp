#include "polyclt/fourier.hpp"
#include "polyclt/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace polyclt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// atan(c) - c without cancellation near 0.
double atan_minus_identity(double c) {
  if (std::abs(c) < 1e-3) {
    const double c2 = c * c;
    return c * c2 * (-1.0 / 3.0 + c2 * (1.0 / 5.0 - c2 / 7.0));
  }
  return std::atan(c) - c;
}

// log(e^{-ic} / (1 - ic))
Complex log_cf_term(double c) {
  return {-0.5 * std::log1p(c * c), atan_minus_identity(c)};
}

// e^w - 1 for complex w, accurate for small |w|.
Complex expm1(Complex w) {
  const double x = w.real();
  const double y = w.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  }
}

std::vector<Panel> centred_panels(int dim, double radius) {
  const auto axis = graded_breakpoints(radius, std::min(1.0, radius / 2.0), dim == 1 ? 2.0 : 4.0);
  return tensor_panels(std::vector<std::vector<double>>(dim, axis));
}

// K groups that each span R^m as well as possible: the group with the smallest
// least eigenvalue takes the unused column best aligned with its weak direction.
// Only the decay of the tail bound matters here, not closeness to the diagonal.
ColumnGroups spanning_groups(const Matrix& a_hat, int groups) {
  const Eigen::Index m = a_hat.rows();
  const Eigen::Index n = a_hat.cols();
  ColumnGroups result(groups);
  std::vector<Matrix> sums(groups, Matrix::Zero(m, m));
  std::vector<double> least(groups, 0.0);
  std::vector<double> trace(groups, 0.0);
  std::vector<char> used(n, 0);
  for (Eigen::Index step = 0; step < n; ++step) {
    int weak = 0;
    for (int l = 1; l < groups; ++l) {
      if (least[l] < least[weak] || (least[l] == least[weak] && trace[l] < trace[weak])) weak = l;
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sums[weak]);
    const Vector v = eig.eigenvectors().col(0);
    Eigen::Index best = -1;
    double best_score = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double proj = v.dot(a_hat.col(j));
      const double score = proj * proj + 1e-12 * a_hat.col(j).squaredNorm();
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    used[best] = 1;
    result[weak].push_back(best);
    sums[weak] += a_hat.col(best) * a_hat.col(best).transpose();
    trace[weak] = sums[weak].trace();
    least[weak] = Eigen::SelfAdjointEigenSolver<Matrix>(sums[weak], Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .minCoeff();
  }
  return result;
}

// Smallest radius (to a few percent) with tail(radius) <= target; +inf if even
// max_radius does not suffice. tail must be nonincreasing.
double smallest_radius(const std::function<double(double)>& tail, double target,
                       double max_radius) {
  if (!(tail(max_radius) <= target)) return kInf;
  double lo = 1.0;
  double hi = 1.0;
  if (tail(hi) <= target) {
    while (lo > 1e-3 && tail(lo) <= target) lo *= 0.5;
    if (tail(lo) <= target) return lo;
    hi = 2.0 * lo;
  } else {
    while (!(tail(hi) <= target)) {
      lo = hi;
      hi = std::min(2.0 * hi, max_radius);
    }
  }
  for (int i = 0; i < 10; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (tail(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Tail of the column-wise majorant prod_j kappa_j (1 + g_j^2)^{-1/2},
// g_j = (|<A_hat_j, xi>| - |shift_j|)_+, outside the ball of given radius.
// Tighter than the grouped bound when whole blocks of columns vanish along
// some directions. m <= 2; the angular breakpoints sit where a column
// direction is orthogonal to xi, which is where the majorant decays slowest.
class MajorantTail {
 public:
  MajorantTail(const Matrix& a_hat, const Vector& shift, const Vector& log_constants)
      : a_hat_(a_hat), shift_(shift.cwiseAbs()), log_constant_(log_constants.sum()) {
    if (a_hat.rows() == 2) {
      std::vector<double> cuts = {0.0, 2.0 * std::numbers::pi};
      for (Eigen::Index j = 0; j < a_hat.cols(); ++j) {
        const double phi = std::atan2(a_hat(1, j), a_hat(0, j));
        for (double c : {phi + 0.5 * std::numbers::pi, phi - 0.5 * std::numbers::pi,
                         phi + 1.5 * std::numbers::pi}) {
          if (c > 0.0 && c < 2.0 * std::numbers::pi) cuts.push_back(c);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      for (double c : cuts) {
        if (angles_.empty() || c - angles_.back() > 1e-12) angles_.push_back(c);
      }
      angles_.back() = 2.0 * std::numbers::pi;
    }
  }

  /// Too many distinct directions make the angular panels expensive; the
  /// grouped bound is adequate there anyway.
  bool usable() const { return a_hat_.rows() == 1 || angles_.size() <= 200; }

  double tail(double radius) const {
    const int m = static_cast<int>(a_hat_.rows());
    Vector xi(m);
    auto log_majorant = [&](const Vector& point) {
      double total = log_constant_;
      for (Eigen::Index j = 0; j < a_hat_.cols(); ++j) {
        const double g = std::max(0.0, std::abs(a_hat_.col(j).dot(point)) - shift_[j]);
        total -= 0.5 * std::log1p(g * g);
      }
      return total;
    };
    const std::vector<double> u_cuts = {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0};
    StopRule stop = [](const std::vector<Complex>& v, const std::vector<double>& e) {
      return e[0] <= 1e-4 * std::abs(v[0]) + 1e-300;
    };
    CubatureResult r;
    if (m == 1) {
      // r = radius / u; both half-lines.
      Integrand f = [&](const double* u, Complex* out) {
        const double rr = radius / u[0];
        double total = 0.0;
        for (double sign : {-1.0, 1.0}) {
          xi[0] = sign * rr;
          total += std::exp(log_majorant(xi));
        }
        out[0] = total * radius / (u[0] * u[0]);
      };
      r = integrate_panels(1, 1, f, tensor_panels({u_cuts}), stop, 2'000'000);
    } else {
      Integrand f = [&](const double* x, Complex* out) {
        const double rr = radius / x[1];
        xi[0] = rr * std::cos(x[0]);
        xi[1] = rr * std::sin(x[0]);
        out[0] = std::exp(log_majorant(xi) + std::log(rr) + std::log(radius) - 2.0 * std::log(x[1]));
      };
      r = integrate_panels(2, 1, f, tensor_panels({angles_, u_cuts}), stop, 5'000'000);
    }
    if (!r.converged) return kInf;
    return r.value[0].real() + r.error[0];
  }

 private:
  const Matrix& a_hat_;
  Vector shift_;
  double log_constant_;
  std::vector<double> angles_;
};

[[noreturn]] void budget_exceeded(const CubatureResult& r, const char* what) {
  throw Error(ErrorCode::QuadratureBudgetExceeded,
              std::string(what) + ": " + std::to_string(r.evaluations) + " evaluations on " +
                  std::to_string(r.panels) + " panels without reaching the tolerance");
}

}  // namespace

Complex log_product_cf(const Vector& c) {
  Complex total{};
  for (Eigen::Index j = 0; j < c.size(); ++j) total += log_cf_term(c[j]);
  return total;
}

Complex product_cf(const Vector& c) { return std::exp(log_product_cf(c)); }

double cumulant_sum(const Vector& c, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "cumulant order must be >= 1");
  if (k == 1) return 0.0;
  const double factorial = std::tgamma(static_cast<double>(k));
  return factorial * c.array().pow(k).sum();
}

TailBound::TailBound(const Matrix& a_hat, const ColumnGroups& groups, const Vector& shift,
                     double log_constant)
    : dim_(static_cast<int>(a_hat.rows())), log_constant_(log_constant) {
  for (const auto& group : groups) {
    const Matrix g = group_gram(a_hat, group);
    const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(g, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
    if (!(mu > 1e-14)) continue;
    double tau2 = 0.0;
    for (auto j : group) tau2 += shift[j] * shift[j];
    mu_.push_back(mu);
    tau_.push_back(std::sqrt(tau2));
  }
}

double TailBound::log_modulus(double r) const {
  double total = log_constant_;
  for (std::size_t l = 0; l < mu_.size(); ++l) {
    const double gap = std::max(0.0, std::sqrt(mu_[l]) * r - tau_[l]);
    total -= 0.5 * std::log1p(gap * gap);
  }
  return total;
}

double TailBound::tail(double radius) const {
  if (static_cast<int>(mu_.size()) <= dim_) return kInf;
  const double log_area = std::log(sphere_area(dim_));
  // r = radius / u maps (radius, inf) onto (0, 1).
  Integrand f = [&](const double* u, Complex* out) {
    const double r = radius / u[0];
    const double log_value = log_area + (dim_ - 1) * std::log(r) + log_modulus(r) +
                             std::log(radius) - 2.0 * std::log(u[0]);
    out[0] = std::exp(log_value);
  };
  const std::vector<double> cuts = {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0};
  const auto panels = tensor_panels({cuts});
  StopRule stop = [](const std::vector<Complex>& v, const std::vector<double>& e) {
    return e[0] <= 1e-6 * std::abs(v[0]) + 1e-300;
  };
  const CubatureResult r = integrate_panels(1, 1, f, panels, stop, 2'000'000);
  return r.value[0].real() + r.error[0];
}

double TailBound::radius_for(double target, double max_radius) const {
  return smallest_radius([this](double r) { return tail(r); }, target, max_radius);
}

double truncation_radius(const Matrix& a_hat, const Vector& shift, const Vector& log_constants,
                         double target, double max_radius) {
  const int m = static_cast<int>(a_hat.rows());
  const int n = static_cast<int>(a_hat.cols());
  std::vector<int> candidates;
  for (int k = n / m; k > m; k /= 2) candidates.push_back(k);
  if (n >= (m + 1) * m && (candidates.empty() || candidates.back() != m + 1)) {
    candidates.push_back(m + 1);
  }
  double best = kInf;
  for (int k : candidates) {
    std::vector<ColumnGroups> options;
    if (auto near_diagonal = build_column_groups(a_hat, k, 0.25, 1, 0)) {
      options.push_back(std::move(*near_diagonal));
    }
    options.push_back(spanning_groups(a_hat, k));
    for (const auto& groups : options) {
      double log_constant = 0.0;
      for (const auto& group : groups)
        for (auto j : group) log_constant += log_constants[j];
      const TailBound bound(a_hat, groups, shift, log_constant);
      const double radius = bound.radius_for(target, std::min(best, max_radius));
      spdlog::debug("tail bound with K = {}: radius {}", k, radius);
      best = std::min(best, radius);
    }
  }
  // Only worth the extra cubature when the grouped bound is weak.
  if (m <= 2 && best > 1e3) {
    const MajorantTail majorant(a_hat, shift, log_constants);
    if (majorant.usable()) {
      const double radius = smallest_radius([&](double r) { return majorant.tail(r); }, target,
                                            std::min(best, max_radius));
      spdlog::debug("column-wise majorant: radius {}", radius);
      best = std::min(best, radius);
    }
  }
  return best;
}

CfEvaluation bartlett_cf(const StandardizedSystem& ss, const WeightSpec& spec, double t,
                         const QuadratureOptions& quad) {
  const Matrix& ah = ss.a_hat;
  const int m = static_cast<int>(ah.rows());
  const Eigen::Index n = ah.cols();
  if (m > 3) throw Error(ErrorCode::DimensionTooLarge, "characteristic functions need m <= 3");
  if (spec.lambda_hat.size() != n) throw Error(ErrorCode::DimensionMismatch, "lambda size");
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be finite");

  const double scale = std::pow(2.0 * std::numbers::pi, 0.5 * m);
  const double target = 0.5 * quad.tol * scale;
  const Vector shift = t * spec.lambda_hat;
  const Vector zero_logs = Vector::Zero(n);
  const double radius =
      std::max(truncation_radius(ah, shift, zero_logs, target, quad.max_radius),
               truncation_radius(ah, Vector::Zero(n), zero_logs, target, quad.max_radius));
  if (!std::isfinite(radius)) {
    throw Error(ErrorCode::QuadratureBudgetExceeded,
                "no truncation radius below " + std::to_string(quad.max_radius));
  }

  Vector c_den(n);
  Vector c_num(n);
  Integrand f = [&](const double* eta, Complex* out) {
    c_den.noalias() = ah.transpose() * Eigen::Map<const Vector>(eta, m);
    c_num = shift + c_den;
    out[0] = std::exp(log_product_cf(c_num));
    out[1] = std::exp(log_product_cf(c_den));
  };
  StopRule stop = [&](const std::vector<Complex>&, const std::vector<double>& e) {
    return e[0] <= target && e[1] <= target;
  };
  const CubatureResult r =
      integrate_panels(m, 2, f, centred_panels(m, radius), stop, quad.max_evals);
  if (!r.converged) budget_exceeded(r, "bartlett_cf");

  CfEvaluation out;
  out.numerator = r.value[0];
  out.denominator = r.value[1];
  out.quad_points = r.evaluations;
  out.truncation_radius = radius;
  const double e_num = r.error[0] + target;
  const double e_den = r.error[1] + target + std::abs(out.denominator.imag());
  const double d = std::abs(out.denominator);
  if (d < 10.0 * e_den) {
    throw Error(ErrorCode::DenominatorTooSmall,
                "|denominator| " + std::to_string(d) + " vs error " + std::to_string(e_den));
  }
  out.value = out.numerator == out.denominator ? Complex(1.0, 0.0)
                                               : out.numerator / out.denominator;
  out.abs_error_estimate = (e_num + std::abs(out.value) * e_den) / (d - e_den);
  return out;
}

CfEvaluation mixture_box_probability(const ConstraintSystem& cs, const Barycenter& bc,
                                     const Box& box, const QuadratureOptions& quad) {
  const Eigen::Index n = cs.cols();
  const int m = static_cast<int>(cs.rows());
  if (box.lo.size() != n || box.hi.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "box must have one interval per variable");
  }
  if (m > 3) throw Error(ErrorCode::DimensionTooLarge, "box probabilities need m <= 3");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(box.lo[j]) || std::isnan(box.hi[j]) || box.lo[j] > box.hi[j]) {
      throw Error(ErrorCode::InvalidArgument, "box interval " + std::to_string(j) + " is invalid");
    }
    if (!std::isfinite(box.lo[j]) && box.lo[j] > 0.0) {
      throw Error(ErrorCode::BoxUnboundedWithoutDecay,
                  "interval " + std::to_string(j) + " starts at +inf");
    }
  }
  const ValidationReport report = validate(cs);
  if (!report.column_removal_safe) {
    throw Error(ErrorCode::RankDeficient,
                "removing a single column reduces rank(A); the mixture formula does not apply");
  }

  CfEvaluation out;
  Vector alpha(n), beta(n), log_kappa(n);
  std::vector<char> full(n, 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    alpha[j] = bc.w[j] * std::max(0.0, box.lo[j]);
    beta[j] = bc.w[j] * box.hi[j];
    if (!(beta[j] > alpha[j])) return out;  // empty or null interval
    full[j] = alpha[j] == 0.0 && std::isinf(beta[j]);
    log_kappa[j] = std::log(std::exp(-alpha[j]) + std::exp(-beta[j]));
  }

  const StandardizedSystem ss = standardize(cs, bc);
  const Matrix& ah = ss.a_hat;
  const double scale = std::pow(2.0 * std::numbers::pi, 0.5 * m);
  const double target = 0.5 * quad.tol * scale;
  const Vector zero = Vector::Zero(n);
  const double radius = std::max(truncation_radius(ah, zero, log_kappa, target, quad.max_radius),
                                 truncation_radius(ah, zero, zero, target, quad.max_radius));
  if (!std::isfinite(radius)) {
    throw Error(ErrorCode::QuadratureBudgetExceeded,
                "no truncation radius below " + std::to_string(quad.max_radius));
  }

  Vector c(n);
  Integrand f = [&](const double* eta, Complex* out_values) {
    c.noalias() = ah.transpose() * Eigen::Map<const Vector>(eta, m);
    Complex num{};
    Complex den{};
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex base = log_cf_term(c[j]);
      den += base;
      if (full[j]) {
        num += base;
        continue;
      }
      const Complex z(1.0, -c[j]);
      Complex term = base - alpha[j] * z;
      if (std::isfinite(beta[j])) term += std::log(-expm1(-(beta[j] - alpha[j]) * z));
      num += term;
    }
    out_values[0] = std::exp(num);
    out_values[1] = std::exp(den);
  };
  StopRule stop = [&](const std::vector<Complex>&, const std::vector<double>& e) {
    return e[0] <= target && e[1] <= target;
  };
  const CubatureResult r =
      integrate_panels(m, 2, f, centred_panels(m, radius), stop, quad.max_evals);
  if (!r.converged) budget_exceeded(r, "mixture_box_probability");

  out.numerator = r.value[0];
  out.denominator = r.value[1];
  out.quad_points = r.evaluations;
  out.truncation_radius = radius;
  const double e_num = r.error[0] + target;
  const double e_den = r.error[1] + target + std::abs(out.denominator.imag());
  const double d = std::abs(out.denominator);
  if (d < 10.0 * e_den) {
    throw Error(ErrorCode::DenominatorTooSmall,
                "|denominator| " + std::to_string(d) + " vs error " + std::to_string(e_den));
  }
  const Complex ratio = out.numerator == out.denominator ? Complex(1.0, 0.0)
                                                         : out.numerator / out.denominator;
  out.value = ratio.real();
  out.abs_error_estimate =
      (e_num + std::abs(ratio) * e_den) / (d - e_den) + std::abs(ratio.imag());
  return out;
}

GammaEvaluation gamma_box_probability(const ConstraintSystem& cs, const Barycenter& bc,
                                      double gamma, const Box& box,
                                      const QuadratureOptions& quad) {
  const Eigen::Index n = cs.cols();
  const Eigen::Index m = cs.rows();
  if (n > 4) throw Error(ErrorCode::DimensionTooLarge, "direct cubature needs n <= 4");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!cs.is_positive()) throw Error(ErrorCode::NotPositivized, "A and b must be positive");
  if (box.lo.size() != n || box.hi.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "box must have one interval per variable");
  }

  const Matrix& a = cs.a();
  const Vector& b = cs.b();
  const double delta = std::sqrt(40.0 / gamma);  // beyond, the penalty is below e^{-40}
  std::vector<std::vector<double>> axes(n);
  Vector lo(n), hi(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double upper = kInf;
    for (Eigen::Index l = 0; l < m; ++l) upper = std::min(upper, (b[l] + delta) / a(l, j));
    lo[j] = std::max(0.0, box.lo[j]);
    hi[j] = box.hi[j];
    auto& axis = axes[j];
    axis = {0.0, upper};
    for (double cut : {lo[j], hi[j]})
      if (cut > 0.0 && cut < upper) axis.push_back(cut);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  }

  const double offset = bc.lambda0.dot(b);  // <w, x> ~ <lambda0, b> on K
  Vector x(n);
  Integrand f = [&](const double* p, Complex* out) {
    bool inside = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      x[j] = p[j];
      inside = inside && p[j] >= lo[j] && p[j] <= hi[j];
    }
    const double value =
        std::exp(offset - bc.w.dot(x) - gamma * (a * x - b).squaredNorm());
    out[0] = value;
    out[1] = inside ? value : 0.0;
  };
  StopRule stop = [&](const std::vector<Complex>& v, const std::vector<double>& e) {
    const double z = std::abs(v[0]);
    return e[0] <= quad.tol * z && e[1] <= quad.tol * z;
  };
  const CubatureResult r = integrate_panels(static_cast<int>(n), 2, f, tensor_panels(axes), stop,
                                            quad.max_evals);
  if (!r.converged) budget_exceeded(r, "gamma_box_probability");

  const double cut_mass = std::exp(offset - 40.0) / bc.w.prod();
  const double z = r.value[0].real();
  const double e_z = r.error[0] + cut_mass;
  const double e_box = r.error[1] + cut_mass;
  GammaEvaluation out;
  out.value = r.value[1].real() / z;
  out.abs_error_estimate = (e_box + std::abs(out.value) * e_z) / (z - e_z);
  out.quad_points = r.evaluations;
  return out;
}

double hubbard_stratonovich(double a, double gamma, double tol) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  const double limit = std::sqrt(4.0 * gamma * 45.0);
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * gamma);
  Integrand f = [&](const double* eta, Complex* out) {
    out[0] = norm * std::exp(Complex(-eta[0] * eta[0] / (4.0 * gamma), eta[0] * a));
  };
  std::vector<double> cuts;
  for (int i = 0; i <= 16; ++i) cuts.push_back(-limit + 2.0 * limit * i / 16.0);
  StopRule stop = [&](const std::vector<Complex>&, const std::vector<double>& e) {
    return e[0] <= tol;
  };
  const CubatureResult r = integrate_panels(1, 1, f, tensor_panels({cuts}), stop, 10'000'000);
  if (!r.converged) budget_exceeded(r, "hubbard_stratonovich");
  return r.value[0].real();
}

}  // namespace polyclt
