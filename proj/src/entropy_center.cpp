#include "polyclt/entropy_center.hpp"
#include "polyclt/error.hpp"

#include <cmath>
#include <limits>

namespace polyclt {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kFractionToBoundary = 0.99;
constexpr double kQuadraticRegion = 0.25;  // Newton decrement below which full steps are taken
constexpr double kScalingSpread = 1e6;

Vector checked_slacks(const Matrix& a, const Vector& lambda) {
  Vector s = a.transpose() * lambda;
  if (!(s.minCoeff() > 0.0)) {
    throw Error(ErrorCode::DomainViolation, "(A^t lambda)_j <= 0 for some j");
  }
  return s;
}

double value_from_slacks(const Vector& s, const Vector& lambda, const Vector& b) {
  if (!(s.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  return -s.array().log().sum() + lambda.dot(b);
}

// A diag(1/s^2) A^t, exactly symmetric.
Matrix weighted_gram(const Matrix& a, const Vector& s) {
  const Matrix scaled = a * s.cwiseInverse().asDiagonal();
  Matrix h = Matrix::Zero(a.rows(), a.rows());
  h.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  return h.selfadjointView<Eigen::Lower>();
}

}  // namespace

double dual_value(const ConstraintSystem& cs, const Vector& lambda) {
  if (lambda.size() != cs.rows()) throw Error(ErrorCode::DimensionMismatch, "lambda size");
  return value_from_slacks(cs.a().transpose() * lambda, lambda, cs.b());
}

Vector dual_gradient(const ConstraintSystem& cs, const Vector& lambda) {
  if (lambda.size() != cs.rows()) throw Error(ErrorCode::DimensionMismatch, "lambda size");
  const Vector s = checked_slacks(cs.a(), lambda);
  return cs.b() - cs.a() * s.cwiseInverse();
}

Matrix dual_hessian(const ConstraintSystem& cs, const Vector& lambda) {
  if (lambda.size() != cs.rows()) throw Error(ErrorCode::DimensionMismatch, "lambda size");
  const Vector s = checked_slacks(cs.a(), lambda);
  return weighted_gram(cs.a(), s);
}

Barycenter solve_barycenter(const ConstraintSystem& cs, const BarycenterOptions& options) {
  const Matrix& a = cs.a();
  const Vector& b = cs.b();
  const Eigen::Index m = cs.rows();

  if (!options.start && !cs.is_positive()) {
    throw Error(ErrorCode::NotPositivized,
                "A and b must be entrywise positive (see positivize) or a start supplied");
  }
  if (options.start && options.start->size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "start has wrong size");
  }

  Barycenter result;

  // Row equilibration when the entries of A span too many orders of magnitude.
  Vector row_scale = Vector::Ones(m);
  {
    const Eigen::ArrayXXd mag = a.array().abs();
    const double largest = mag.maxCoeff();
    const double smallest = (mag > 0.0).select(mag, largest).minCoeff();
    if (largest > kScalingSpread * smallest) {
      row_scale = mag.rowwise().maxCoeff().inverse().matrix();
      result.rescaled = true;
    }
  }
  const Matrix sa = row_scale.asDiagonal() * a;
  const Vector sb = row_scale.cwiseProduct(b);

  Vector lambda = options.start ? Vector(options.start->cwiseQuotient(row_scale))
                                : Vector(Vector::Ones(m));
  Vector s = sa.transpose() * lambda;
  if (!(s.minCoeff() > 0.0)) {
    throw Error(ErrorCode::DomainViolation, "starting lambda is not strictly dual feasible");
  }

  const double stop = options.tol * std::max(1.0, b.cwiseAbs().maxCoeff());
  double value = value_from_slacks(s, lambda, sb);
  result.dual_trace.push_back(value);

  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const Vector grad = sb - sa * s.cwiseInverse();
    const double grad_norm = grad.cwiseQuotient(row_scale).cwiseAbs().maxCoeff();
    const Matrix hess = weighted_gram(sa, s);
    if (grad_norm <= stop) {
      result.converged = true;
      // One more full step costs little and is quadratically convergent here.
      const Vector polish_lambda = lambda + hess.llt().solve(-grad);
      const Vector polish_s = sa.transpose() * polish_lambda;
      if (polish_s.minCoeff() > 0.0) {
        const Vector polish_grad = sb - sa * polish_s.cwiseInverse();
        if (polish_grad.cwiseQuotient(row_scale).cwiseAbs().maxCoeff() < grad_norm) {
          lambda = polish_lambda;
          s = polish_s;
        }
      }
      break;
    }
    Eigen::LLT<Matrix> llt(hess);
    Vector step = llt.info() == Eigen::Success ? Vector(llt.solve(-grad))
                                               : Vector(hess.ldlt().solve(-grad));
    const double decrement = std::sqrt(std::max(0.0, -grad.dot(step)));

    const Vector ds = sa.transpose() * step;
    double alpha_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < ds.size(); ++j)
      if (ds[j] < 0.0) alpha_max = std::min(alpha_max, -s[j] / ds[j]);
    double alpha = std::min(1.0, kFractionToBoundary * alpha_max);

    Vector trial_lambda;
    Vector trial_s;
    double trial_value = value;
    if (decrement < kQuadraticRegion) {
      // Inside the quadratic convergence region the full step is feasible and
      // decreasing; skipping Armijo avoids roundoff-limited rejections.
      trial_lambda = lambda + alpha * step;
      trial_s = s + alpha * ds;
      trial_value = value_from_slacks(trial_s, trial_lambda, sb);
    } else {
      const double slope = grad.dot(step);
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
        trial_lambda = lambda + alpha * step;
        trial_s = s + alpha * ds;
        trial_value = value_from_slacks(trial_s, trial_lambda, sb);
        if (trial_value <= value + kArmijo * alpha * slope) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (!(trial_s.minCoeff() > 0.0)) break;
    lambda = std::move(trial_lambda);
    s = std::move(trial_s);
    value = trial_value;
    result.dual_trace.push_back(value);
  }

  result.iterations = iter;
  result.lambda0 = row_scale.cwiseProduct(lambda);
  result.w = a.transpose() * result.lambda0;
  const Vector residual = a * result.w.cwiseInverse() - b;
  result.centering_residual = residual.cwiseAbs().maxCoeff();
  result.gradient_norm = result.centering_residual;
  result.dual_value = dual_value(cs, result.lambda0);
  if (!result.converged) {
    result.converged = result.gradient_norm <= stop;
  }
  return result;
}

Barycenter barycenter_of(const ConstraintSystem& cs, const BarycenterOptions& options) {
  if (cs.is_positive() || options.start) return solve_barycenter(cs, options);
  const ConstraintSystem positive = positivize(cs);
  Barycenter result = solve_barycenter(positive, options);
  result.lambda0 = cs.a().transpose().colPivHouseholderQr().solve(result.w);
  result.dual_value = dual_value(cs, result.lambda0);
  result.centering_residual = (cs.a() * result.w.cwiseInverse() - cs.b()).cwiseAbs().maxCoeff();
  return result;
}

EntropyCertificate entropy_certificate(const ConstraintSystem& cs, const Barycenter& bc,
                                       const std::vector<Vector>& points,
                                       double feasibility_tol) {
  EntropyCertificate cert;
  const double reference = bc.w.array().log().sum();  // = -sum log(1/w_j)
  const double scale = std::max(1.0, cs.b().cwiseAbs().maxCoeff());
  cert.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector& x = points[i];
    if (x.size() != cs.cols()) throw Error(ErrorCode::DimensionMismatch, "point size");
    const double off = (cs.a() * x - cs.b()).cwiseAbs().maxCoeff();
    if (off > feasibility_tol * scale || !(x.minCoeff() > 0.0)) {
      throw Error(ErrorCode::InfeasiblePoint, "point " + std::to_string(i) + " is not in the "
                                                  "relative interior of K");
    }
    const double margin = -x.array().log().sum() - reference;
    cert.margins.push_back(margin);
    cert.min_margin = std::min(cert.min_margin, margin);
  }
  if (points.empty()) cert.min_margin = 0.0;
  cert.holds = cert.min_margin >= -1e-9;
  return cert;
}

}  // namespace polyclt
