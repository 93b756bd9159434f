#include "polyclt/samplers.hpp"
#include "polyclt/error.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace polyclt {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Matrix kernel_basis(const Matrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (numerical_rank(a) < m) throw Error(ErrorCode::RankDeficient, "kernel_basis: rank(A) < m");
  Eigen::HouseholderQR<Matrix> qr(a.transpose());
  const Matrix q = qr.householderQ();
  return q.rightCols(n - m);
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::HitAndRun: return "hitrun";
    case SamplerKind::DirichletExact: return "dirichlet";
    case SamplerKind::ExpProduct: return "exp";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "hitrun" || name == "hit_and_run") return SamplerKind::HitAndRun;
  if (name == "dirichlet" || name == "dirichlet_exact") return SamplerKind::DirichletExact;
  if (name == "exp" || name == "exp_product") return SamplerKind::ExpProduct;
  throw Error(ErrorCode::InvalidArgument, "unknown sampler '" + name + "'");
}

std::pair<double, double> chord(const Vector& x, const Vector& d) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double r = -x[j] / d[j];
    if (d[j] > 0.0) lo = std::max(lo, r);
    if (d[j] < 0.0) hi = std::min(hi, r);
  }
  return {lo, hi};
}

HitAndRun::HitAndRun(const ConstraintSystem& cs, Vector x0, std::uint64_t seed,
                     std::uint64_t stream)
    : cs_(&cs), x_(std::move(x0)), rng_(make_rng(seed, stream)) {
  const Eigen::Index m = cs.rows();
  const Eigen::Index n = cs.cols();
  if (x_.size() != n) throw Error(ErrorCode::DimensionMismatch, "start point size");
  const double scale = std::max(1.0, cs.b().cwiseAbs().maxCoeff());
  if (!(x_.minCoeff() > 0.0) || (cs.a() * x_ - cs.b()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(ErrorCode::StartNotInterior, "hit-and-run start must satisfy Ax = b, x > 0");
  }
  if (numerical_rank(cs.a()) < m) throw Error(ErrorCode::RankDeficient, "rank(A) < m");
  if (m == n) throw Error(ErrorCode::InvalidArgument, "K is a single point; nothing to sample");
  Eigen::HouseholderQR<Matrix> qr(cs.a().transpose());
  row_basis_ = qr.householderQ() * Matrix::Identity(n, m);
  const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  // A = R^t Q1^t, so A^+ = Q1 R^{-t}.
  lift_ = r.triangularView<Eigen::Upper>().solve(row_basis_.transpose()).transpose();
  direction_.resize(n);
}

void HitAndRun::reproject() {
  x_.noalias() -= lift_ * (cs_->a() * x_ - cs_->b());
}

const Vector& HitAndRun::step() {
  const Eigen::Index n = x_.size();
  for (;;) {
    for (Eigen::Index j = 0; j < n; ++j) direction_[j] = normal_(rng_);
    direction_.noalias() -= row_basis_ * (row_basis_.transpose() * direction_);
    const double norm = direction_.norm();
    if (!(norm > 0.0)) continue;
    direction_ /= norm;
    const auto [lo, hi] = chord(x_, direction_);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(ErrorCode::NotCompact, "hit-and-run chord is unbounded");
    }
    if (hi - lo < 1e-14) {
      ++rejected_;
      continue;
    }
    const double t = std::uniform_real_distribution<double>(lo, hi)(rng_);
    x_.noalias() += t * direction_;
    break;
  }
  if (++steps_ % kReprojectEvery == 0) reproject();
  return x_;
}

const Vector& HitAndRun::advance(Eigen::Index steps) {
  for (Eigen::Index i = 0; i < steps; ++i) step();
  return x_;
}

SampleChain hit_and_run(const ConstraintSystem& cs, const Vector& x0,
                        const HitAndRunOptions& options) {
  const Eigen::Index dim = cs.cols() - cs.rows();
  SampleChain chain;
  chain.kind = SamplerKind::HitAndRun;
  chain.seed = options.seed;
  chain.burn_in = options.burn_in < 0 ? 10 * dim : options.burn_in;
  chain.thin = options.thin < 1 ? dim : options.thin;
  HitAndRun walker(cs, x0, options.seed, options.stream);
  walker.advance(chain.burn_in);
  chain.points.resize(options.count, cs.cols());
  for (Eigen::Index i = 0; i < options.count; ++i) {
    chain.points.row(i) = walker.advance(chain.thin).transpose();
  }
  chain.rejected_chords = walker.rejected_chords();
  return chain;
}

namespace {

template <class Emit>
void dirichlet_points(Eigen::Index n, double scale, Eigen::Index count, Rng& rng, Emit&& emit) {
  std::exponential_distribution<double> exp1(1.0);
  Vector x(n);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) x[j] = exp1(rng);
    x *= scale / x.sum();
    emit(i, x);
  }
}

template <class Emit>
void exponential_points(const Vector& w, Eigen::Index count, Rng& rng, Emit&& emit) {
  std::exponential_distribution<double> exp1(1.0);
  Vector x(w.size());
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < w.size(); ++j) x[j] = exp1(rng) / w[j];
    emit(i, x);
  }
}

}  // namespace

SampleChain dirichlet_exact(Eigen::Index n, double c, double b, Eigen::Index count,
                            std::uint64_t seed, std::uint64_t stream) {
  if (!(c > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "need c > 0 and b > 0");
  SampleChain chain;
  chain.kind = SamplerKind::DirichletExact;
  chain.seed = seed;
  chain.points.resize(count, n);
  Rng rng = make_rng(seed, stream);
  dirichlet_points(n, b / c, count, rng,
                   [&](Eigen::Index i, const Vector& x) { chain.points.row(i) = x.transpose(); });
  return chain;
}

SampleChain exp_product(const Vector& w, Eigen::Index count, std::uint64_t seed,
                        std::uint64_t stream) {
  if (!(w.minCoeff() > 0.0)) throw Error(ErrorCode::InvalidArgument, "rates must be positive");
  SampleChain chain;
  chain.kind = SamplerKind::ExpProduct;
  chain.seed = seed;
  chain.points.resize(count, w.size());
  Rng rng = make_rng(seed, stream);
  exponential_points(w, count, rng,
                     [&](Eigen::Index i, const Vector& x) { chain.points.row(i) = x.transpose(); });
  return chain;
}

std::optional<double> symmetric_simplex_coefficient(const ConstraintSystem& cs) {
  if (cs.rows() != 1) return std::nullopt;
  const double c = cs.a()(0, 0);
  if (!(c > 0.0) || (cs.a().array() != c).any()) return std::nullopt;
  return c;
}

Matrix sample_features(const ConstraintSystem& cs, const Vector& start, const Vector& rates,
                       const SamplerConfig& cfg, Eigen::Index feature_dim,
                       const std::function<void(const Vector&, Eigen::Ref<Vector>)>& feature) {
  const int chains = std::max(1, cfg.chains);
  const Eigen::Index n = cs.cols();
  const Eigen::Index dim = n - cs.rows();
  const Eigen::Index burn_in = cfg.burn_in < 0 ? 10 * dim : cfg.burn_in;
  const Eigen::Index thin = cfg.thin < 1 ? dim : cfg.thin;

  std::optional<double> simplex_c;
  if (cfg.kind == SamplerKind::DirichletExact) {
    simplex_c = symmetric_simplex_coefficient(cs);
    if (!simplex_c) {
      throw Error(ErrorCode::InvalidArgument,
                  "the exact sampler needs a single constant constraint row");
    }
  }

  Matrix out(cfg.count, feature_dim);
  std::vector<Eigen::Index> offsets(chains + 1, 0);
  for (int c = 0; c < chains; ++c) {
    offsets[c + 1] = offsets[c] + cfg.count / chains + (c < cfg.count % chains ? 1 : 0);
  }

  auto run_chain = [&](int c) {
    const Eigen::Index begin = offsets[c];
    const Eigen::Index count = offsets[c + 1] - begin;
    Vector row(feature_dim);
    auto emit = [&](Eigen::Index i, const Vector& x) {
      feature(x, row);
      out.row(begin + i) = row.transpose();
    };
    switch (cfg.kind) {
      case SamplerKind::HitAndRun: {
        HitAndRun walker(cs, start, cfg.seed, static_cast<std::uint64_t>(c));
        walker.advance(burn_in);
        for (Eigen::Index i = 0; i < count; ++i) emit(i, walker.advance(thin));
        break;
      }
      case SamplerKind::DirichletExact: {
        Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(c));
        dirichlet_points(n, cs.b()[0] / *simplex_c, count, rng, emit);
        break;
      }
      case SamplerKind::ExpProduct: {
        Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(c));
        exponential_points(rates, count, rng, emit);
        break;
      }
    }
  };

  const int jobs = std::clamp(cfg.jobs, 1, chains);
  if (jobs == 1) {
    for (int c = 0; c < chains; ++c) run_chain(c);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(jobs);
    for (int k = 0; k < jobs; ++k) {
      workers.emplace_back([&, k] {
        try {
          for (int c = k; c < chains; c += jobs) run_chain(c);
        } catch (...) {
          failures[k] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }
  return out;
}

SampleChain draw(const ConstraintSystem& cs, const Vector& start, const Vector& rates,
                 const SamplerConfig& cfg) {
  SampleChain chain;
  chain.kind = cfg.kind;
  chain.seed = cfg.seed;
  const Eigen::Index dim = cs.cols() - cs.rows();
  chain.burn_in = cfg.kind == SamplerKind::HitAndRun ? (cfg.burn_in < 0 ? 10 * dim : cfg.burn_in) : 0;
  chain.thin = cfg.kind == SamplerKind::HitAndRun ? (cfg.thin < 1 ? dim : cfg.thin) : 1;
  chain.points = sample_features(cs, start, rates, cfg, cs.cols(),
                                 [](const Vector& x, Eigen::Ref<Vector> out) { out = x; });
  return chain;
}

}  // namespace polyclt
