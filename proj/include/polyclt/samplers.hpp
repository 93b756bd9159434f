#pragma once

#include "polyclt/constraint_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include <boost/random/normal_distribution.hpp>

namespace polyclt {

/// Reproducible per (seed, stream): independent chains use distinct streams.
using Rng = std::mt19937_64;
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Orthonormal n x (n - m) frame spanning ker A. Throws RankDeficient.
Matrix kernel_basis(const Matrix& a);

enum class SamplerKind { HitAndRun, DirichletExact, ExpProduct };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);

/// Points are stored one per row.
struct SampleChain {
  Matrix points;
  std::uint64_t seed = 0;
  Eigen::Index burn_in = 0;
  Eigen::Index thin = 1;
  SamplerKind kind = SamplerKind::HitAndRun;
  Eigen::Index rejected_chords = 0;
};

/// Chord {t : x + t d >= 0} as [t_lo, t_hi].
std::pair<double, double> chord(const Vector& x, const Vector& d);

/// Hit-and-run walk on K = {x >= 0 : A x = b}: a uniform direction in ker A,
/// then a uniform point on the chord through the current point. Reversible
/// for the uniform law on K.
class HitAndRun {
 public:
  /// Throws StartNotInterior unless x0 > 0 and A x0 = b (to 1e-9 relative).
  HitAndRun(const ConstraintSystem& cs, Vector x0, std::uint64_t seed, std::uint64_t stream = 0);

  const Vector& step();
  const Vector& advance(Eigen::Index steps);
  const Vector& state() const noexcept { return x_; }
  Eigen::Index steps_taken() const noexcept { return steps_; }
  Eigen::Index rejected_chords() const noexcept { return rejected_; }

  static constexpr Eigen::Index kReprojectEvery = 1000;

 private:
  void reproject();

  const ConstraintSystem* cs_;
  Matrix row_basis_;  // n x m, orthonormal columns spanning the row space of A
  Matrix lift_;       // n x m, A^+ = row_basis R^{-t}
  Vector x_;
  Vector direction_;
  Rng rng_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
  Eigen::Index steps_ = 0;
  Eigen::Index rejected_ = 0;
};

struct HitAndRunOptions {
  Eigen::Index count = 1000;
  Eigen::Index burn_in = -1;  // default 10 (n - m)
  Eigen::Index thin = -1;     // default n - m
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

SampleChain hit_and_run(const ConstraintSystem& cs, const Vector& x0,
                        const HitAndRunOptions& options);

/// Exact uniform points of {x >= 0 : c (x_1 + ... + x_n) = b}: (b/c) D with
/// D ~ Dirichlet(1, ..., 1).
SampleChain dirichlet_exact(Eigen::Index n, double c, double b, Eigen::Index count,
                            std::uint64_t seed, std::uint64_t stream = 0);

/// Independent exponentials, coordinate j with rate w_j.
SampleChain exp_product(const Vector& w, Eigen::Index count, std::uint64_t seed,
                        std::uint64_t stream = 0);

/// Sampler selection shared by the experiments and the CLI.
struct SamplerConfig {
  SamplerKind kind = SamplerKind::HitAndRun;
  Eigen::Index count = 1000;
  std::uint64_t seed = 0;
  Eigen::Index burn_in = -1;
  Eigen::Index thin = -1;
  int chains = 1;  // samples are split evenly across independent chains
  int jobs = 1;    // worker threads; results do not depend on it
};

/// Draws cfg.count points and maps each through `feature` into a row of the
/// returned matrix (count x feature_dim). Rows are ordered by chain, then by
/// draw. `feature` must be safe to call concurrently. `start` is the
/// hit-and-run starting point (typically 1/w).
Matrix sample_features(const ConstraintSystem& cs, const Vector& start, const Vector& rates,
                       const SamplerConfig& cfg, Eigen::Index feature_dim,
                       const std::function<void(const Vector&, Eigen::Ref<Vector>)>& feature);

/// Whole points (count x n) for the given configuration.
SampleChain draw(const ConstraintSystem& cs, const Vector& start, const Vector& rates,
                 const SamplerConfig& cfg);

/// If A is a single constant row (c, ..., c), returns c.
std::optional<double> symmetric_simplex_coefficient(const ConstraintSystem& cs);

}  // namespace polyclt
