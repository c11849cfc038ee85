// Copyright 2026 The mlrem Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "mlrem/errors.hpp"

namespace mlrem {

// splitmix64 finalizer; used to split one root seed into independent streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
  return mix64(mix64(root) ^ (tag * 0xd1342543de82ef95ULL + 1));
}

// Stream tags for the per-purpose RNG split.
enum class Stream : std::uint64_t { Covariates = 1, Labels = 2, Noise = 3, Init = 4 };

inline std::uint64_t derive_seed(std::uint64_t root, Stream s) {
  return derive_seed(root, static_cast<std::uint64_t>(s));
}

template <typename Scalar>
class GroundTruth {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GroundTruth(Vector beta_star, Scalar sigma) : beta_star_(std::move(beta_star)), sigma_(sigma) {
    if (!(sigma_ > Scalar(0)) || !std::isfinite(static_cast<double>(sigma_)))
      throw DomainError("sigma must be positive and finite");
    if (beta_star_.size() == 0) throw DomainError("beta_star must have d >= 1");
    if (!(beta_star_.norm() > Scalar(0))) throw DomainError("beta_star must be nonzero");
    if (!beta_star_.allFinite()) throw DomainError("beta_star must be finite");
  }

  // beta_star = norm * e_1 in d dimensions, sigma = norm / eta.
  static GroundTruth axis_aligned(Eigen::Index d, Scalar beta_norm, Scalar eta) {
    if (d < 1) throw DomainError("d must be >= 1");
    if (!(eta > Scalar(0))) throw DomainError("eta must be positive");
    Vector b = Vector::Zero(d);
    b(0) = beta_norm;
    return GroundTruth(std::move(b), beta_norm / eta);
  }

  const Vector& beta_star() const { return beta_star_; }
  Scalar sigma() const { return sigma_; }
  Eigen::Index d() const { return beta_star_.size(); }
  Scalar snr() const { return beta_star_.norm() / sigma_; }
  // sigma^2 + ||beta*||^2, the second moment of y.
  Scalar total_variance() const { return sigma_ * sigma_ + beta_star_.squaredNorm(); }

 private:
  Vector beta_star_;
  Scalar sigma_;
};

template <typename Scalar>
class Dataset;

// The only way to read latent labels and noise. EM code never includes a call
// to this; tests grep for it.
struct LatentAccess {
  template <typename Scalar>
  static const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& labels(const Dataset<Scalar>& ds) {
    return ds.zs_;
  }
  template <typename Scalar>
  static const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& noise(const Dataset<Scalar>& ds) {
    return ds.noise_;
  }
};

template <typename Scalar>
class Dataset {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Dataset(Matrix xs, Vector ys, Vector zs, Vector noise, std::uint64_t seed)
      : xs_(std::move(xs)), ys_(std::move(ys)), zs_(std::move(zs)), noise_(std::move(noise)), seed_(seed) {}

  const Matrix& xs() const { return xs_; }
  const Vector& ys() const { return ys_; }
  std::uint64_t seed() const { return seed_; }
  Eigen::Index n() const { return xs_.rows(); }
  Eigen::Index d() const { return xs_.cols(); }

  auto x_rows(Eigen::Index start, Eigen::Index len) const { return xs_.middleRows(start, len); }
  auto y_segment(Eigen::Index start, Eigen::Index len) const { return ys_.segment(start, len); }

 private:
  friend struct LatentAccess;
  Matrix xs_;
  Vector ys_;
  Vector zs_;
  Vector noise_;
  std::uint64_t seed_;
};

// y_i = z_i <beta*, x_i> + e_i. Each purpose (covariates, labels, noise) has
// its own stream, drawn row by row; successive next() calls continue the
// streams, so batches concatenate to the single-call output.
template <typename Scalar>
class DatasetSampler {
 public:
  DatasetSampler(GroundTruth<Scalar> truth, std::uint64_t seed)
      : truth_(std::move(truth)),
        seed_(seed),
        cov_rng_(derive_seed(seed, Stream::Covariates)),
        lab_rng_(derive_seed(seed, Stream::Labels)),
        noise_rng_(derive_seed(seed, Stream::Noise)) {}

  Dataset<Scalar> next(Eigen::Index n) {
    if (n < 1) throw DomainError("n must be >= 1");
    const Eigen::Index d = truth_.d();
    typename Dataset<Scalar>::Matrix xs(n, d);
    typename Dataset<Scalar>::Vector ys(n), zs(n), noise(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) xs(i, j) = static_cast<Scalar>(cov_normal_(cov_rng_));
      zs(i) = (lab_rng_() >> 63) ? Scalar(1) : Scalar(-1);
      noise(i) = truth_.sigma() * static_cast<Scalar>(noise_normal_(noise_rng_));
    }
    for (Eigen::Index i = 0; i < n; ++i) ys(i) = zs(i) * xs.row(i).dot(truth_.beta_star()) + noise(i);
    return Dataset<Scalar>(std::move(xs), std::move(ys), std::move(zs), std::move(noise), seed_);
  }

 private:
  GroundTruth<Scalar> truth_;
  std::uint64_t seed_;
  std::mt19937_64 cov_rng_, lab_rng_, noise_rng_;
  std::normal_distribution<double> cov_normal_{0.0, 1.0}, noise_normal_{0.0, 1.0};
};

template <typename Scalar>
Dataset<Scalar> sample_dataset(const GroundTruth<Scalar>& truth, Eigen::Index n, std::uint64_t seed) {
  return DatasetSampler<Scalar>(truth, seed).next(n);
}

// Uniform on the sphere of radius `scale` in d dimensions.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> random_init(Eigen::Index d, Scalar scale, std::uint64_t seed) {
  if (d < 1) throw DomainError("d must be >= 1");
  if (!(scale > Scalar(0))) throw DomainError("scale must be positive");
  std::mt19937_64 rng(derive_seed(seed, Stream::Init));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(d);
  Scalar nrm = 0;
  while (!(nrm > Scalar(0))) {
    for (Eigen::Index j = 0; j < d; ++j) v(j) = static_cast<Scalar>(normal(rng));
    nrm = v.norm();
  }
  return v * (scale / nrm);
}

}  // namespace mlrem
