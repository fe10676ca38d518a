#pragma once

// Kernel smoother f(t*) = k(t*)^T (K + sigma_n^2 I)^{-1} y and its effective
// degrees of freedom, sum_i lambda_i / (lambda_i + sigma_n^2) over the
// spectrum of K, used downstream as the capacity estimate h.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srmks/error.hpp"
#include "srmks/kernels.hpp"
#include "srmks/oscillator.hpp"

namespace srmks {

struct FittedSmoother {
  KernelSpec kernel;
  std::vector<double> t_train;
  double sigma_n = 0.0;
  /// (K + sigma_n^2 I)^{-1} y
  Eigen::VectorXd weights;
  /// Spectrum of K, descending, negatives clamped to 0.
  Eigen::VectorXd eigenvalues;
  /// K * weights: the smoother evaluated at the training inputs.
  Eigen::VectorXd fitted;
  double edf = 0.0;
  /// Diagonal jitter that was needed to factorize, 0 when none.
  double jitter = 0.0;

  std::size_t size() const { return t_train.size(); }
};

/// lambda / (lambda + sigma^2) summed; a zero eigenvalue contributes 0 even
/// when sigma is 0.
inline double effective_dof(const Eigen::VectorXd& eigenvalues, double sigma_n) {
  const double noise_var = sigma_n * sigma_n;
  double df = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda > 0.0) df += lambda / (lambda + noise_var);
  }
  return df;
}

inline double effective_dof(const FittedSmoother& model) { return model.edf; }

namespace detail {

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::VectorXd descending_clamped(const Eigen::VectorXd& ascending) {
  const Eigen::Index n = ascending.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(0.0, ascending[n - 1 - i]);
  return out;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

/// Cholesky of `system`; on failure retries with `base_jitter` added to the
/// diagonal, then 10x and 100x that, before throwing SingularSystem.
inline Factorization factorize_with_jitter(const Eigen::MatrixXd& system, double base_jitter) {
  constexpr int kMaxRetries = 3;
  Factorization f{Eigen::LLT<Eigen::MatrixXd>(system), 0.0};
  for (int retry = 0; f.llt.info() != Eigen::Success; ++retry) {
    if (retry == kMaxRetries || !(base_jitter > 0.0)) {
      throw SingularSystem("K + sigma_n^2 I is not positive definite (last jitter " + std::to_string(f.jitter) + ")");
    }
    f.jitter = retry == 0 ? base_jitter : f.jitter * 10.0;
    Eigen::MatrixXd jittered = system;
    jittered.diagonal().array() += f.jitter;
    f.llt.compute(jittered);
  }
  return f;
}

}  // namespace detail

/// Solves (K + sigma_n^2 I) alpha = y by Cholesky, escalating a diagonal
/// jitter from 1e-12 * trace(K) / n on failure.
inline FittedSmoother fit(const KernelSpec& spec, std::span<const double> t, std::span<const double> y,
                          double sigma_n) {
  detail::require(!t.empty(), "fit: empty training data");
  detail::require(t.size() == y.size(), "fit: t and y lengths differ");
  detail::require(std::isfinite(sigma_n) && sigma_n >= 0.0, "fit: sigma_n must be >= 0");

  GramMatrix k = gram(spec, t);
  const auto n = static_cast<Eigen::Index>(t.size());
  const Eigen::VectorXd targets = detail::to_eigen(y);

  Eigen::MatrixXd system = k.values;
  system.diagonal().array() += sigma_n * sigma_n;

  auto [llt, jitter] = detail::factorize_with_jitter(system, 1e-12 * k.values.trace() / static_cast<double>(n));

  FittedSmoother model{spec, std::vector<double>(t.begin(), t.end()), sigma_n, {}, {}, {}, 0.0, jitter};
  model.weights = llt.solve(targets);
  model.fitted = k.values * model.weights;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.values, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SingularSystem("fit: eigendecomposition did not converge");
  model.eigenvalues = detail::descending_clamped(eig.eigenvalues());
  model.edf = effective_dof(model.eigenvalues, sigma_n);
  return model;
}

inline FittedSmoother fit(const KernelSpec& spec, const TrainingSet& data, double sigma_n) {
  detail::require(!data.t.empty(), "fit: empty training data");
  data.validate();
  return fit(spec, data.t, data.y, sigma_n);
}

inline double predict(const FittedSmoother& model, double t_star) {
  return cross_vector(model.kernel, model.t_train, t_star).dot(model.weights);
}

inline std::vector<double> predict(const FittedSmoother& model, std::span<const double> t_star) {
  std::vector<double> out(t_star.size());
  for (std::size_t i = 0; i < t_star.size(); ++i) out[i] = predict(model, t_star[i]);
  return out;
}

/// One eigendecomposition K1 = U diag(mu) U^T of the unit-amplitude Gram
/// matrix, shared by every sigma_f of a kernel shape. With K = sigma_f^2 K1:
///
///   alpha  = U diag(1 / (sigma_f^2 mu + sigma_n^2)) U^T y
///   fitted = U diag(sigma_f^2 mu / (sigma_f^2 mu + sigma_n^2)) U^T y
class SpectralBasis {
 public:
  SpectralBasis(const KernelSpec& shape, std::span<const double> t)
      : unit_(shape.with_sigma_f(1.0)), t_(t.begin(), t.end()) {
    detail::require(!t_.empty(), "spectral basis: no inputs");
    const GramMatrix k1 = gram(unit_, t_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k1.values);
    if (eig.info() != Eigen::Success) {
      throw SingularSystem("spectral basis: eigendecomposition did not converge");
    }
    mu_ = detail::descending_clamped(eig.eigenvalues());
    vectors_ = eig.eigenvectors().rowwise().reverse();
  }

  const KernelSpec& unit_kernel() const { return unit_; }
  const std::vector<double>& inputs() const { return t_; }
  const Eigen::VectorXd& unit_eigenvalues() const { return mu_; }

  bool matches(const KernelSpec& spec) const { return unit_.same_shape(spec); }

  FittedSmoother fit(double sigma_f, std::span<const double> y, double sigma_n) const {
    detail::require(y.size() == t_.size(), "spectral fit: y length differs from inputs");
    detail::require(std::isfinite(sigma_n) && sigma_n >= 0.0, "spectral fit: sigma_n must be >= 0");
    const KernelSpec spec = unit_.with_sigma_f(sigma_f);
    const double scale = sigma_f * sigma_f;
    const double noise_var = sigma_n * sigma_n;

    const Eigen::VectorXd projected = vectors_.transpose() * detail::to_eigen(y);
    const Eigen::VectorXd lambda = scale * mu_;
    Eigen::VectorXd inverse(lambda.size());
    Eigen::VectorXd shrink(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      const double denom = lambda[i] + noise_var;
      inverse[i] = denom > 0.0 ? 1.0 / denom : 0.0;
      shrink[i] = denom > 0.0 ? lambda[i] / denom : 0.0;
    }

    FittedSmoother model{spec, t_, sigma_n, {}, lambda, {}, 0.0, 0.0};
    model.weights = vectors_ * inverse.cwiseProduct(projected);
    model.fitted = vectors_ * shrink.cwiseProduct(projected);
    model.edf = effective_dof(model.eigenvalues, sigma_n);
    return model;
  }

 private:
  KernelSpec unit_;
  std::vector<double> t_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd vectors_;
};

}  // namespace srmks
