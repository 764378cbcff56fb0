#pragma once

#include <Eigen/Dense>
#include <span>

#include "agora/errors.hpp"

namespace agora {

// Gaussian posterior stored as (mean, precision). The consensus rule is
// linear in precisions, so storing the inverse covariance avoids repeated
// inversions; the covariance is exposed through on-demand solves.
class GaussianBelief {
public:
    static constexpr std::size_t kMaxDimension = 64;
    static constexpr double kSymmetryTolerance = 1e-10;
    static constexpr double kMaxConditionNumber = 1e12;

    GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd precision);

    static GaussianBelief isotropic_prior(Eigen::Index dim, double variance);
    static GaussianBelief diagonal_prior(Eigen::VectorXd mean, const Eigen::VectorXd& variances);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& precision() const { return precision_; }

    Eigen::MatrixXd covariance() const;
    double marginal_variance(Eigen::Index k) const;

    bool operator==(const GaussianBelief& other) const {
        return mean_ == other.mean_ && precision_ == other.precision_;
    }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd precision_;
};

// Solve P x = b for symmetric positive-definite P. NumericError on
// factorization failure or when the Cholesky diagonal suggests a condition
// number beyond kMaxConditionNumber.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& precision, const Eigen::VectorXd& rhs);
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& precision, const Eigen::MatrixXd& rhs);

// One linear-regression observation: y = theta . features + noise,
// noise ~ N(0, noise_std^2).
struct RegressionObservation {
    Eigen::VectorXd features;
    double label = 0.0;
    double noise_std = 1.0;
};

// Exact conjugate posterior for a Gaussian prior and Gaussian likelihood:
//   precision' = precision + (1/a^2) sum phi phi^T
//   precision' mean' = precision mean + (1/a^2) sum y phi
// In this family the KL projection step is exact (the posterior is already
// Gaussian), so no variational machinery is needed. All observations in a
// batch must share one noise level.
GaussianBelief conjugate_update(const GaussianBelief& prior,
                                std::span<const RegressionObservation> batch);

// Precision-weighted log-linear pooling:
//   precision_out = sum_j w_j precision_j
//   precision_out mean_out = sum_j w_j precision_j mean_j
// A convex combination of SPD matrices is SPD, so the result is valid.
GaussianBelief gaussian_consensus(std::span<const GaussianBelief> beliefs,
                                  std::span<const double> weights);

// Closed-form KL divergence KL(p || q) in nats.
double gaussian_kl(const GaussianBelief& p, const GaussianBelief& q);

// Mean squared error of posterior-mean point predictions over a test set.
double predictive_mse(const GaussianBelief& belief,
                      std::span<const RegressionObservation> test_set);

} // namespace agora
