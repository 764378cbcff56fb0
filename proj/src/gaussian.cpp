#include "agora/gaussian.hpp"

#include <cmath>
#include <sstream>

namespace agora {

namespace {

Eigen::LLT<Eigen::MatrixXd> factorize_spd(const Eigen::MatrixXd& precision) {
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
        throw NumericError("matrix is not positive definite");
    }
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
    const double lo = diag.minCoeff();
    const double hi = diag.maxCoeff();
    // (hi/lo)^2 estimates the condition number from the Cholesky diagonal.
    if (!(lo > 0.0) || (hi / lo) * (hi / lo) > GaussianBelief::kMaxConditionNumber) {
        std::ostringstream msg;
        msg << "matrix condition number estimate " << (hi / lo) * (hi / lo) << " exceeds "
            << GaussianBelief::kMaxConditionNumber;
        throw NumericError(msg.str());
    }
    return llt;
}

} // namespace

GaussianBelief::GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
    if (mean_.size() == 0) {
        throw InputError("gaussian belief needs dimension >= 1");
    }
    if (static_cast<std::size_t>(mean_.size()) > kMaxDimension) {
        std::ostringstream msg;
        msg << "gaussian beliefs beyond dimension " << kMaxDimension << " are not supported";
        throw InputError(msg.str());
    }
    if (precision_.rows() != mean_.size() || precision_.cols() != mean_.size()) {
        throw DimensionError("precision matrix shape does not match mean dimension");
    }
    if (!mean_.allFinite() || !precision_.allFinite()) {
        throw InputError("gaussian belief entries must be finite");
    }
    const double asym = (precision_ - precision_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance) {
        std::ostringstream msg;
        msg << "precision matrix asymmetry " << asym << " exceeds " << kSymmetryTolerance;
        throw InputError(msg.str());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(precision_);
    if (llt.info() != Eigen::Success) {
        throw InputError("precision matrix is not positive definite");
    }
}

GaussianBelief GaussianBelief::isotropic_prior(Eigen::Index dim, double variance) {
    if (!(variance > 0.0)) {
        throw InputError("prior variance must be positive");
    }
    return GaussianBelief(Eigen::VectorXd::Zero(dim),
                          Eigen::MatrixXd::Identity(dim, dim) / variance);
}

GaussianBelief GaussianBelief::diagonal_prior(Eigen::VectorXd mean,
                                              const Eigen::VectorXd& variances) {
    if (mean.size() != variances.size()) {
        throw DimensionError("prior mean and variances disagree on dimension");
    }
    Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(mean.size(), mean.size());
    for (Eigen::Index k = 0; k < variances.size(); ++k) {
        if (!(variances(k) > 0.0)) {
            throw InputError("prior variances must be positive");
        }
        precision(k, k) = 1.0 / variances(k);
    }
    return GaussianBelief(std::move(mean), std::move(precision));
}

Eigen::MatrixXd GaussianBelief::covariance() const {
    return solve_spd(precision_, Eigen::MatrixXd::Identity(dim(), dim()));
}

double GaussianBelief::marginal_variance(Eigen::Index k) const {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(dim());
    unit(k) = 1.0;
    return solve_spd(precision_, unit)(k);
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& precision, const Eigen::VectorXd& rhs) {
    return factorize_spd(precision).solve(rhs);
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& precision, const Eigen::MatrixXd& rhs) {
    return factorize_spd(precision).solve(rhs);
}

GaussianBelief conjugate_update(const GaussianBelief& prior,
                                std::span<const RegressionObservation> batch) {
    if (batch.empty()) {
        throw InputError("conjugate update requires a nonempty batch");
    }
    const double noise_std = batch[0].noise_std;
    if (!(noise_std > 0.0)) {
        throw InputError("observation noise must be positive");
    }
    Eigen::MatrixXd precision = prior.precision();
    Eigen::VectorXd info = prior.precision() * prior.mean();
    const double inv_var = 1.0 / (noise_std * noise_std);
    for (const RegressionObservation& obs : batch) {
        if (obs.features.size() != prior.dim()) {
            throw DimensionError("observation feature dimension does not match belief");
        }
        if (!obs.features.allFinite() || !std::isfinite(obs.label)) {
            throw InputError("observation features and label must be finite");
        }
        if (obs.noise_std != noise_std) {
            throw InputError("all observations in a batch must share one noise level");
        }
        precision.noalias() += inv_var * obs.features * obs.features.transpose();
        info.noalias() += inv_var * obs.label * obs.features;
    }
    Eigen::VectorXd mean = solve_spd(precision, info);
    return GaussianBelief(std::move(mean), std::move(precision));
}

GaussianBelief gaussian_consensus(std::span<const GaussianBelief> beliefs,
                                  std::span<const double> weights) {
    if (beliefs.empty()) {
        throw InputError("consensus requires at least one belief");
    }
    if (beliefs.size() != weights.size()) {
        std::ostringstream msg;
        msg << "consensus got " << beliefs.size() << " beliefs but " << weights.size()
            << " weights";
        throw InputError(msg.str());
    }
    const Eigen::Index d = beliefs[0].dim();
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        if (beliefs[j].dim() != d) {
            throw InputError("consensus beliefs must share one dimension");
        }
        if (!(weights[j] > 0.0)) {
            throw InputError("consensus weights must be strictly positive");
        }
        weight_sum += weights[j];
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "consensus weights sum to " << weight_sum << ", expected 1";
        throw InputError(msg.str());
    }

    Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd info = Eigen::VectorXd::Zero(d);
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        precision.noalias() += weights[j] * beliefs[j].precision();
        info.noalias() += weights[j] * (beliefs[j].precision() * beliefs[j].mean());
    }
    Eigen::VectorXd mean = solve_spd(precision, info);
    return GaussianBelief(std::move(mean), std::move(precision));
}

double gaussian_kl(const GaussianBelief& p, const GaussianBelief& q) {
    if (p.dim() != q.dim()) {
        throw DimensionError("KL divergence requires equal dimensions");
    }
    const Eigen::Index d = p.dim();
    // With precisions P_p, P_q: KL = 1/2 [tr(P_q P_p^{-1}) + dm^T P_q dm - d
    //                                     + logdet P_p - logdet P_q]
    const Eigen::MatrixXd p_cov = p.covariance();
    const double trace_term = (q.precision() * p_cov).trace();
    const Eigen::VectorXd dm = q.mean() - p.mean();
    const double quad = dm.dot(q.precision() * dm);

    const auto logdet = [](const Eigen::MatrixXd& m) {
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success) {
            throw NumericError("singular precision in KL computation");
        }
        return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    };
    const double kl =
        0.5 * (trace_term + quad - static_cast<double>(d) + logdet(p.precision()) -
               logdet(q.precision()));
    return std::max(kl, 0.0); // clip rounding noise at exact equality
}

double predictive_mse(const GaussianBelief& belief,
                      std::span<const RegressionObservation> test_set) {
    if (test_set.empty()) {
        throw InputError("predictive MSE over an empty test set");
    }
    double acc = 0.0;
    for (const RegressionObservation& obs : test_set) {
        if (obs.features.size() != belief.dim()) {
            throw DimensionError("test observation dimension does not match belief");
        }
        const double err = obs.label - belief.mean().dot(obs.features);
        acc += err * err;
    }
    return acc / static_cast<double>(test_set.size());
}

} // namespace agora
