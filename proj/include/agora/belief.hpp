#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agora/errors.hpp"

namespace agora {

// Ordered finite parameter set. The ordering is fixed for the lifetime of a
// run; beliefs are indexed against it.
class ParameterSet {
public:
    explicit ParameterSet(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t k) const { return labels_.at(k); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<std::size_t> index_of(std::string_view label) const;

    bool operator==(const ParameterSet&) const = default;

private:
    std::vector<std::string> labels_;
};

// Probability vector over a finite parameter set, kept in log space.
// Invariants: logsumexp(log_probs) == 0 within 1e-9 and every entry finite.
// Beliefs decay like exp(-n K) over a run, so linear-space storage would
// underflow at modest round counts.
class FiniteBelief {
public:
    static constexpr double kNormalizationTolerance = 1e-9;

    static FiniteBelief uniform(std::size_t size);
    static FiniteBelief from_probs(std::span<const double> probs);
    // Normalizes by subtracting the log-sum-exp; entries must be finite.
    static FiniteBelief from_log_probs(std::vector<double> log_probs);

    std::size_t size() const { return log_probs_.size(); }
    double log_prob(std::size_t k) const { return log_probs_[k]; }
    double prob(std::size_t k) const;
    const std::vector<double>& log_probs() const { return log_probs_; }
    std::size_t argmax() const;

    // |logsumexp(log_probs)|, for invariant checks.
    double normalization_defect() const;

    bool operator==(const FiniteBelief&) const = default;

private:
    FiniteBelief() = default;
    std::vector<double> log_probs_;
};

// Likelihood family with evaluation-time clamping into [floor, ceiling].
// Clamping keeps every per-sample log-likelihood finite so degenerate models
// cannot zero out a posterior entry. The bound constant C = |log(ceiling /
// floor)| feeds the sample-complexity bound.
class BoundedLikelihood {
public:
    // Raw log-likelihood of label y under parameter index theta given input x.
    using LogDensityFn = std::function<double(std::size_t theta, double x, double y)>;

    BoundedLikelihood(LogDensityFn log_density, double floor, double ceiling);

    // Clamped per-sample log-likelihood, always in [log floor, log ceiling].
    double log_likelihood(std::size_t theta, double x, double y) const;

    double floor() const { return floor_; }
    double ceiling() const { return ceiling_; }
    double log_ratio_bound() const; // C = |log(ceiling / floor)|

private:
    LogDensityFn log_density_;
    double floor_;
    double ceiling_;
};

// One round of i.i.d. observations for one agent.
struct Batch {
    std::vector<double> inputs;
    std::vector<double> labels;

    std::size_t size() const { return inputs.size(); }
};

void require_well_formed(const Batch& batch);

// Local Bayesian update: log-posterior = log-prior + sum of per-sample
// clamped log-likelihoods, renormalized by log-sum-exp. The batch likelihood
// is the product of per-sample likelihoods (samples are i.i.d.).
FiniteBelief bayes_update(const FiniteBelief& prior, const BoundedLikelihood& lik,
                          const Batch& batch);

// Projection onto the allowed posterior family. With the full simplex as the
// family this is the identity; it exists so the pipeline keeps the five-step
// shape shared with restricted families.
FiniteBelief project_identity(const FiniteBelief& b);

// Log-linear opinion pooling: log q = sum_j weights[j] * log beliefs[j],
// renormalized. Weights must be strictly positive and sum to 1 within 1e-12.
FiniteBelief consensus(std::span<const FiniteBelief> beliefs, std::span<const double> weights);

struct AgentRoundResult {
    FiniteBelief public_belief;  // after local update + projection
    FiniteBelief private_belief; // after consensus with the neighborhood
};

// Full per-agent round: update own state against the batch, then pool with
// the neighborhood's public beliefs. neighbor_publics[self_slot] is the slot
// reserved for this agent's own public belief (the neighborhood contains the
// agent itself); it is replaced by the freshly computed one, and its weight
// must be strictly positive.
AgentRoundResult agent_round(const FiniteBelief& state, const BoundedLikelihood& lik,
                             const Batch& batch, std::span<const FiniteBelief> neighbor_publics,
                             std::span<const double> weights, std::size_t self_slot);

} // namespace agora
