#include "agora/belief.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "agora/numeric.hpp"

namespace agora {

ParameterSet::ParameterSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) {
        throw InputError("parameter set needs at least two parameters");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& label : labels_) {
        if (!seen.insert(label).second) {
            throw InputError("duplicate parameter label: " + label);
        }
    }
}

std::optional<std::size_t> ParameterSet::index_of(std::string_view label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k) {
        if (labels_[k] == label) {
            return k;
        }
    }
    return std::nullopt;
}

FiniteBelief FiniteBelief::uniform(std::size_t size) {
    if (size == 0) {
        throw InputError("belief over empty parameter set");
    }
    FiniteBelief b;
    b.log_probs_.assign(size, -std::log(static_cast<double>(size)));
    return b;
}

FiniteBelief FiniteBelief::from_probs(std::span<const double> probs) {
    std::vector<double> logs(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (!(probs[k] > 0.0)) {
            std::ostringstream msg;
            msg << "belief probabilities must be strictly positive, got " << probs[k]
                << " at index " << k;
            throw InputError(msg.str());
        }
        logs[k] = std::log(probs[k]);
    }
    return from_log_probs(std::move(logs));
}

FiniteBelief FiniteBelief::from_log_probs(std::vector<double> log_probs) {
    if (log_probs.empty()) {
        throw InputError("belief over empty parameter set");
    }
    for (const double lp : log_probs) {
        if (!std::isfinite(lp)) {
            throw InputError("belief log-probabilities must be finite");
        }
    }
    const double z = log_sum_exp(log_probs);
    for (double& lp : log_probs) {
        lp -= z;
    }
    FiniteBelief b;
    b.log_probs_ = std::move(log_probs);
    return b;
}

double FiniteBelief::prob(std::size_t k) const {
    return std::exp(log_probs_[k]);
}

std::size_t FiniteBelief::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(log_probs_.begin(), log_probs_.end()) - log_probs_.begin());
}

double FiniteBelief::normalization_defect() const {
    return std::abs(log_sum_exp(log_probs_));
}

BoundedLikelihood::BoundedLikelihood(LogDensityFn log_density, double floor, double ceiling)
    : log_density_(std::move(log_density)), floor_(floor), ceiling_(ceiling) {
    if (!log_density_) {
        throw InputError("likelihood requires an evaluation function");
    }
    if (!(floor_ > 0.0) || !(ceiling_ > floor_)) {
        std::ostringstream msg;
        msg << "likelihood bounds must satisfy 0 < floor < ceiling, got [" << floor_ << ", "
            << ceiling_ << "]";
        throw InputError(msg.str());
    }
}

double BoundedLikelihood::log_likelihood(std::size_t theta, double x, double y) const {
    const double raw = log_density_(theta, x, y);
    return std::clamp(raw, std::log(floor_), std::log(ceiling_));
}

double BoundedLikelihood::log_ratio_bound() const {
    return std::abs(std::log(ceiling_ / floor_));
}

void require_well_formed(const Batch& batch) {
    if (batch.inputs.size() != batch.labels.size()) {
        std::ostringstream msg;
        msg << "batch has " << batch.inputs.size() << " inputs but " << batch.labels.size()
            << " labels";
        throw InputError(msg.str());
    }
    if (batch.inputs.empty()) {
        throw InputError("batch must contain at least one sample");
    }
}

FiniteBelief bayes_update(const FiniteBelief& prior, const BoundedLikelihood& lik,
                          const Batch& batch) {
    require_well_formed(batch);
    std::vector<double> logs(prior.size());
    for (std::size_t theta = 0; theta < prior.size(); ++theta) {
        double acc = prior.log_prob(theta);
        for (std::size_t m = 0; m < batch.size(); ++m) {
            acc += lik.log_likelihood(theta, batch.inputs[m], batch.labels[m]);
        }
        logs[theta] = acc;
    }
    return FiniteBelief::from_log_probs(std::move(logs));
}

FiniteBelief project_identity(const FiniteBelief& b) {
    return b;
}

FiniteBelief consensus(std::span<const FiniteBelief> beliefs, std::span<const double> weights) {
    if (beliefs.empty()) {
        throw InputError("consensus requires at least one belief");
    }
    if (beliefs.size() != weights.size()) {
        std::ostringstream msg;
        msg << "consensus got " << beliefs.size() << " beliefs but " << weights.size()
            << " weights";
        throw InputError(msg.str());
    }
    const std::size_t k = beliefs[0].size();
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        if (beliefs[j].size() != k) {
            throw InputError("consensus beliefs must share one parameter set");
        }
        if (!(weights[j] > 0.0)) {
            std::ostringstream msg;
            msg << "consensus weight " << j << " must be strictly positive, got " << weights[j];
            throw InputError(msg.str());
        }
        weight_sum += weights[j];
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "consensus weights sum to " << weight_sum << ", expected 1";
        throw InputError(msg.str());
    }

    std::vector<double> logs(k, 0.0);
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        for (std::size_t t = 0; t < k; ++t) {
            logs[t] += weights[j] * beliefs[j].log_prob(t);
        }
    }
    return FiniteBelief::from_log_probs(std::move(logs));
}

AgentRoundResult agent_round(const FiniteBelief& state, const BoundedLikelihood& lik,
                             const Batch& batch, std::span<const FiniteBelief> neighbor_publics,
                             std::span<const double> weights, std::size_t self_slot) {
    if (self_slot >= neighbor_publics.size()) {
        throw InputError("agent_round: self slot outside the neighborhood");
    }
    if (!(self_slot < weights.size() && weights[self_slot] > 0.0)) {
        throw InputError("agent_round: the agent's own weight must be strictly positive");
    }
    AgentRoundResult out{project_identity(bayes_update(state, lik, batch)),
                         FiniteBelief::uniform(state.size())};
    std::vector<FiniteBelief> pool(neighbor_publics.begin(), neighbor_publics.end());
    pool[self_slot] = out.public_belief;
    out.private_belief = consensus(pool, weights);
    return out;
}

} // namespace agora
