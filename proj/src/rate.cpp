#include "agora/rate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agora/numeric.hpp"

namespace agora {

void require_well_formed(const DiscreteAgentModel& agent) {
    if (agent.input_values.empty() || agent.input_probs.size() != agent.input_values.size()) {
        throw InputError("agent model: input values and probabilities disagree");
    }
    double total = 0.0;
    for (const double p : agent.input_probs) {
        if (p < 0.0) {
            throw InputError("agent model: negative input probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "agent model: input probabilities sum to " << total;
        throw InputError(msg.str());
    }
    if (agent.truth.size() != agent.input_count()) {
        throw InputError("agent model: truth table does not cover the input alphabet");
    }
    if (agent.lik.empty()) {
        throw InputError("agent model: empty parameter set");
    }
    for (const auto& per_theta : agent.lik) {
        if (per_theta.size() != agent.input_count()) {
            throw InputError("agent model: likelihood table does not cover the input alphabet");
        }
    }
}

ExpectedKlFn make_exact_expected_kl(const DiscreteAgentModel& agent) {
    require_well_formed(agent);
    return [agent](std::size_t theta) {
        if (theta >= agent.theta_count()) {
            throw InputError("expected KL: parameter index out of range");
        }
        double acc = 0.0;
        for (std::size_t xi = 0; xi < agent.input_count(); ++xi) {
            if (agent.input_probs[xi] == 0.0) {
                continue;
            }
            acc += agent.input_probs[xi] * discrete_kl(agent.truth[xi], agent.lik[theta][xi]);
        }
        return DivergenceEstimate{acc, 0.0, 0};
    };
}

ExpectedKlFn make_monte_carlo_expected_kl(std::function<double(Rng&)> draw_input,
                                          std::function<double(std::size_t, double)> kl_at,
                                          std::size_t mc_samples, std::uint64_t seed) {
    if (mc_samples < 2) {
        throw InputError("Monte Carlo expected KL needs at least 2 samples");
    }
    return [draw_input = std::move(draw_input), kl_at = std::move(kl_at), mc_samples,
            seed](std::size_t theta) {
        Rng rng = Rng::stream(seed, theta);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t s = 0; s < mc_samples; ++s) {
            const double x = draw_input(rng);
            const double kl = kl_at(theta, x);
            sum += kl;
            sum_sq += kl * kl;
        }
        const double n = static_cast<double>(mc_samples);
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        return DivergenceEstimate{mean, std::sqrt(var / n), mc_samples};
    };
}

std::vector<std::size_t> local_optimal_set(const ExpectedKlFn& expected_kl,
                                           std::size_t theta_count, double tie_tol) {
    if (theta_count == 0) {
        throw InputError("local optimal set over an empty parameter set");
    }
    std::vector<double> values(theta_count);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t theta = 0; theta < theta_count; ++theta) {
        values[theta] = expected_kl(theta).value;
        best = std::min(best, values[theta]);
    }
    std::vector<std::size_t> out;
    for (std::size_t theta = 0; theta < theta_count; ++theta) {
        if (values[theta] <= best + tie_tol) {
            out.push_back(theta);
        }
    }
    return out;
}

bool LearnableSet::contains(std::size_t theta) const {
    return std::binary_search(theta_star.begin(), theta_star.end(), theta);
}

LearnableSet global_learnable_set(const std::vector<std::vector<std::size_t>>& locals) {
    if (locals.empty()) {
        throw InputError("global learnable set needs at least one agent");
    }
    std::vector<std::size_t> current = locals[0];
    std::sort(current.begin(), current.end());
    for (std::size_t j = 1; j < locals.size(); ++j) {
        std::vector<std::size_t> other = locals[j];
        std::sort(other.begin(), other.end());
        std::vector<std::size_t> next;
        std::set_intersection(current.begin(), current.end(), other.begin(), other.end(),
                              std::back_inserter(next));
        current = std::move(next);
    }
    LearnableSet out;
    out.globally_learnable = !current.empty();
    out.theta_star = std::move(current);
    return out;
}

DivergenceEstimate divergence_gap(const ExpectedKlFn& expected_kl, std::size_t batch_size,
                                  std::size_t theta_star, std::size_t theta,
                                  const LearnableSet& learnable) {
    if (!learnable.contains(theta_star)) {
        throw InputError("divergence gap: theta_star is not globally learnable");
    }
    if (learnable.contains(theta)) {
        throw InputError("divergence gap: theta must lie outside the learnable set");
    }
    if (batch_size == 0) {
        throw InputError("divergence gap: batch size must be positive");
    }
    const DivergenceEstimate at_theta = expected_kl(theta);
    const DivergenceEstimate at_star = expected_kl(theta_star);
    const double m = static_cast<double>(batch_size);
    DivergenceEstimate out;
    out.value = m * (at_theta.value - at_star.value);
    out.std_error =
        m * std::sqrt(at_theta.std_error * at_theta.std_error +
                      at_star.std_error * at_star.std_error);
    out.samples = std::max(at_theta.samples, at_star.samples);
    return out;
}

RateConstant rate_constant(
    const Eigen::VectorXd& centrality, const LearnableSet& learnable, std::size_t theta_count,
    const std::function<double(std::size_t j, std::size_t ts, std::size_t th)>& divergence) {
    if (!learnable.globally_learnable) {
        throw AssumptionError("rate constant undefined: scenario is not globally learnable");
    }
    RateConstant out;
    if (learnable.theta_star.size() == theta_count) {
        out.degenerate = true; // every parameter is optimal, nothing to reject
        return out;
    }
    const std::size_t n = static_cast<std::size_t>(centrality.size());
    bool first = true;
    for (const std::size_t ts : learnable.theta_star) {
        for (std::size_t th = 0; th < theta_count; ++th) {
            if (learnable.contains(th)) {
                continue;
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                sum += centrality(static_cast<Eigen::Index>(j)) * divergence(j, ts, th);
            }
            if (first || sum < out.k_theta) {
                first = false;
                out.k_theta = sum;
                out.argmin_theta_star = ts;
                out.argmin_theta = th;
            }
        }
    }
    return out;
}

SampleComplexity sample_complexity(double k_theta, std::size_t n_agents,
                                   std::size_t theta_count, double delta, double epsilon,
                                   double c, double spectral_gap) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InputError("sample complexity: delta must lie in (0,1)");
    }
    if (!(epsilon > 0.0)) {
        throw InputError("sample complexity: epsilon must be positive");
    }
    if (!(c > 0.0)) {
        throw InputError("sample complexity: C must be positive");
    }
    if (!(spectral_gap > 1e-12)) {
        throw NumericError("sample complexity: degenerate graph, spectral gap too small");
    }
    const double count = static_cast<double>(n_agents) * static_cast<double>(theta_count);
    const double bound = 8.0 * c * std::log(count / delta) / (epsilon * epsilon * spectral_gap);
    SampleComplexity out;
    out.rounds = static_cast<std::uint64_t>(std::ceil(bound));
    out.vacuous = std::isfinite(k_theta) && epsilon >= k_theta;
    return out;
}

DecayFit empirical_decay_rate(std::span<const double> log_belief_trace, std::size_t burn_in) {
    if (log_belief_trace.size() <= burn_in + 10) {
        throw InputError("decay fit: trace must be longer than burn_in + 10 rounds");
    }
    // First round at which the trace is floored; everything from there on is
    // saturated and carries no slope information.
    std::size_t first_floor = log_belief_trace.size();
    for (std::size_t n = 0; n < log_belief_trace.size(); ++n) {
        if (log_belief_trace[n] <= kLogBeliefFloor) {
            first_floor = n;
            break;
        }
    }
    DecayFit out;
    std::size_t begin = burn_in + 1;
    if (first_floor <= burn_in) {
        out.truncated = true;
        begin = 1;
    }
    const std::size_t end = std::min(first_floor, log_belief_trace.size());
    if (end <= begin + 1) {
        throw InputError("decay fit: too few pre-floor rounds to fit a slope");
    }

    double sx = 0.0, sy = 0.0;
    const double count = static_cast<double>(end - begin);
    for (std::size_t n = begin; n < end; ++n) {
        sx += static_cast<double>(n);
        sy += -log_belief_trace[n];
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t n = begin; n < end; ++n) {
        const double dx = static_cast<double>(n) - mx;
        sxx += dx * dx;
        sxy += dx * (-log_belief_trace[n] - my);
    }
    out.slope = sxy / sxx;
    out.rounds_used = end - begin;

    double rss = 0.0;
    for (std::size_t n = begin; n < end; ++n) {
        const double fitted = my + out.slope * (static_cast<double>(n) - mx);
        const double r = -log_belief_trace[n] - fitted;
        rss += r * r;
    }
    if (out.rounds_used > 2) {
        out.std_error = std::sqrt(rss / (count - 2.0) / sxx);
    }
    return out;
}

RateReport build_rate_report(const WeightMatrix& w, const std::vector<ExpectedKlFn>& agents,
                             const ParameterSet& params, double likelihood_floor,
                             double likelihood_ceiling, std::size_t batch_size) {
    if (agents.size() != static_cast<std::size_t>(w.size())) {
        throw InputError("rate report: one expected-KL oracle per agent required");
    }
    RateReport report;
    report.theta_labels = params.labels();
    report.batch_size = batch_size;
    report.likelihood_floor = likelihood_floor;
    report.likelihood_ceiling = likelihood_ceiling;
    report.c_constant = std::abs(std::log(likelihood_ceiling / likelihood_floor));

    std::vector<std::vector<std::size_t>> locals;
    locals.reserve(agents.size());
    for (const auto& oracle : agents) {
        locals.push_back(local_optimal_set(oracle, params.size()));
    }
    report.learnable = global_learnable_set(locals);
    if (!report.learnable.globally_learnable) {
        throw AssumptionError(
            "not globally learnable: the per-agent optimal sets have empty intersection");
    }

    for (std::size_t th = 0; th < params.size(); ++th) {
        if (!report.learnable.contains(th)) {
            report.wrong_thetas.push_back(th);
        }
    }
    report.divergences.resize(report.learnable.theta_star.size());
    for (std::size_t a = 0; a < report.learnable.theta_star.size(); ++a) {
        report.divergences[a].resize(report.wrong_thetas.size());
        for (std::size_t b = 0; b < report.wrong_thetas.size(); ++b) {
            report.divergences[a][b].reserve(agents.size());
            for (const auto& oracle : agents) {
                report.divergences[a][b].push_back(
                    divergence_gap(oracle, batch_size, report.learnable.theta_star[a],
                                   report.wrong_thetas[b], report.learnable));
            }
        }
    }

    const SpectralSummary spectral = spectral_summary(w);
    report.centrality = spectral.centrality;
    report.lambda_max = spectral.lambda_max;
    report.spectral_gap = spectral.spectral_gap;
    report.mixing_bound = spectral.mixing_bound;

    const auto lookup = [&report](std::size_t j, std::size_t ts, std::size_t th) {
        const auto star_pos =
            std::lower_bound(report.learnable.theta_star.begin(),
                             report.learnable.theta_star.end(), ts) -
            report.learnable.theta_star.begin();
        const auto wrong_pos = std::lower_bound(report.wrong_thetas.begin(),
                                                report.wrong_thetas.end(), th) -
                               report.wrong_thetas.begin();
        return report
            .divergences[static_cast<std::size_t>(star_pos)][static_cast<std::size_t>(wrong_pos)]
                        [j]
            .value;
    };
    report.rate = rate_constant(report.centrality, report.learnable, params.size(), lookup);
    return report;
}

} // namespace agora
