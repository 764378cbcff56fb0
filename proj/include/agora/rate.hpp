#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "agora/belief.hpp"
#include "agora/errors.hpp"
#include "agora/graph.hpp"
#include "agora/rng.hpp"

namespace agora {

// Log-belief values below this are treated as floored when recording traces
// and fitting decay rates; keeps serialized traces clear of -inf.
inline constexpr double kLogBeliefFloor = -700.0;

// Exact statistical description of one agent's observation channel over
// finite input and label alphabets: the local input distribution, the true
// conditional labeling law, and the candidate conditional laws per parameter.
struct DiscreteAgentModel {
    std::vector<double> input_values;
    std::vector<double> input_probs;
    std::vector<std::vector<double>> truth;            // [input][label]
    std::vector<std::vector<std::vector<double>>> lik; // [theta][input][label]

    std::size_t input_count() const { return input_values.size(); }
    std::size_t theta_count() const { return lik.size(); }
};

void require_well_formed(const DiscreteAgentModel& agent);

// Estimated expectation with its Monte Carlo standard error (0 when exact).
struct DivergenceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0; // 0 for exact enumeration
};

// Per-agent oracle for E_{P_i}[KL(truth(.|X) || lik(.|theta, X))], one
// observation. Exact enumeration for finite input spaces, seeded Monte Carlo
// otherwise; both shapes hide behind the same callable.
using ExpectedKlFn = std::function<DivergenceEstimate(std::size_t theta)>;

// Exact enumeration over the finite input alphabet.
ExpectedKlFn make_exact_expected_kl(const DiscreteAgentModel& agent);

// Seeded Monte Carlo over a sampleable input space. kl_at must return the
// per-input divergence KL(truth(.|x) || lik(.|theta, x)). Each call re-seeds
// from (seed, theta), so repeated evaluations are deterministic.
ExpectedKlFn make_monte_carlo_expected_kl(std::function<double(Rng&)> draw_input,
                                          std::function<double(std::size_t, double)> kl_at,
                                          std::size_t mc_samples, std::uint64_t seed);

// Locally optimal parameters: the argmin set of the expected divergence, with
// ties kept at tolerance tie_tol.
std::vector<std::size_t> local_optimal_set(const ExpectedKlFn& expected_kl,
                                           std::size_t theta_count, double tie_tol = 1e-9);

struct LearnableSet {
    std::vector<std::size_t> theta_star; // sorted
    bool globally_learnable = false;     // false iff intersection is empty

    bool contains(std::size_t theta) const;
};

// Intersection of the per-agent optimal sets. An empty intersection is a
// validation outcome, not an exception.
LearnableSet global_learnable_set(const std::vector<std::vector<std::size_t>>& locals);

// Batch-level divergence gap
//   I_j = M * E_{P_j}[KL(truth||lik(theta)) - KL(truth||lik(theta_star))].
// The contract requires theta_star in Theta* and theta outside it.
DivergenceEstimate divergence_gap(const ExpectedKlFn& expected_kl, std::size_t batch_size,
                                  std::size_t theta_star, std::size_t theta,
                                  const LearnableSet& learnable);

struct RateConstant {
    double k_theta = std::numeric_limits<double>::infinity();
    bool degenerate = false; // Theta* == Theta: no wrong parameter exists
    std::size_t argmin_theta_star = 0;
    std::size_t argmin_theta = 0;
};

// K(Theta) = min over (theta* in Theta*, theta outside) of
// sum_j v_j I_j(theta*, theta). Ties are broken by parameter ordering.
// divergence(j, ts, th) must return the batch-level I_j.
RateConstant rate_constant(
    const Eigen::VectorXd& centrality, const LearnableSet& learnable, std::size_t theta_count,
    const std::function<double(std::size_t j, std::size_t ts, std::size_t th)>& divergence);

struct SampleComplexity {
    std::uint64_t rounds = 0;
    bool vacuous = false; // epsilon >= K(Theta): the exponent is nonpositive
};

// ceil( 8 C log(N |Theta| / delta) / (epsilon^2 (1 - lambda_max)) ).
// k_theta is only consulted for the vacuous flag; pass +inf to skip it.
SampleComplexity sample_complexity(double k_theta, std::size_t n_agents, std::size_t theta_count,
                                   double delta, double epsilon, double c,
                                   double spectral_gap);

struct DecayFit {
    double slope = 0.0;     // nats per round
    double std_error = 0.0; // OLS standard error of the slope
    std::size_t rounds_used = 0;
    bool truncated = false; // the trace hit the log floor before burn-in ended
};

// Least-squares slope of -log b^(n)(theta) against n over post-burn-in
// rounds. Samples at or below the log floor are excluded; if the floor is
// reached before burn-in ends, the fit falls back to all pre-floor rounds and
// sets the truncation flag.
DecayFit empirical_decay_rate(std::span<const double> log_belief_trace, std::size_t burn_in);

struct RateReport {
    std::vector<std::string> theta_labels;
    LearnableSet learnable;
    // divergences[a][b] = batch-level I_j per agent j, for the a-th element of
    // Theta* against the b-th wrong parameter (ordering follows theta_star and
    // wrong_thetas).
    std::vector<std::size_t> wrong_thetas;
    std::vector<std::vector<std::vector<DivergenceEstimate>>> divergences;
    RateConstant rate;
    Eigen::VectorXd centrality;
    double lambda_max = 0.0;
    double spectral_gap = 0.0;
    double mixing_bound = 0.0;
    double c_constant = 0.0;
    double likelihood_floor = 0.0;
    double likelihood_ceiling = 0.0;
    std::size_t batch_size = 1;
};

// Full Theorem-1 analysis for a network of agents described by per-agent
// expected-KL oracles. Throws AssumptionError when the scenario is not
// globally learnable.
RateReport build_rate_report(const WeightMatrix& w, const std::vector<ExpectedKlFn>& agents,
                             const ParameterSet& params, double likelihood_floor,
                             double likelihood_ceiling, std::size_t batch_size);

} // namespace agora
