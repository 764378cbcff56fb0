#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agora/belief.hpp"
#include "agora/errors.hpp"
#include "agora/gaussian.hpp"
#include "agora/graph.hpp"
#include "agora/rate.hpp"
#include "agora/rng.hpp"

namespace agora {

enum class EngineKind { Finite, Gaussian };

std::string to_string(EngineKind engine);
EngineKind engine_from_string(const std::string& name);

struct TopologySpec {
    enum class Kind { Star, Grid, Ring, Explicit, EdgeListFile, TimeVaryingStar };

    Kind kind = Kind::Explicit;
    std::size_t agents = 0;           // star/ring/time-varying: total agent count
    std::size_t rows = 0;             // grid
    std::size_t cols = 0;             // grid
    double edge_confidence = 0.5;     // star family: weight a edge agents put on the hub
    double self_weight = 0.5;         // ring
    Eigen::MatrixXd weights;          // explicit
    std::string edge_list_path;       // edge-list file
    std::size_t active_per_round = 0; // time-varying star: N_0 active edge agents

    bool operator==(const TopologySpec& other) const;
};

struct FiniteModelSpec {
    enum class Family { Bernoulli, FiniteTable, GridRegression };

    Family family = Family::Bernoulli;
    double likelihood_floor = 1e-12;
    double likelihood_ceiling = 1.0;

    // bernoulli: Theta is a list of head probabilities.
    std::vector<double> theta_values;
    std::size_t truth_index = 0;

    // finite_table: explicit conditional laws per parameter.
    std::vector<std::string> parameter_labels;
    std::vector<double> input_symbols;
    std::vector<double> label_symbols;
    std::vector<std::vector<std::vector<double>>> table; // [theta][input][label]
    // Optional non-realizable truth; defaults to table[truth_index].
    std::vector<std::vector<double>> truth_table; // [input][label], may be empty

    // grid_regression: finite grid over a scalar regression coefficient,
    // Gaussian observation noise.
    double grid_min = -2.0;
    double grid_max = 2.0;
    std::size_t grid_points = 0;
    double theta_star_value = 0.0;
    double noise_std = 1.0;
    std::vector<double> feature_ranges; // per agent, or single value broadcast

    bool operator==(const FiniteModelSpec&) const = default;
};

struct GaussianModelSpec {
    Eigen::VectorXd theta_star;
    double noise_std = 1.0;
    Eigen::VectorXd prior_mean;
    Eigen::VectorXd prior_variances;
    bool bias_feature = true;           // feature layout [1, x...] when set
    std::vector<double> feature_ranges; // per coordinate (iid) or per agent (split)

    bool operator==(const GaussianModelSpec& other) const;
};

struct PartitionSpec {
    enum class Mode { Iid, ByLabel, ByFeatureCoordinate };

    Mode mode = Mode::Iid;
    // ByLabel: per-agent input-symbol indices (finite engine).
    std::vector<std::vector<std::size_t>> assignment;
    // Iid finite: optional global input distribution (uniform when empty).
    std::vector<double> input_probs;

    bool operator==(const PartitionSpec&) const = default;
};

struct Scenario {
    int schema_version = 1;
    std::string name;
    EngineKind engine = EngineKind::Finite;
    TopologySpec topology;
    FiniteModelSpec finite_model;     // consulted when engine == Finite
    GaussianModelSpec gaussian_model; // consulted when engine == Gaussian
    PartitionSpec partition;
    std::size_t batch_size = 1;
    std::size_t rounds = 0;
    std::uint64_t seed = 1;

    bool operator==(const Scenario&) const = default;
};

// Round-indexed communication structure. Static topologies hold one matrix;
// the time-varying star holds one matrix per schedule step together with the
// per-step activity mask (inactive agents sit at self-weight 1).
class TopologySchedule {
public:
    explicit TopologySchedule(WeightMatrix static_matrix);
    TopologySchedule(std::vector<WeightMatrix> cycle, std::vector<std::vector<bool>> active);

    Eigen::Index agents() const { return cycle_.front().size(); }
    bool time_varying() const { return cycle_.size() > 1; }
    std::size_t cycle_length() const { return cycle_.size(); }

    // Rounds are 1-based; round r uses cycle step (r - 1) mod cycle_length.
    const WeightMatrix& at(std::size_t round) const;
    const std::vector<bool>& active_at(std::size_t round) const;
    const WeightMatrix& step(std::size_t k) const { return cycle_.at(k); }

    // Positivity-pattern union over one cycle, row-normalized.
    WeightMatrix union_matrix() const;

private:
    std::vector<WeightMatrix> cycle_;
    std::vector<std::vector<bool>> active_;
};

// Build the communication schedule from a topology spec. Static topologies
// are validated against the full weight-matrix invariants; time-varying
// schedules are validated per step (stochasticity, self-loops) plus strong
// connectivity of the cycle union.
TopologySchedule build_topology(const TopologySpec& spec);

struct PartitionResult {
    // Per-agent distributions over the model's input alphabet (finite engine).
    std::vector<std::vector<double>> input_distributions;
    std::vector<std::string> warnings; // e.g. inputs not covered by any agent
};

// Resolve the data partition for a finite-engine scenario.
PartitionResult partition_inputs(const FiniteModelSpec& model, const PartitionSpec& partition,
                                 std::size_t agents);

// Fully resolved finite-engine scenario: the parameter set, the bounded
// likelihood, per-agent samplers and (when the input space is finite) the
// exact per-agent statistical models for rate analysis.
struct FiniteRuntime {
    ParameterSet params;
    BoundedLikelihood likelihood;
    std::size_t truth_index = 0;
    FiniteBelief prior;
    // One draw = one (input, label) observation.
    std::vector<std::function<std::pair<double, double>(Rng&)>> draw;
    // Exact analysis models; empty when the input space is continuous.
    std::vector<DiscreteAgentModel> discrete;
    // Monte Carlo analysis hooks, populated when `discrete` is empty.
    struct McKl {
        std::function<double(Rng&)> draw_input;
        std::function<double(std::size_t theta, double x)> kl_at;
    };
    std::vector<McKl> mc;
    std::vector<std::string> partition_warnings;
};

struct GaussianRuntime {
    Eigen::Index dim = 0;
    GaussianBelief prior;
    Eigen::VectorXd theta_star;
    double noise_std = 1.0;
    // One draw = one regression observation from the agent's local slice.
    std::vector<std::function<RegressionObservation(Rng&)>> draw;
    // Draw from the global input distribution (all coordinates active).
    std::function<RegressionObservation(Rng&)> draw_global;
};

FiniteRuntime resolve_finite(const Scenario& scenario, Eigen::Index n_agents);
GaussianRuntime resolve_gaussian(const Scenario& scenario, Eigen::Index n_agents);

// Per-agent expected-KL oracles for rate analysis (exact when the runtime
// carries discrete models, seeded Monte Carlo otherwise).
std::vector<ExpectedKlFn> analysis_oracles(const FiniteRuntime& runtime,
                                           std::size_t mc_samples = 100'000,
                                           std::uint64_t seed = 0xa60a);

// Deterministic global test set for regression scenarios, drawn from a
// dedicated stream of the scenario seed.
std::vector<RegressionObservation> make_test_set(const Scenario& scenario, std::size_t size);

// JSON round trip for scenario files (schema_version 1).
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Stable FNV-1a hash of the canonical JSON form, hex-encoded.
std::string scenario_config_hash(const Scenario& scenario);

} // namespace agora
