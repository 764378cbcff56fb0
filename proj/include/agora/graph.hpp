#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "agora/errors.hpp"

namespace agora {

// Row-stochastic social interaction matrix. Entry (i, j) is the confidence
// agent i places on information received from agent j; the directed adjacency
// is derived from strict positivity of the entries and never stored
// separately. Construction only enforces shape and finiteness so that broken
// matrices can still be inspected; semantic checks live in
// validate_weight_matrix().
class WeightMatrix {
public:
    static constexpr std::size_t kMaxAgents = 512;
    static constexpr double kRowSumTolerance = 1e-12;

    explicit WeightMatrix(Eigen::MatrixXd weights);

    static WeightMatrix identity(Eigen::Index n);

    Eigen::Index size() const { return weights_.rows(); }
    const Eigen::MatrixXd& weights() const { return weights_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return weights_(i, j); }

    // Agents j whose information reaches i, i.e. W_ij > 0.
    std::vector<Eigen::Index> neighbors_of(Eigen::Index i) const;

    bool operator==(const WeightMatrix& other) const { return weights_ == other.weights_; }

private:
    Eigen::MatrixXd weights_;
};

enum class MatrixViolationKind {
    EntryRange,     // some W_ij outside [0, 1]
    RowSum,         // row does not sum to 1 within tolerance
    SelfLoop,       // W_ii == 0 for some i
    NotIrreducible, // positivity digraph is not strongly connected
    NotAperiodic,   // gcd of cycle lengths exceeds 1
};

struct MatrixViolation {
    MatrixViolationKind kind;
    std::string detail;
};

// All invariant violations of W, empty when the matrix satisfies the
// stochasticity, self-loop, irreducibility and aperiodicity requirements.
std::vector<MatrixViolation> validate_weight_matrix(const WeightMatrix& w);

bool is_valid(const WeightMatrix& w);

// Throws InputError listing every violation; no-op for valid matrices.
void require_valid(const WeightMatrix& w);

// Unique stationary distribution v with v^T W = v^T, sum 1, all entries
// strictly positive. Power iteration on W^T to tolerance 1e-12, at most 1e6
// iterations; non-convergence raises NumericError carrying the residual.
Eigen::VectorXd stationary_distribution(const WeightMatrix& w);

struct SpectralGap {
    double lambda_max;           // second-largest eigenvalue modulus
    double gap;                  // 1 - lambda_max
    double lambda_second_signed; // largest real part among non-Perron eigenvalues
};

// Dense eigensolve; the Perron root (the eigenvalue closest to 1) is removed
// and lambda_max is the largest modulus among the rest. The signed variant is
// reported alongside as a diagnostic because the modulus/signed distinction
// matters for non-reversible matrices.
SpectralGap spectral_gap(const WeightMatrix& w);

// 4*log(N) / (1 - lambda_max). Degenerate graphs (gap below 1e-12) raise
// NumericError.
double mixing_bound(const WeightMatrix& w);

// Per-agent cumulative deviation sum_{k=1..horizon} sum_j |W^k_ij - v_j|,
// computed by exact repeated matrix products. Monotone nondecreasing in the
// horizon; horizon must be in [1, 1e5].
Eigen::VectorXd powers_deviation(const WeightMatrix& w, std::size_t horizon);

struct SpectralSummary {
    Eigen::VectorXd centrality; // stationary distribution v
    double lambda_max = 0.0;
    double spectral_gap = 0.0;
    double mixing_bound = 0.0;
    double lambda_second_signed = 0.0; // diagnostic, see SpectralGap
};

SpectralSummary spectral_summary(const WeightMatrix& w);

// Edge-list text format: a header line "agents N" followed by one line per
// directed edge "i j w_ij" with 0-indexed agent ids. Unlisted entries are 0.
WeightMatrix load_edge_list(std::istream& in);
WeightMatrix load_edge_list_file(const std::filesystem::path& path);
void save_edge_list(const WeightMatrix& w, std::ostream& out);

} // namespace agora
