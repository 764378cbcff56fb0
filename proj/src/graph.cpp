#include "agora/graph.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace agora {

namespace {

std::string violation_name(MatrixViolationKind kind) {
    switch (kind) {
    case MatrixViolationKind::EntryRange: return "entry-range";
    case MatrixViolationKind::RowSum: return "row-sum";
    case MatrixViolationKind::SelfLoop: return "self-loop";
    case MatrixViolationKind::NotIrreducible: return "not-irreducible";
    case MatrixViolationKind::NotAperiodic: return "not-aperiodic";
    }
    return "unknown";
}

// Reachability of every node from node 0 along `adj`.
bool reaches_all(const std::vector<std::vector<Eigen::Index>>& adj, Eigen::Index n) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const Eigen::Index u = stack.back();
        stack.pop_back();
        for (const Eigen::Index v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

bool strongly_connected(const Eigen::MatrixXd& w) {
    const Eigen::Index n = w.rows();
    if (n == 1) {
        return true;
    }
    std::vector<std::vector<Eigen::Index>> fwd(static_cast<std::size_t>(n));
    std::vector<std::vector<Eigen::Index>> rev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (w(i, j) > 0.0) {
                fwd[static_cast<std::size_t>(i)].push_back(j);
                rev[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
    return reaches_all(fwd, n) && reaches_all(rev, n);
}

// Period of a strongly connected digraph: gcd over all edges (u, v) of
// level(u) + 1 - level(v) with BFS levels from node 0. Aperiodic iff 1.
// Any self-loop contributes gcd(..., 1).
long long graph_period(const Eigen::MatrixXd& w) {
    const Eigen::Index n = w.rows();
    std::vector<long long> level(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> queue{0};
    level[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Eigen::Index u = queue[head];
        for (Eigen::Index v = 0; v < n; ++v) {
            if (w(u, v) > 0.0 && level[static_cast<std::size_t>(v)] < 0) {
                level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    long long g = 0;
    for (Eigen::Index u = 0; u < n; ++u) {
        if (level[static_cast<std::size_t>(u)] < 0) {
            continue;
        }
        for (Eigen::Index v = 0; v < n; ++v) {
            if (w(u, v) > 0.0 && level[static_cast<std::size_t>(v)] >= 0) {
                const long long d = level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)];
                g = std::gcd(g, std::llabs(d));
            }
        }
    }
    return g == 0 ? 1 : g;
}

} // namespace

WeightMatrix::WeightMatrix(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
        std::ostringstream msg;
        msg << "weight matrix must be square, got " << weights_.rows() << "x" << weights_.cols();
        throw DimensionError(msg.str());
    }
    if (weights_.rows() == 0) {
        throw InputError("weight matrix must have at least one agent");
    }
    if (static_cast<std::size_t>(weights_.rows()) > kMaxAgents) {
        std::ostringstream msg;
        msg << "graphs beyond " << kMaxAgents << " agents are not supported (got "
            << weights_.rows() << ")";
        throw InputError(msg.str());
    }
    if (!weights_.allFinite()) {
        throw InputError("weight matrix entries must be finite");
    }
}

WeightMatrix WeightMatrix::identity(Eigen::Index n) {
    return WeightMatrix(Eigen::MatrixXd::Identity(n, n));
}

std::vector<Eigen::Index> WeightMatrix::neighbors_of(Eigen::Index i) const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index j = 0; j < size(); ++j) {
        if (weights_(i, j) > 0.0) {
            out.push_back(j);
        }
    }
    return out;
}

std::vector<MatrixViolation> validate_weight_matrix(const WeightMatrix& w) {
    std::vector<MatrixViolation> out;
    const Eigen::MatrixXd& m = w.weights();
    const Eigen::Index n = w.size();

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (m(i, j) < 0.0 || m(i, j) > 1.0) {
                std::ostringstream msg;
                msg << "entry (" << i << "," << j << ") = " << m(i, j) << " outside [0,1]";
                out.push_back({MatrixViolationKind::EntryRange, msg.str()});
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = m.row(i).sum();
        if (std::abs(s - 1.0) > WeightMatrix::kRowSumTolerance) {
            std::ostringstream msg;
            msg << "row " << i << " sums to " << s << ", expected 1";
            out.push_back({MatrixViolationKind::RowSum, msg.str()});
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(m(i, i) > 0.0)) {
            std::ostringstream msg;
            msg << "agent " << i << " has no self-loop (W_ii = " << m(i, i) << ")";
            out.push_back({MatrixViolationKind::SelfLoop, msg.str()});
        }
    }
    if (!strongly_connected(m)) {
        out.push_back({MatrixViolationKind::NotIrreducible,
                       "positivity digraph is not strongly connected"});
    } else {
        const long long period = graph_period(m);
        if (period != 1) {
            std::ostringstream msg;
            msg << "graph period is " << period << ", expected 1";
            out.push_back({MatrixViolationKind::NotAperiodic, msg.str()});
        }
    }
    return out;
}

bool is_valid(const WeightMatrix& w) {
    return validate_weight_matrix(w).empty();
}

void require_valid(const WeightMatrix& w) {
    const auto violations = validate_weight_matrix(w);
    if (violations.empty()) {
        return;
    }
    std::ostringstream msg;
    msg << "invalid weight matrix:";
    for (const auto& v : violations) {
        msg << " [" << violation_name(v.kind) << "] " << v.detail << ";";
    }
    throw InputError(msg.str());
}

Eigen::VectorXd stationary_distribution(const WeightMatrix& w) {
    require_valid(w);
    const Eigen::Index n = w.size();
    constexpr double kTol = 1e-12;
    constexpr std::size_t kMaxIterations = 1'000'000;

    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd wt = w.weights().transpose();
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd next = wt * v;
        next /= next.sum(); // entries stay positive, renormalize drift away
        residual = (next - v).lpNorm<Eigen::Infinity>();
        v = std::move(next);
        if (residual < kTol) {
            return v;
        }
    }
    std::ostringstream msg;
    msg << "stationary distribution did not converge within " << kMaxIterations
        << " iterations, residual " << residual;
    throw NumericError(msg.str());
}

SpectralGap spectral_gap(const WeightMatrix& w) {
    require_valid(w);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(w.weights(), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigenvalue solver failed on weight matrix");
    }
    const Eigen::VectorXcd lambda = solver.eigenvalues();
    const Eigen::Index n = lambda.size();

    // Perron root: the eigenvalue closest to 1.
    Eigen::Index perron = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double d = std::abs(lambda(k) - std::complex<double>(1.0, 0.0));
        if (d < best) {
            best = d;
            perron = k;
        }
    }
    if (best > 1e-8) {
        std::ostringstream msg;
        msg << "no eigenvalue near 1 (closest at distance " << best << ")";
        throw NumericError(msg.str());
    }

    SpectralGap out{0.0, 1.0, -1.0};
    if (n == 1) {
        return out; // single agent: no subdominant spectrum
    }
    double max_mod = 0.0;
    double max_real = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k == perron) {
            continue;
        }
        max_mod = std::max(max_mod, std::abs(lambda(k)));
        max_real = std::max(max_real, lambda(k).real());
    }
    out.lambda_max = max_mod;
    out.gap = 1.0 - max_mod;
    out.lambda_second_signed = max_real;
    return out;
}

double mixing_bound(const WeightMatrix& w) {
    const SpectralGap sg = spectral_gap(w);
    if (sg.gap < 1e-12) {
        std::ostringstream msg;
        msg << "degenerate graph: spectral gap " << sg.gap << " too small for mixing bound";
        throw NumericError(msg.str());
    }
    return 4.0 * std::log(static_cast<double>(w.size())) / sg.gap;
}

Eigen::VectorXd powers_deviation(const WeightMatrix& w, std::size_t horizon) {
    require_valid(w);
    if (horizon < 1 || horizon > 100'000) {
        throw InputError("powers_deviation horizon must be in [1, 1e5]");
    }
    const Eigen::VectorXd v = stationary_distribution(w);
    const Eigen::Index n = w.size();
    Eigen::MatrixXd power = w.weights();
    Eigen::VectorXd deviation = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0;;) {
        for (Eigen::Index i = 0; i < n; ++i) {
            deviation(i) += (power.row(i).transpose() - v).lpNorm<1>();
        }
        if (++k >= horizon) {
            break;
        }
        power = power * w.weights();
    }
    return deviation;
}

SpectralSummary spectral_summary(const WeightMatrix& w) {
    SpectralSummary out;
    out.centrality = stationary_distribution(w);
    const SpectralGap sg = spectral_gap(w);
    out.lambda_max = sg.lambda_max;
    out.spectral_gap = sg.gap;
    out.lambda_second_signed = sg.lambda_second_signed;
    out.mixing_bound = mixing_bound(w);
    return out;
}

WeightMatrix load_edge_list(std::istream& in) {
    std::string keyword;
    long long n = 0;
    if (!(in >> keyword >> n) || keyword != "agents" || n <= 0) {
        throw ConfigError("edge list must start with a header line 'agents N'");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    long long i = 0;
    long long j = 0;
    double weight = 0.0;
    while (in >> i >> j >> weight) {
        if (i < 0 || i >= n || j < 0 || j >= n) {
            std::ostringstream msg;
            msg << "edge (" << i << "," << j << ") out of range for " << n << " agents";
            throw ConfigError(msg.str());
        }
        m(i, j) = weight;
    }
    if (!in.eof()) {
        throw ConfigError("malformed edge line: expected 'i j w_ij'");
    }
    return WeightMatrix(std::move(m));
}

WeightMatrix load_edge_list_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingInputError("cannot open edge list file: " + path.string());
    }
    return load_edge_list(in);
}

void save_edge_list(const WeightMatrix& w, std::ostream& out) {
    out << "agents " << w.size() << "\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            if (w(i, j) > 0.0) {
                out << i << " " << j << " " << w(i, j) << "\n";
            }
        }
    }
}

} // namespace agora
