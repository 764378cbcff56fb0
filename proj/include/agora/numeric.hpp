#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace agora {

// log(sum(exp(x))) without overflow; -inf for an empty span.
inline double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) {
        return m;
    }
    double acc = 0.0;
    for (const double x : xs) {
        acc += std::exp(x - m);
    }
    return m + std::log(acc);
}

// KL divergence between two finite distributions over the same support, nats.
// Conventions: 0*log(0/q) = 0; p>0 with q=0 yields +inf.
inline double discrete_kl(std::span<const double> p, std::span<const double> q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] <= 0.0) {
            continue;
        }
        if (q[k] <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        acc += p[k] * std::log(p[k] / q[k]);
    }
    return acc;
}

inline bool nearly_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

} // namespace agora
