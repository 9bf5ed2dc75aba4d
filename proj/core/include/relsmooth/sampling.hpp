#pragma once

#include <vector>

#include "relsmooth/types.hpp"

namespace relsmooth {

/// Uniform law over all size-tau subsets of {0, ..., n-1}. Every coordinate
/// is included with probability tau/n.
class Sampling {
public:
    Sampling(Index n, Index tau);

    static Sampling single_uniform(Index n) { return Sampling(n, 1); }
    static Sampling full(Index n) { return Sampling(n, n); }

    Index dimension() const { return n_; }
    Index tau() const { return tau_; }
    double marginal() const { return static_cast<double>(tau_) / static_cast<double>(n_); }
    bool is_serial() const { return tau_ == 1; }

    bool operator==(const Sampling&) const = default;

private:
    Index n_;
    Index tau_;
};

/// Reusable scratch space for repeated draws (avoids an allocation per call).
class SamplingWorkspace {
public:
    explicit SamplingWorkspace(const Sampling& s);

    /// Partial Fisher-Yates: the first tau entries of the permutation buffer.
    /// The returned reference is valid until the next draw.
    const CoordinateSet& draw(Rng& rng);

private:
    Sampling sampling_;
    CoordinateSet perm_;
    CoordinateSet out_;
};

CoordinateSet draw(const Sampling& s, Rng& rng);

Vector probability_vector(const Sampling& s);

/// Number of size-tau subsets, or 0 when it exceeds `cap`.
std::size_t subset_count(const Sampling& s, std::size_t cap);

/// Calls fn(subset) for every size-tau subset in lexicographic order.
template <class Fn>
void for_each_subset(const Sampling& s, Fn&& fn) {
    const Index n = s.dimension();
    const Index tau = s.tau();
    CoordinateSet idx(static_cast<std::size_t>(tau));
    for (Index j = 0; j < tau; ++j) {
        idx[static_cast<std::size_t>(j)] = j;
    }
    while (true) {
        fn(static_cast<const CoordinateSet&>(idx));
        Index j = tau - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - tau + j) {
            --j;
        }
        if (j < 0) {
            return;
        }
        ++idx[static_cast<std::size_t>(j)];
        for (Index l = j + 1; l < tau; ++l) {
            idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
        }
    }
}

}  // namespace relsmooth
