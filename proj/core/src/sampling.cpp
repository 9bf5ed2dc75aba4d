#include "relsmooth/sampling.hpp"

#include <sstream>

#include "relsmooth/errors.hpp"

namespace relsmooth {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
        const std::uint64_t w = splitmix64(state);
        words[2 * i] = static_cast<std::uint32_t>(w);
        words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return Rng(seq);
}

Sampling::Sampling(Index n, Index tau) : n_(n), tau_(tau) {
    if (n < 1 || tau < 1 || tau > n) {
        std::ostringstream os;
        os << "Sampling: need 1 <= tau <= n, got n=" << n << ", tau=" << tau;
        throw InvalidParams(os.str());
    }
}

SamplingWorkspace::SamplingWorkspace(const Sampling& s)
    : sampling_(s), perm_(static_cast<std::size_t>(s.dimension())),
      out_(static_cast<std::size_t>(s.tau())) {
    for (Index i = 0; i < s.dimension(); ++i) {
        perm_[static_cast<std::size_t>(i)] = i;
    }
}

const CoordinateSet& SamplingWorkspace::draw(Rng& rng) {
    const Index n = sampling_.dimension();
    const Index tau = sampling_.tau();
    if (tau == n) {
        // identity order keeps the full-set case reproducible across seeds
        for (Index i = 0; i < n; ++i) {
            out_[static_cast<std::size_t>(i)] = i;
        }
        return out_;
    }
    // perm_ stays a permutation between calls, so any prefix swap sequence
    // still yields an exactly uniform subset.
    for (Index j = 0; j < tau; ++j) {
        std::uniform_int_distribution<Index> pick(j, n - 1);
        const Index r = pick(rng);
        std::swap(perm_[static_cast<std::size_t>(j)], perm_[static_cast<std::size_t>(r)]);
        out_[static_cast<std::size_t>(j)] = perm_[static_cast<std::size_t>(j)];
    }
    return out_;
}

CoordinateSet draw(const Sampling& s, Rng& rng) {
    SamplingWorkspace ws(s);
    return ws.draw(rng);
}

Vector probability_vector(const Sampling& s) {
    return Vector::Constant(s.dimension(), s.marginal());
}

std::size_t subset_count(const Sampling& s, std::size_t cap) {
    const auto n = static_cast<std::size_t>(s.dimension());
    std::size_t k = static_cast<std::size_t>(s.tau());
    if (k > n - k) {
        k = n - k;
    }
    // running product stays an exact binomial coefficient at every step
    double count = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        count = count * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (count > static_cast<double>(cap)) {
            return 0;
        }
    }
    return static_cast<std::size_t>(count + 0.5);
}

}  // namespace relsmooth
