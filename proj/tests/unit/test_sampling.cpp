#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "relsmooth/errors.hpp"
#include "relsmooth/sampling.hpp"

using namespace relsmooth;

TEST_SUITE("sampling") {

TEST_CASE("full sampling always draws every coordinate") {
    Rng rng = make_stream(1);
    const Sampling s = Sampling::full(6);
    for (int i = 0; i < 50; ++i) {
        const CoordinateSet c = draw(s, rng);
        CHECK(c == CoordinateSet{0, 1, 2, 3, 4, 5});
    }
}

TEST_CASE("draws have tau distinct in-range indices") {
    Rng rng = make_stream(2);
    for (Index n : {1, 2, 5, 17}) {
        for (Index tau = 1; tau <= n; ++tau) {
            SamplingWorkspace ws(Sampling(n, tau));
            for (int i = 0; i < 100; ++i) {
                const CoordinateSet& c = ws.draw(rng);
                REQUIRE(static_cast<Index>(c.size()) == tau);
                std::set<Index> u(c.begin(), c.end());
                CHECK(static_cast<Index>(u.size()) == tau);
                CHECK(*u.begin() >= 0);
                CHECK(*u.rbegin() < n);
            }
        }
    }
}

TEST_CASE("invalid samplings") {
    CHECK_THROWS_AS(Sampling(0, 1), InvalidParams);
    CHECK_THROWS_AS(Sampling(3, 0), InvalidParams);
    CHECK_THROWS_AS(Sampling(3, 4), InvalidParams);
}

TEST_CASE("single coordinate frequencies are fair") {
    Rng rng = make_stream(3);
    const Sampling s = Sampling::single_uniform(2);
    const int N = 10000;
    int first = 0;
    for (int i = 0; i < N; ++i) {
        first += draw(s, rng)[0] == 0 ? 1 : 0;
    }
    const double sd = std::sqrt(0.25 / N);
    CHECK(std::abs(first / static_cast<double>(N) - 0.5) <= 3 * sd);
}

TEST_CASE("pairs out of four are uniform (chi-square)") {
    Rng rng = make_stream(4);
    const Sampling s(4, 2);
    std::map<std::pair<Index, Index>, int> counts;
    // oracle distribution: the six subsets enumerated directly
    std::vector<std::pair<Index, Index>> all;
    for (Index i = 0; i < 4; ++i) {
        for (Index j = i + 1; j < 4; ++j) {
            all.emplace_back(i, j);
        }
    }
    REQUIRE(all.size() == 6);
    const int N = 10000;
    for (int k = 0; k < N; ++k) {
        CoordinateSet c = draw(s, rng);
        std::sort(c.begin(), c.end());
        ++counts[{c[0], c[1]}];
    }
    double chi2 = 0.0;
    for (const auto& pr : all) {
        const double expected = N / 6.0;
        const double d = counts[pr] - expected;
        chi2 += d * d / expected;
    }
    // 0.999 quantile of chi-square with 5 degrees of freedom
    CHECK(chi2 < 20.515);
}

TEST_CASE("empirical marginals") {
    Rng rng = make_stream(5);
    const Index n = 10, tau = 3;
    const Sampling s(n, tau);
    SamplingWorkspace ws(s);
    const int N = 20000;
    std::vector<int> hits(n, 0);
    for (int k = 0; k < N; ++k) {
        for (Index i : ws.draw(rng)) {
            ++hits[static_cast<std::size_t>(i)];
        }
    }
    const double p0 = s.marginal();
    const double band = 4.0 * std::sqrt(p0 * (1 - p0) / N);
    for (Index i = 0; i < n; ++i) {
        CHECK(std::abs(hits[static_cast<std::size_t>(i)] / static_cast<double>(N) - p0) <= band);
    }
}

TEST_CASE("probability vector") {
    CHECK(probability_vector(Sampling::full(5)) == Vector::Ones(5));
    CHECK((probability_vector(Sampling::single_uniform(100)).array() == 0.01).all());
    CHECK((probability_vector(Sampling(4, 3)).array() == 0.75).all());
}

TEST_CASE("subset enumeration") {
    int count = 0;
    std::set<CoordinateSet> seen;
    for_each_subset(Sampling(5, 3), [&](const CoordinateSet& c) {
        ++count;
        seen.insert(c);
        CHECK(std::is_sorted(c.begin(), c.end()));
    });
    CHECK(count == 10);
    CHECK(seen.size() == 10);
    CHECK(subset_count(Sampling(5, 3), 100) == 10);
    CHECK(subset_count(Sampling(60, 30), 1000000) == 0);
    CHECK(subset_count(Sampling(7, 7), 10) == 1);
}

TEST_CASE("streams are deterministic and distinct") {
    Rng a = make_stream(42, 0);
    Rng b = make_stream(42, 0);
    Rng c = make_stream(42, 1);
    Rng d = make_stream(43, 0);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

}  // TEST_SUITE
