#include <doctest.h>

#include <cmath>
#include <random>

#include "relsmooth/bregman.hpp"
#include "relsmooth/errors.hpp"
#include "relsmooth/verify.hpp"

using namespace relsmooth;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Index>(v.size()));
    Index i = 0;
    for (double e : v) {
        x[i++] = e;
    }
    return x;
}

// Real root of z + 4a z^3 = c by Cardano (one real root since the cubic is increasing).
double cardano_root(double a, double c) {
    const double p = 1.0 / (4.0 * a);
    const double q = -c / (4.0 * a);
    // x = u + v with u v = -p/3 and u^3 + v^3 = -q; dividing keeps every
    // term positive so small roots do not cancel
    const double disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    if (q == 0.0) {
        return 0.0;
    }
    const double u = std::cbrt(-q / 2.0 + std::copysign(disc, -q));
    const double v = -p / (3.0 * u);
    return -q / (u * u + p / 3.0 + v * v);
}

// Direct evaluation of h(x) - h(y) - <grad h(y), x - y>.
double bregman_by_definition(const ReferenceFunction& h, const Vector& x, const Vector& y) {
    return eval_h(h, x) - eval_h(h, y) - grad_h(h, y).dot(x - y);
}

ReferenceFunction uniform(Index n, Component c) { return ReferenceFunction::uniform(n, c); }

}  // namespace

TEST_SUITE("bregman") {

TEST_CASE("component values and gradients") {
    CHECK(eval_h(uniform(2, Component::squared_half()), vec({3, 4})) == doctest::Approx(12.5));
    CHECK(eval_h(uniform(2, Component::burg_log()), vec({1, 1})) == 0.0);
    CHECK(eval_h(uniform(1, Component::quadratic_plus_quartic(0.1)), vec({1})) ==
          doctest::Approx(0.6));

    CHECK(grad_h(uniform(1, Component::burg_log()), vec({2}))[0] == doctest::Approx(-0.5));
    CHECK(grad_h(uniform(1, Component::quadratic_plus_quartic(0.1)), vec({1}))[0] ==
          doctest::Approx(1.4));
    const Vector g = grad_h(uniform(2, Component::squared_half()), vec({0, -1}));
    CHECK(g[0] == 0.0);
    CHECK(g[1] == -1.0);
}

TEST_CASE("domain violations throw") {
    const auto burg = uniform(2, Component::burg_log());
    CHECK_THROWS_AS(eval_h(burg, vec({1, 0})), DomainError);
    CHECK_THROWS_AS(grad_h(burg, vec({-1, 1})), DomainError);
    CHECK_THROWS_AS(bregman(burg, vec({1, 1}), vec({1, -2})), DomainError);
    CHECK_THROWS_AS(Component::quadratic_plus_quartic(0.0), InvalidParams);
}

TEST_CASE("bregman distance examples") {
    CHECK(bregman(uniform(2, Component::squared_half()), vec({1, 0}), vec({0, 0})) ==
          doctest::Approx(0.5));
    CHECK(bregman(uniform(1, Component::burg_log()), vec({2}), vec({1})) ==
          doctest::Approx(2.0 - std::log(2.0) - 1.0).epsilon(1e-14));
    const auto sq = uniform(2, Component::squared_half());
    CHECK(weighted_bregman(sq, vec({1, 1}), vec({0, 0}), vec({2, 3})) == doctest::Approx(2.5));
    CHECK(weighted_bregman(uniform(1, Component::burg_log()), vec({2}), vec({1}), vec({10})) ==
          doctest::Approx(10.0 * (1.0 - std::log(2.0))).epsilon(1e-14));
    CHECK_THROWS_AS(weighted_bregman(sq, vec({1, 1}), vec({0, 0}), vec({1})), DimensionMismatch);
    CHECK_THROWS_AS(weighted_bregman(sq, vec({1, 1}), vec({0, 0}), vec({1, 0})), InvalidParams);
}

TEST_CASE("bregman matches the definition and vanishes on the diagonal") {
    Rng rng = make_stream(11);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    std::normal_distribution<double> normal(0.0, 2.0);
    const std::vector<ReferenceFunction> hs = {uniform(5, Component::squared_half()),
                                               uniform(5, Component::burg_log()),
                                               uniform(5, Component::quadratic_plus_quartic(0.1))};
    for (const auto& h : hs) {
        const bool burg = h.all_of(Component::Kind::BurgLog);
        for (int s = 0; s < 200; ++s) {
            Vector x(5), y(5);
            for (Index i = 0; i < 5; ++i) {
                x[i] = burg ? std::pow(10.0, logu(rng)) : normal(rng);
                y[i] = burg ? std::pow(10.0, logu(rng)) : normal(rng);
            }
            const double d = bregman(h, x, y);
            const double ref = bregman_by_definition(h, x, y);
            CHECK(d >= 0.0);
            CHECK(std::abs(d - ref) <= 1e-9 * (1.0 + std::abs(eval_h(h, x)) + std::abs(eval_h(h, y))));
            CHECK(bregman(h, x, x) == 0.0);
            const double c = 3.7;
            CHECK(weighted_bregman(h, x, y, Vector::Constant(5, c)) ==
                  doctest::Approx(c * d).epsilon(1e-12));
        }
    }
}

TEST_CASE("bregman terms stay accurate for nearby points") {
    // D(x, y) ~ (x - y)^2 / (2 y^2) for Burg; the naive formula cancels catastrophically.
    const auto burg = uniform(1, Component::burg_log());
    const double y = 3.0;
    const double eps = 1e-7;
    const double expected = eps * eps / (2.0 * y * y) * (1.0 - 2.0 * eps / (3.0 * y));
    CHECK(bregman(burg, vec({y + eps}), vec({y})) == doctest::Approx(expected).epsilon(1e-8));
    const auto qq = uniform(1, Component::quadratic_plus_quartic(0.25));
    // D = d^2 (1/2 + a (x^2 + 2xy + 3y^2)) exactly
    const double x0 = 1.0 + 1e-6;
    const double x1 = 1.0;
    const double d = x0 - x1;
    CHECK(bregman(qq, vec({x0}), vec({x1})) ==
          doctest::Approx(d * d * (0.5 + 0.25 * (x0 * x0 + 2 * x0 * x1 + 3 * x1 * x1))).epsilon(1e-10));
}

TEST_CASE("gradient inversion") {
    CHECK(invert_grad_coordinate(Component::burg_log(), -0.5) == doctest::Approx(2.0));
    CHECK(invert_grad_coordinate(Component::quadratic_plus_quartic(0.1), 1.4) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(invert_grad_coordinate(Component::quadratic_plus_quartic(0.1), 0.0) == 0.0);
    CHECK(invert_grad_coordinate(Component::squared_half(), -7.25) == -7.25);
    CHECK_THROWS_AS(invert_grad_coordinate(Component::burg_log(), 0.0), RangeError);
    CHECK_THROWS_AS(invert_grad_coordinate(Component::burg_log(), 2.0), RangeError);

    Rng rng = make_stream(12);
    std::uniform_real_distribution<double> loga(-6.0, 3.0);
    std::uniform_real_distribution<double> logc(-8.0, 8.0);
    std::bernoulli_distribution sign;
    for (int s = 0; s < 2000; ++s) {
        const double a = std::pow(10.0, loga(rng));
        const double c = (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, logc(rng));
        const Component comp = Component::quadratic_plus_quartic(a);
        const double z = invert_grad_coordinate(comp, c);
        const double oracle = cardano_root(a, c);
        CHECK(std::abs(z - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
        CHECK(std::abs(comp.derivative(z) - c) <= 1e-12 * std::max(1.0, std::abs(c)));
    }
}

TEST_CASE("inversion composes with the gradient map to the identity") {
    Rng rng = make_stream(13);
    std::normal_distribution<double> normal(0.0, 5.0);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    for (int s = 0; s < 500; ++s) {
        const double z = normal(rng);
        for (const Component& c : {Component::squared_half(), Component::quadratic_plus_quartic(0.1)}) {
            CHECK(invert_grad_coordinate(c, c.derivative(z)) ==
                  doctest::Approx(z).epsilon(1e-10));
        }
        const double zp = std::pow(10.0, logu(rng));
        CHECK(invert_grad_coordinate(Component::burg_log(), Component::burg_log().derivative(zp)) ==
              doctest::Approx(zp).epsilon(1e-12));
    }
}

TEST_CASE("mirror step closed forms") {
    const auto sq = uniform(2, Component::squared_half());
    const Vector z = mirror_step(sq, FeasibleSet::full_space(), vec({1, 1}), vec({2, 0}), 2.0);
    CHECK(z[0] == doctest::Approx(0.0));
    CHECK(z[1] == doctest::Approx(1.0));

    const auto burg1 = uniform(1, Component::burg_log());
    CHECK(mirror_step(burg1, FeasibleSet::positive_orthant(), vec({1}), vec({1}), 2.0)[0] ==
          doctest::Approx(2.0 / 3.0));

    const auto burg2 = uniform(2, Component::burg_log());
    const MirrorStepResult r = mirror_step_detailed(burg2, FeasibleSet::simplex(), vec({0.5, 0.5}),
                                                    vec({0.3, 0.3}), 1.0);
    CHECK(r.z[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.z[1] == doctest::Approx(0.5).epsilon(1e-12));
    // the symmetric point is stationary with multiplier -g
    CHECK(r.multiplier == doctest::Approx(-0.3).epsilon(1e-9));
}

TEST_CASE("one-dimensional Burg step equals a grid argmin") {
    // <g, z> + L D(z, x) with x = 2, g = 0.5, L = 1: minimizer z = 1
    const auto burg = uniform(1, Component::burg_log());
    const double x = 2.0, g = 0.5, L = 1.0;
    double best_z = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 400000; ++i) {
        const double z = i * 1e-5;
        const double val = g * z + L * (z / x - std::log(z / x) - 1.0);
        if (val < best) {
            best = val;
            best_z = z;
        }
    }
    const double z = mirror_step(burg, FeasibleSet::positive_orthant(), vec({x}), vec({g}), L)[0];
    CHECK(z == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(z - best_z) <= 1e-5);
}

TEST_CASE("restricted coordinates and per-coordinate scales") {
    const auto sq = uniform(3, Component::squared_half());
    const Vector x = vec({1, 2, 3});
    const Vector g = vec({1, 1, 1});
    const Vector z = mirror_step(sq, FeasibleSet::full_space(), x, g, vec({1, 2, 4}),
                                 CoordinateSet{0, 2});
    CHECK(z[0] == doctest::Approx(0.0));
    CHECK(z[1] == 2.0);
    CHECK(z[2] == doctest::Approx(2.75));
}

TEST_CASE("box and orthant clipping") {
    const auto sq = uniform(2, Component::squared_half());
    const FeasibleSet box = FeasibleSet::box(vec({-1, -1}), vec({1, 1}));
    const Vector z = mirror_step(sq, box, vec({0, 0}), vec({5, -0.5}), 1.0);
    CHECK(z[0] == -1.0);
    CHECK(z[1] == doctest::Approx(0.5));
    const Vector w = mirror_step(sq, FeasibleSet::positive_orthant(), vec({1, 1}), vec({3, -1}), 1.0);
    CHECK(w[0] == 0.0);
    CHECK(w[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(FeasibleSet::box(vec({1}), vec({0})), InvalidParams);
}

TEST_CASE("Burg steps that leave the orthant are reported") {
    const auto burg = uniform(1, Component::burg_log());
    // -1/x - g/L = -1 + 2 >= 0: no minimizer
    CHECK_THROWS_AS(mirror_step(burg, FeasibleSet::positive_orthant(), vec({1}), vec({-2}), 1.0),
                    StepOutOfDomain);
    CHECK_THROWS_AS(mirror_step(burg, FeasibleSet::full_space(), vec({1}), vec({-1}), 1.0),
                    StepOutOfDomain);
}

TEST_CASE("simplex step satisfies the multiplier equations") {
    Rng rng = make_stream(14);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 0; s < 300; ++s) {
        const Index n = 2 + s % 7;
        Vector x(n), g(n), L(n);
        for (Index i = 0; i < n; ++i) {
            x[i] = std::pow(10.0, logu(rng));
            g[i] = normal(rng) * std::pow(10.0, logu(rng) / 2);
            L[i] = std::pow(10.0, logu(rng) / 3);
        }
        x /= x.sum();
        const auto h = uniform(n, Component::burg_log());
        const MirrorStepResult r = mirror_step_detailed(h, FeasibleSet::simplex(), x, g, L);
        CHECK(std::abs(r.z.sum() - 1.0) <= 1e-12);
        CHECK((r.z.array() > 0.0).all());
        // recover the multiplier from each coordinate: L_i (1/z_i - 1/x_i) - g_i must agree
        for (Index i = 0; i < n; ++i) {
            const double lam = L[i] * (1.0 / r.z[i] - 1.0 / x[i]) - g[i];
            CHECK(std::abs(lam - r.multiplier) <=
                  1e-8 * std::max({1.0, std::abs(r.multiplier), L[i] / r.z[i]}));
        }
    }
}

TEST_CASE("simplex requires Burg components") {
    CHECK_THROWS_AS(mirror_step(uniform(2, Component::squared_half()), FeasibleSet::simplex(),
                                vec({0.5, 0.5}), vec({0, 0}), 1.0),
                    InvalidParams);
}

TEST_CASE("symmetry measure") {
    CHECK(known_symmetry_measure(uniform(3, Component::squared_half())) == 1.0);
    CHECK_FALSE(known_symmetry_measure(uniform(3, Component::burg_log())).has_value());

    Rng rng = make_stream(15);
    const auto sq = uniform(3, Component::squared_half());
    PairSampler normal_pairs = [](Rng& r) {
        std::normal_distribution<double> nd;
        Vector x(3), y(3);
        for (Index i = 0; i < 3; ++i) {
            x[i] = nd(r);
            y[i] = nd(r);
        }
        return std::make_pair(x, y);
    };
    CHECK(symmetry_measure_estimate(sq, normal_pairs, 100, rng) == doctest::Approx(1.0).epsilon(1e-12));

    // D(1, t) / D(t, 1) for Burg decreases toward 0
    const auto burg = uniform(1, Component::burg_log());
    double prev = 1.0;
    for (double t : {10.0, 100.0, 1000.0}) {
        PairSampler one = [t](Rng&) { return std::make_pair(vec({1.0}), vec({t})); };
        const double ratio = symmetry_measure_estimate(burg, one, 1, rng);
        const double direct = bregman(burg, vec({1}), vec({t})) / bregman(burg, vec({t}), vec({1}));
        CHECK(ratio == doctest::Approx(direct).epsilon(1e-14));
        CHECK(ratio < prev);
        prev = ratio;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("three point property on the shipped geometries") {
    Rng rng = make_stream(16);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> logu(-2.0, 2.0);

    // Euclidean: cosine law, slack is zero up to round-off
    const auto sq = uniform(4, Component::squared_half());
    const PointSampler eu = domain_point_sampler(sq, FeasibleSet::full_space(), 1.0);
    std::vector<Vector> pts;
    for (int i = 0; i < 200; ++i) {
        pts.push_back(eu(rng));
    }
    const CheckReport r1 = check_three_point(sq, FeasibleSet::full_space(), eu(rng), eu(rng), pts);
    CHECK(r1.pass);
    CHECK(std::abs(r1.worst_slack) < 1e-12);

    // Burg on the simplex with the bisection solver
    const auto burg = uniform(5, Component::burg_log());
    const PointSampler sp = domain_point_sampler(burg, FeasibleSet::simplex(), 1.0);
    std::vector<Vector> spts;
    for (int i = 0; i < 1000; ++i) {
        spts.push_back(sp(rng));
    }
    Vector c(5);
    for (Index i = 0; i < 5; ++i) {
        c[i] = normal(rng);
    }
    const CheckReport r2 = check_three_point(burg, FeasibleSet::simplex(), sp(rng), c, spts);
    CHECK(r2.pass);

    // weighted variant with a quartic reference
    const auto qq = uniform(5, Component::quadratic_plus_quartic(0.1));
    const PointSampler qs = domain_point_sampler(qq, FeasibleSet::full_space(), 2.0);
    std::vector<Vector> qpts;
    for (int i = 0; i < 500; ++i) {
        qpts.push_back(qs(rng));
    }
    Vector v(5);
    for (Index i = 0; i < 5; ++i) {
        v[i] = std::pow(10.0, logu(rng));
    }
    const CheckReport r3 = check_three_point(qq, FeasibleSet::full_space(), qs(rng), qs(rng), qpts, v);
    CHECK(r3.pass);
}

}  // TEST_SUITE
