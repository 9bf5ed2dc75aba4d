#include <doctest.h>

#include <cmath>
#include <vector>

#include "relsmooth/errors.hpp"
#include "relsmooth/theory.hpp"

using namespace relsmooth;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// C_t of the rate recursion, computed directly (no logs)
std::vector<double> raw_rate_weights(double delta, double phi, double psi, long k) {
    std::vector<double> c(static_cast<std::size_t>(k));
    const double r = phi / (phi - delta * psi);
    for (long t = 1; t < k; ++t) {
        c[static_cast<std::size_t>(t - 1)] = std::pow(r, t - 1) * (phi - psi) / (phi / delta - psi);
    }
    c[static_cast<std::size_t>(k - 1)] = std::pow(r, k - 1);
    return c;
}

// k-step noisy bound with L_0 = L and L_t = c for t >= 1 (mu = 0)
double two_level_bound(double sigma2, double L, double D0, long k, double c) {
    const double km1 = static_cast<double>(k - 1);
    const double Ck = 1.0 + km1 * L / c;
    const double ratio = 1.0 / L + km1 * L / (c * c);
    return (L * D0 + sigma2 * ratio) / Ck;
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("relgd bound") {
    CHECK(bound_relgd(2.0, 0.0, 3.0, 4).value == doctest::Approx(1.5));
    CHECK(bound_relgd(1.0, 0.5, 1.0, 1).value == doctest::Approx(0.5));
    const BoundReport r = bound_relgd(3.0, 0.7, 2.0, 9);
    CHECK(r.value == doctest::Approx(0.7 * 2.0 / (std::pow(1.0 + 0.7 / 2.3, 9) - 1.0)).epsilon(1e-12));
    CHECK(r.extras.at("loose") == doctest::Approx(2.3 * 2.0 / 9));
    CHECK(r.value <= r.extras.at("loose"));
    double prev = INFINITY;
    for (long k = 1; k <= 100; ++k) {
        const double b = bound_relgd(1.0, 0.2, 1.0, k).value;
        CHECK(b <= prev);
        prev = b;
    }
    // tiny mu approaches the mu = 0 limit
    CHECK(bound_relgd(1.0, 1e-9, 1.0, 10).value == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(bound_relgd(1.0, 0.5, 1.0, 1000).value > 0.0);
    CHECK(std::isfinite(bound_relgd(1.0, 0.5, 1.0, 100000).value));
    CHECK_THROWS_AS(bound_relgd(1.0, 1.0, 1.0, 1), CertificateError);
    CHECK_THROWS_AS(bound_relgd(1.0, 0.1, 1.0, 0), InvalidParams);
}

TEST_CASE("rate weights against direct summation") {
    const std::vector<double> deltas{0.05, 0.3, 1.0};
    const std::vector<double> psis{0.01, 0.4, 0.99};
    for (double delta : deltas) {
        for (double psi : psis) {
            for (long k : {1L, 2L, 7L, 60L}) {
                const auto c = raw_rate_weights(delta, 1.0, psi, k);
                double sum = 0.0;
                for (double e : c) {
                    sum += e;
                }
                CHECK(rel(rate_weights_sum(delta, 1.0, psi, k), sum) <= 1e-10);
                const WeightSequence w = rate_weights(delta, 1.0, psi, k);
                CHECK(rel(w.sum(), sum) <= 1e-10);
                CHECK(w.normalized.sum() == doctest::Approx(1.0).epsilon(1e-12));
                for (long t = 0; t < k; ++t) {
                    CHECK(w.normalized[t] == doctest::Approx(c[static_cast<std::size_t>(t)] / sum).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("rate weights degenerate and limit cases") {
    const WeightSequence w = rate_weights(1.0, 2.0, 2.0, 5);
    for (Index t = 0; t < 4; ++t) {
        CHECK(w.normalized[t] == 0.0);
    }
    CHECK(w.normalized[4] == 1.0);

    // psi = 0: weights proportional to (delta, ..., delta, 1)
    const WeightSequence z = rate_weights(0.25, 1.0, 0.0, 4);
    const double s = 0.25 * 3 + 1.0;
    CHECK(z.normalized[0] == doctest::Approx(0.25 / s));
    CHECK(z.normalized[3] == doctest::Approx(1.0 / s));
    CHECK(z.sum() == doctest::Approx(s));

    // delta = 1: weights (phi - psi)/(phi - psi) r^(t-1) = geometric in phi/(phi - psi)
    const WeightSequence g = rate_weights(1.0, 1.0, 0.3, 6);
    for (Index t = 1; t < 6; ++t) {
        CHECK(g.normalized[t] / g.normalized[t - 1] == doctest::Approx(1.0 / 0.7).epsilon(1e-12));
    }

    // large k stays finite in the log domain
    const WeightSequence big = rate_weights(0.5, 1.0, 0.5, 100000);
    CHECK(std::isfinite(big.log_sum));
    CHECK(big.normalized.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rate_bound(0.5, 1.0, 0.5, 1.0, 1.0, 100000) >= 0.0);

    CHECK_THROWS_AS(rate_weights(0.0, 1.0, 0.5, 3), InvalidParams);
    CHECK_THROWS_AS(rate_weights(0.5, 1.0, 2.0, 3), InvalidParams);
}

TEST_CASE("coordinate bounds reduce to the full-gradient bound") {
    for (double L : {1.0, 4.0}) {
        for (double mu : {0.1, 0.5}) {
            for (long k : {1L, 5L, 40L}) {
                const double D0 = 1.7, gap = 3.0;
                const double relgd_b = bound_relgd(L, mu, D0, k).value;
                const double rcds = bound_relrcds(L, mu, 6, 6, D0, gap, k).value;
                CHECK(rel(rcds, relgd_b) <= 1e-10);
                const double eso = bound_relrcd_eso(Vector::Constant(3, L), Vector::Constant(3, mu),
                                                    1.0, L * D0, gap, k).value;
                CHECK(rel(eso, rcds) <= 1e-9);
            }
        }
    }
    CHECK(bound_relrcds(2.0, 0.0, 3, 3, 1.5, 9.0, 10).value == doctest::Approx(0.3));
    CHECK(bound_relrcds(2.0, 0.5, 1, 4, 1.0, 8.0, 1).value ==
          doctest::Approx((2.0 - 0.5 / 4) * 1.0 + 0.75 * 8.0));
    CHECK(bound_relrcds(2.0, 0.0, 1, 4, 1.0, 8.0, 9).value ==
          doctest::Approx((2.0 + 0.75 * 8.0) / (1.0 + 8.0 / 4)));
}

TEST_CASE("symmetry-measure bound") {
    const BoundReport a0 = bound_relrcds_symmetry(2.0, 0.5, 1, 4, 0.0, 3.0, 7);
    CHECK(a0.extras.at("factor") == doctest::Approx(1.0 - 0.25 * 0.25));
    CHECK(a0.value == doctest::Approx(3.0 * std::pow(1.0 - 0.0625, 7)));
    CHECK(bound_relrcds_symmetry(2.0, 0.0, 1, 4, 0.5, 3.0, 8).value == doctest::Approx(1.0));
    for (double r = 0.01; r < 1.0; r += 0.01) {
        const double f = bound_relrcds_symmetry(1.0, r, 1, 3, 1.0, 1.0, 1).extras.at("factor");
        CHECK(f >= 1.0 - 2.0 * r / 3.0 - 1e-15);
        CHECK(f < 1.0);
    }
}

TEST_CASE("ESO bound pieces") {
    const BoundReport r = bound_relrcd_eso(Vector::Ones(3), Vector::Ones(3), 1.0, 2.0, 1.0, 1);
    CHECK(r.extras.at("delta") == 1.0);
    CHECK(r.extras.at("bregman") == 0.0);
    const Vector v = (Vector(3) << 2.0, 4.0, 1.0).finished();
    const Vector w = (Vector(3) << 0.5, 0.4, 0.5).finished();
    const BoundReport e = bound_relrcd_eso(v, w, 0.25, 3.0, 5.0, 20);
    CHECK(e.extras.at("delta") == doctest::Approx(0.1));
    CHECK(e.extras.at("bregman") == doctest::Approx(std::pow(1.0 - 0.025, 20) * 3.0));
    CHECK(e.extras.at("gradient_surrogate") == doctest::Approx(5.0 / (20 * 0.25)));
    CHECK(e.weights->size() == 20);
    // Delta = 0 routes to the non-strongly-convex form
    const BoundReport nsc = bound_relrcd_eso(v, Vector::Zero(3), 0.25, 3.0, 5.0, 20);
    CHECK(nsc.value == doctest::Approx((3.0 + 0.75 * 5.0) / (1.0 + 0.25 * 19)));
    CHECK(nsc.extras.count("bregman") == 0);
    CHECK_THROWS_AS(bound_relrcd_eso(v, Vector::Ones(2), 0.5, 1, 1, 1), DimensionMismatch);
    CHECK_THROWS_AS(bound_relrcd_eso(v, 3 * v, 0.5, 1, 1, 1), InvalidParams);

    const IterationComplexity ic = eso_iteration_complexity(0.5, 0.2, 1.0, 1.0, 1e-3);
    // smallest k whose bound is below eps
    long k = 1;
    while (rate_bound(0.2, 1.0, 0.5, 1.0, 1.0, k) > 1e-3) {
        ++k;
    }
    CHECK(std::abs(ic.rate_consistent - static_cast<double>(k)) <= 1.0);
}

TEST_CASE("every bound is nonincreasing in k") {
    double p1 = INFINITY, p2 = INFINITY, p3 = INFINITY, p4 = INFINITY;
    const Vector v = Vector::Constant(4, 2.0), w = Vector::Constant(4, 0.3);
    for (long k = 1; k <= 300; ++k) {
        const double a = bound_relrcds(3.0, 0.4, 2, 5, 1.0, 2.0, k).value;
        const double b = bound_relrcds(3.0, 0.0, 2, 5, 1.0, 2.0, k).value;
        const double c = bound_relrcd_eso(v, w, 0.5, 1.0, 2.0, k).value;
        const double d = bound_relsgd_general(StepsizeSchedule::linear(2.0, 0.1), 2.0, 0.1, 0.5, 1.0, k).value;
        CHECK(a <= p1 * (1 + 1e-12));
        CHECK(b <= p2 * (1 + 1e-12));
        CHECK(c <= p3 * (1 + 1e-12));
        CHECK(d <= p4 * (1 + 1e-12));
        p1 = a;
        p2 = b;
        p3 = c;
        p4 = d;
    }
}

TEST_CASE("sgd weights against the recursion") {
    const WeightSequence w0 = sgd_weights(StepsizeSchedule::constant(2.0), 0.0, 10);
    CHECK(w0.sum() == doctest::Approx(10.0).epsilon(1e-13));
    CHECK((w0.normalized.array() - 0.1).abs().maxCoeff() <= 1e-15);

    const WeightSequence g = sgd_weights(StepsizeSchedule::constant(2.0), 0.5, 8);
    double s = 0.0;
    for (int t = 0; t < 8; ++t) {
        s += std::pow(2.0 / 1.5, t);
    }
    CHECK(g.sum() == doctest::Approx(s).epsilon(1e-12));
    CHECK(g.normalized[7] == doctest::Approx(std::pow(4.0 / 3.0, 7) / s).epsilon(1e-12));

    for (double L : {1.0, 3.0, 20.0}) {
        for (double mu : {0.05, 0.5}) {
            for (long k : {1L, 10L, 1000L}) {
                CHECK(sgd_weights(StepsizeSchedule::linear(L, mu), mu, k).sum() ==
                      doctest::Approx(static_cast<double>(k)).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(sgd_weights(StepsizeSchedule::constant(1.0), 1.0, 3), InvalidParams);
}

TEST_CASE("sgd weights agree with the gamma closed form") {
    for (double L : {0.5, 2.0, 10.0}) {
        for (double mu : {0.0, 0.1, 0.45}) {
            for (double alpha : {0.05, 0.1, 0.3, 1.0}) {
                const long k = 200;
                const StepsizeSchedule sch = StepsizeSchedule::linear(L, alpha);
                // direct recursion oracle
                std::vector<double> c(k);
                c[0] = 1.0;
                for (long t = 1; t < k; ++t) {
                    c[static_cast<std::size_t>(t)] =
                        c[static_cast<std::size_t>(t - 1)] * sch.at(t - 1) / (sch.at(t) - mu);
                }
                const Vector gf = sgd_weights_gamma_form(L, mu, alpha, k);
                const WeightSequence w = sgd_weights(sch, mu, k);
                for (long t = 0; t < k; ++t) {
                    CHECK(rel(gf[t], c[static_cast<std::size_t>(t)]) <= 1e-9);
                    CHECK(rel(w.normalized[t] * w.sum(), c[static_cast<std::size_t>(t)]) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("general sgd bound") {
    // constant L and sigma = 0: (L - mu) D0 / C_k with geometric C_k
    const BoundReport r = bound_relsgd_general(StepsizeSchedule::constant(2.0), 2.0, 0.5, 0.0, 1.0, 10);
    double Ck = 0.0;
    for (int t = 0; t < 10; ++t) {
        Ck += std::pow(4.0 / 3.0, t);
    }
    CHECK(r.value == doctest::Approx(1.5 / Ck).epsilon(1e-12));
    CHECK(r.hypotheses_hold);

    // plateau sigma^2 / L
    const BoundReport p = bound_relsgd_general(StepsizeSchedule::constant(4.0), 4.0, 0.0, 2.0, 1.0, 1000000);
    CHECK(p.extras.at("plateau") == 0.5);
    CHECK(p.value == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(p.value >= 0.5);

    // direct formula for a short linear schedule
    const StepsizeSchedule lin = StepsizeSchedule::linear(1.0, 0.5);
    const double c0 = 1.0, c1 = 1.0 / (1.5 - 0.2), c2 = c1 * 1.5 / (2.0 - 0.2);
    const double C3 = c0 + c1 + c2;
    const double expected = 0.8 * 2.0 / C3 + 0.3 * (c0 / 1.0 + c1 / 1.5 + c2 / 2.0) / C3;
    CHECK(bound_relsgd_general(lin, 1.0, 0.2, 0.3, 2.0, 3).value == doctest::Approx(expected).epsilon(1e-12));

    const BoundReport low = bound_relsgd_general(StepsizeSchedule::sqrt_growth(0.1), 1.0, 0.0, 1.0, 1.0, 50);
    CHECK_FALSE(low.hypotheses_hold);
    CHECK_FALSE(low.note.empty());
}

TEST_CASE("minibatch bound") {
    const StepsizeSchedule s = StepsizeSchedule::linear(2.0, 0.1);
    const BoundReport one = bound_relsgd_minibatch(s, 2.0, 0.1, 0.8, 1, 1.0, 30);
    const BoundReport gen = bound_relsgd_general(s, 2.0, 0.1, 0.8, 1.0, 30);
    CHECK(one.value == gen.value);
    const BoundReport four = bound_relsgd_minibatch(s, 2.0, 0.1, 0.8, 4, 1.0, 30);
    CHECK(four.extras.at("noise") == doctest::Approx(gen.extras.at("noise") / 4).epsilon(1e-14));
    const BoundReport huge = bound_relsgd_minibatch(s, 2.0, 0.1, 0.8, 1000000000, 1.0, 30);
    CHECK(huge.value == doctest::Approx(gen.extras.at("bias")).epsilon(1e-8));
}

TEST_CASE("optimal constant stepsize") {
    CHECK(optimal_constant_stepsize(1.0, 1.0, 1.0, 2) == doctest::Approx(1.0 / (std::sqrt(3.0) - 1.0)).epsilon(1e-14));
    for (double L : {0.5, 1.0, 7.0}) {
        for (double sigma2 : {0.1, 2.0}) {
            for (long k : {2L, 10L, 5000L}) {
                const double D0 = 1.3;
                const double c = optimal_constant_stepsize(sigma2, L, D0, k);
                // first-order condition
                const double l = 1.0 / c;
                const double A = L * D0 + sigma2 / L;
                const double resid = sigma2 * L * static_cast<double>(k - 1) * l * l + 2 * sigma2 * l - A;
                CHECK(std::abs(resid) <= 1e-10 * A);
                // log-grid search oracle
                double best = INFINITY, arg = 0.0;
                for (int i = -4000; i <= 4000; ++i) {
                    const double cc = c * std::pow(10.0, i / 2000.0);
                    const double b = two_level_bound(sigma2, L, D0, k, cc);
                    if (b < best) {
                        best = b;
                        arg = cc;
                    }
                }
                CHECK(rel(arg, c) <= 2e-3);
                CHECK(two_level_bound(sigma2, L, D0, k, c) <= best * (1 + 1e-12));
                const StepsizeSchedule sch = StepsizeSchedule::fixed_horizon_optimal(sigma2, L, D0, static_cast<int>(k));
                CHECK(rel(bound_relsgd_general(sch, L, 0.0, sigma2, D0, k).value,
                          two_level_bound(sigma2, L, D0, k, c)) <= 1e-10);
            }
        }
    }
    // bound(k) sqrt(k) settles
    auto scaled = [](long k) {
        const StepsizeSchedule s = StepsizeSchedule::fixed_horizon_optimal(1.0, 2.0, 1.0, static_cast<int>(k));
        return bound_relsgd_general(s, 2.0, 0.0, 1.0, 1.0, k).value * std::sqrt(static_cast<double>(k));
    };
    CHECK(rel(scaled(100000), scaled(1000)) < 0.1);
    CHECK_THROWS_AS(optimal_constant_stepsize(0.0, 1.0, 1.0, 5), InvalidParams);
}

TEST_CASE("linear schedule regimes") {
    const LinearScheduleBounds eq = bounds_linear_schedule(2.0, 0.3, 0.3, 50, 1.0, 0.5);
    CHECK(eq.regime == LinearScheduleBounds::Regime::AlphaEqualsMu);
    CHECK(eq.weight_sum_lower == 50.0);

    for (double L : {1.0, 5.0, 100.0}) {
        for (double mu : {0.01, 0.3, 0.9}) {
            for (double alpha_over_mu : {0.25, 0.5, 1.0, 2.0, 5.0}) {
                for (long k : {1L, 10L, 1000L}) {
                    const double alpha = alpha_over_mu * mu;
                    const LinearScheduleBounds b = bounds_linear_schedule(L, mu, alpha, k, 1.0, 0.4);
                    const WeightSequence w = sgd_weights(StepsizeSchedule::linear(L, alpha), mu, k);
                    double ratio = 0.0;
                    for (long t = 0; t < k; ++t) {
                        ratio += w.normalized[t] * w.sum() / (L + alpha * static_cast<double>(t));
                    }
                    CHECK(b.weight_sum_lower <= w.sum() * (1 + 1e-10));
                    CHECK(b.ratio_sum_upper >= ratio * (1 - 1e-10));
                    const double direct =
                        bound_relsgd_general(StepsizeSchedule::linear(L, alpha), L, mu, 0.4, 1.0, k).value;
                    CHECK(direct <= b.bound * (1 + 1e-10));
                }
            }
        }
    }
}

TEST_CASE("alpha = mu/2 closed form") {
    for (double L : {1.0, 5.0, 100.0}) {
        for (double mu : {0.01, 0.3, 0.9}) {
            for (long k : {1L, 2L, 10L, 1000L, 100000L}) {
                const double cf = bound_half_mu_closed_form(L, mu, 0.7, 2.0, k);
                CHECK(rel(bounds_linear_schedule(L, mu, mu / 2, k, 2.0, 0.7).bound, cf) <= 1e-8);
                CHECK(bound_relsgd_general(StepsizeSchedule::linear(L, mu / 2), L, mu, 0.7, 2.0, k).value <=
                      cf * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("alpha < mu gives an O(1/k) noise ratio") {
    auto ratio = [](long k) {
        const LinearScheduleBounds b = bounds_linear_schedule(1.0, 0.5, 0.2, k);
        return b.ratio_sum_upper / b.weight_sum_lower;
    };
    const double slope = std::log(ratio(100000) / ratio(1000)) / std::log(100.0);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("gamma_alpha functional equation and convexity") {
    for (double alpha : {0.3, 0.5, 1.0, 2.0}) {
        for (double x = 0.05; x <= 50.0; x += 0.05) {
            const double lhs = gamma_alpha(alpha, x + alpha);
            CHECK(std::abs(lhs - x * gamma_alpha(alpha, x)) <= 1e-12 * lhs);
        }
        CHECK(gamma_alpha(alpha, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    // alpha = 1 is the classical Gamma shifted by one
    CHECK(gamma_alpha(1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(gamma_alpha(1.0, 0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    Rng rng = make_stream(8);
    std::uniform_real_distribution<double> u(0.01, 30.0);
    for (double alpha : {0.3, 1.0, 2.0}) {
        for (int i = 0; i < 1000; ++i) {
            const double x = u(rng), y = u(rng);
            CHECK(log_gamma_alpha(alpha, 0.5 * (x + y)) <=
                  0.5 * (log_gamma_alpha(alpha, x) + log_gamma_alpha(alpha, y)) + 1e-12);
        }
    }
    CHECK_THROWS_AS(gamma_alpha(0.0, 1.0), InvalidParams);
    CHECK_THROWS_AS(gamma_alpha(1.0, -1.0), InvalidParams);
}

TEST_CASE("piecewise gamma construction") {
    for (double alpha : {0.3, 1.0, 2.0}) {
        CHECK(gamma_alpha_printed(alpha, 1.0) == 1.0);
        CHECK(gamma_alpha_printed(alpha, 1.0 + 0.99 * alpha) == 1.0);
    }
    CHECK(gamma_alpha_printed(1.0, 3.0) == doctest::Approx(2.0));
    CHECK(gamma_alpha_printed(1.0, 0.5) == doctest::Approx(2.0));
    CHECK(gamma_alpha_printed(0.5, 2.2) == doctest::Approx(1.7 * 1.2).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_alpha_printed(1e-7, 1000.0), InvalidParams);
}

TEST_CASE("Gautschi-type inequality") {
    const GautschiCheck top = check_gautschi(1.0, 2.0, 1.0);
    CHECK(top.ratio == 1.0);
    CHECK(top.lower == 1.0);
    CHECK(top.upper == 1.0);
    CHECK(top.pass);
    const GautschiCheck bottom = check_gautschi(0.5, 3.0, 0.0);
    CHECK(bottom.ratio == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(bottom.pass);
    std::vector<double> xs;
    for (double x = 0.1; x <= 50.0 + 1e-9; x += 0.1) {
        xs.push_back(x);
    }
    int failures = 0;
    for (double alpha : {0.5, 1.0, 2.0}) {
        for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (double x : xs) {
                failures += check_gautschi(alpha, x, frac * alpha).pass ? 0 : 1;
            }
        }
    }
    CHECK(failures == 0);
    CHECK_THROWS_AS(check_gautschi(1.0, 1.0, 1.5), InvalidParams);
}

}  // TEST_SUITE

TEST_SUITE("schedule") {

TEST_CASE("schedule values") {
    CHECK(StepsizeSchedule::constant(3.0).at(100) == 3.0);
    const StepsizeSchedule lin = StepsizeSchedule::linear(2.0, 0.5);
    CHECK(lin.at(0) == 2.0);
    CHECK(lin(4) == 4.0);
    const StepsizeSchedule sq = StepsizeSchedule::sqrt_growth(0.3);
    CHECK(sq.at(0) == 0.3);
    CHECK(sq.at(1) == 0.3);
    CHECK(sq.at(16) == doctest::Approx(1.2));
    const StepsizeSchedule opt = StepsizeSchedule::fixed_horizon_optimal(1.0, 1.0, 1.0, 2);
    CHECK(opt.at(0) == 1.0);
    CHECK(opt.at(1) == doctest::Approx(1.0 / (std::sqrt(3.0) - 1.0)));
    CHECK(opt.at(50) == opt.tail());
    CHECK(lin.describe() == "linear(2, 0.5)");
    CHECK(StepsizeSchedule::constant(1.5).kind() == StepsizeSchedule::Kind::Constant);
}

TEST_CASE("schedule rejects bad parameters") {
    CHECK_THROWS_AS(StepsizeSchedule::constant(0.0), InvalidParams);
    CHECK_THROWS_AS(StepsizeSchedule::linear(1.0, -0.1), InvalidParams);
    CHECK_THROWS_AS(StepsizeSchedule::sqrt_growth(-1.0), InvalidParams);
    CHECK_THROWS_AS(StepsizeSchedule::constant(1.0).at(-1), InvalidParams);
    CHECK_THROWS_AS(StepsizeSchedule::constant(NAN), InvalidParams);
}

}  // TEST_SUITE
