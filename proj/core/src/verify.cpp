#include "relsmooth/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relsmooth/errors.hpp"
#include "relsmooth/sampling.hpp"

namespace relsmooth {

namespace {

constexpr double kInequalityTol = 1e-9;

// Running minimum of normalized slack with its witness.
struct Worst {
    double normalized = std::numeric_limits<double>::infinity();
    double raw = 0.0;
    std::vector<std::pair<std::string, Vector>> witness;

    void offer(double slack, double scale, std::vector<std::pair<std::string, Vector>> w) {
        const double s = slack / scale;
        if (s < normalized) {
            normalized = s;
            raw = slack;
            witness = std::move(w);
        }
    }
};

CheckReport finish(std::string name, long samples, const Worst& worst, double tol) {
    CheckReport r;
    r.name = std::move(name);
    r.samples = samples;
    r.worst_slack = worst.raw;
    r.tolerance = tol;
    r.pass = worst.normalized >= -tol;
    r.witness = worst.witness;
    std::ostringstream os;
    os.precision(6);
    os << "worst normalized slack " << worst.normalized;
    r.detail = os.str();
    return r;
}

double modulus_weighted_bregman(const ReferenceFunction& h, const Vector& x, const Vector& y,
                                const StepScale& modulus) {
    if (const double* m = std::get_if<double>(&modulus)) {
        return *m == 0.0 ? 0.0 : *m * bregman(h, x, y);
    }
    const Vector terms = bregman_terms(h, x, y);
    const Vector& w = std::get<Vector>(modulus);
    if (w.size() != terms.size()) {
        throw DimensionMismatch("strong convexity vector has the wrong dimension");
    }
    return terms.dot(w);
}

}  // namespace

// --- samplers ------------------------------------------------------------------

PointSampler domain_point_sampler(const ReferenceFunction& h, const FeasibleSet& q, double scale) {
    return [h, q, scale](Rng& rng) {
        const Index n = h.dimension();
        std::uniform_real_distribution<double> exponent(-3.0, 3.0);
        std::normal_distribution<double> normal(0.0, scale);
        Vector x(n);
        for (Index i = 0; i < n; ++i) {
            if (h.component(i).kind() == Component::Kind::BurgLog) {
                x[i] = std::pow(10.0, exponent(rng));
            } else {
                x[i] = normal(rng);
            }
        }
        switch (q.kind()) {
        case FeasibleSet::Kind::PositiveOrthant:
            x = x.cwiseAbs();
            break;
        case FeasibleSet::Kind::Box:
            x = x.cwiseMax(q.lower()).cwiseMin(q.upper());
            break;
        case FeasibleSet::Kind::Simplex:
            x /= x.sum();
            break;
        case FeasibleSet::Kind::FullSpace:
            break;
        }
        return x;
    };
}

PointSampler domain_point_sampler(const Problem& p, double scale) {
    return domain_point_sampler(p.h, p.q, scale);
}

PairSampler domain_pair_sampler(const Problem& p, double scale) {
    PointSampler point = domain_point_sampler(p, scale);
    return [point](Rng& rng) {
        Vector x = point(rng);
        Vector y = point(rng);
        return std::make_pair(std::move(x), std::move(y));
    };
}

// --- checks --------------------------------------------------------------------

CheckReport check_gradient_fd(const Problem& p, const std::vector<Vector>& points, double step,
                              double tolerance) {
    if (!(step > 0.0)) {
        throw InvalidParams("check_gradient_fd: step must be positive");
    }
    double worst = 0.0;
    std::vector<std::pair<std::string, Vector>> witness;
    for (const Vector& x : points) {
        if (!p.f->in_domain(x)) {
            throw DomainError("check_gradient_fd: point outside the objective's domain");
        }
        const Vector g = p.gradient(x);
        const double fx = std::abs(p.value(x));
        const double eps = std::numeric_limits<double>::epsilon();
        Vector fd(x.size());
        Vector floor(x.size());
        for (Index i = 0; i < x.size(); ++i) {
            // Burg-type coordinates scale with x_i itself: the curvature grows
            // like 1/x_i^2 near the boundary and both probes must stay positive
            const double hh = (p.h.component(i).kind() == Component::Kind::BurgLog)
                                  ? std::cbrt(eps) * x[i]
                                  : step * std::max(1.0, std::abs(x[i]));
            Vector xp = x;
            Vector xm = x;
            xp[i] += hh;
            xm[i] -= hh;
            const double fp = p.value(xp);
            const double fm = p.value(xm);
            fd[i] = (fp - fm) / (2.0 * hh);
            floor[i] = 4.0 * eps * std::max({fx, std::abs(fp), std::abs(fm)}) / hh;
        }
        const double scale = std::max(1e-12, g.cwiseAbs().maxCoeff());
        const double err = ((fd - g).cwiseAbs() - floor).cwiseMax(0.0).maxCoeff() / scale;
        if (err > worst || witness.empty()) {
            worst = std::max(worst, err);
            witness = {{"x", x}, {"gradient", g}, {"finite_difference", fd}};
        }
    }
    CheckReport r;
    r.name = "gradient_fd";
    r.samples = static_cast<long>(points.size());
    r.worst_slack = tolerance - worst;
    r.tolerance = 0.0;
    r.pass = worst <= tolerance;
    r.witness = std::move(witness);
    std::ostringstream os;
    os << "max relative error " << worst;
    r.detail = os.str();
    return r;
}

CheckReport check_relative_smoothness(const Problem& p, double L, int n_pairs, Rng& rng,
                                      const PairSampler& sampler) {
    const PairSampler draw = sampler ? sampler : domain_pair_sampler(p);
    Worst worst;
    for (int s = 0; s < n_pairs; ++s) {
        auto [x, y] = draw(rng);
        const double fy = p.value(y);
        const double rhs = fy + p.gradient(y).dot(x - y) + L * bregman(p.h, x, y);
        const double slack = rhs - p.value(x);
        worst.offer(slack, 1.0 + std::abs(fy), {{"x", x}, {"y", y}});
    }
    std::ostringstream name;
    name << "relative_smoothness(L=" << L << ")";
    return finish(name.str(), n_pairs, worst, kInequalityTol);
}

CheckReport check_relative_strong_convexity(const Problem& p, const StepScale& modulus,
                                            int n_pairs, Rng& rng, const PairSampler& sampler) {
    const PairSampler draw = sampler ? sampler : domain_pair_sampler(p);
    Worst worst;
    for (int s = 0; s < n_pairs; ++s) {
        auto [x, y] = draw(rng);
        const double fx = p.value(x);
        const double lower = fx + p.gradient(x).dot(y - x) + modulus_weighted_bregman(p.h, y, x, modulus);
        const double slack = p.value(y) - lower;
        worst.offer(slack, 1.0 + std::abs(fx), {{"x", x}, {"y", y}});
    }
    std::ostringstream name;
    if (const double* m = std::get_if<double>(&modulus)) {
        name << "relative_strong_convexity(mu=" << *m << ")";
    } else {
        name << "relative_strong_convexity(w)";
    }
    return finish(name.str(), n_pairs, worst, kInequalityTol);
}

CheckReport check_eso(const Problem& p, const EsoCertificate& cert, const Vector& x,
                      const Vector& q, int n_mc, Rng& rng, std::size_t enumeration_cap) {
    const Index n = p.dimension();
    if (x.size() != n || q.size() != n || cert.v.size() != n) {
        throw DimensionMismatch("check_eso: dimension mismatch");
    }
    const Vector xq = x + q;
    if (!p.f->in_domain(x) || !p.f->in_domain(xq) || !p.h.in_domain(x) || !p.h.in_domain(xq)) {
        throw DomainError("check_eso: x and x + q must lie in the domain");
    }
    const double p0 = cert.sampling.marginal();
    const double fx = p.value(x);
    const double rhs = fx + p0 * p.gradient(x).dot(q) + p0 * weighted_bregman(p.h, xq, x, cert.v);

    auto outcome = [&](const CoordinateSet& coords) {
        Vector y = x;
        for (Index i : coords) {
            y[i] += q[i];
        }
        return p.value(y);
    };

    double lhs = 0.0;
    double margin = 0.0;
    long samples = 0;
    const std::size_t count = subset_count(cert.sampling, enumeration_cap);
    std::string mode;
    if (count > 0) {
        double total = 0.0;
        for_each_subset(cert.sampling, [&](const CoordinateSet& s) {
            total += outcome(s);
            ++samples;
        });
        lhs = total / static_cast<double>(samples);
        mode = "exact enumeration";
    } else {
        if (n_mc < 2) {
            throw InvalidParams("check_eso: need at least two Monte Carlo draws");
        }
        SamplingWorkspace ws(cert.sampling);
        double mean = 0.0;
        double m2 = 0.0;
        for (int j = 0; j < n_mc; ++j) {
            const double v = outcome(ws.draw(rng));
            const double delta = v - mean;
            mean += delta / static_cast<double>(j + 1);
            m2 += delta * (v - mean);
        }
        samples = n_mc;
        lhs = mean;
        margin = 3.0 * std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
        mode = "monte carlo";
    }
    Worst worst;
    worst.offer(rhs + margin - lhs, 1.0 + std::abs(fx), {{"x", x}, {"q", q}});
    CheckReport r = finish("eso", samples, worst, kInequalityTol);
    r.detail += " (" + mode + ")";
    return r;
}

CheckReport check_eso_sampled(const Problem& p, const EsoCertificate& cert, int n_points, int n_mc,
                              Rng& rng, const PairSampler& sampler, std::size_t enumeration_cap) {
    const PairSampler draw = sampler ? sampler : domain_pair_sampler(p);
    CheckReport worst;
    bool first = true;
    double worst_norm = std::numeric_limits<double>::infinity();
    long samples = 0;
    for (int j = 0; j < n_points; ++j) {
        auto [x, y] = draw(rng);
        CheckReport r = check_eso(p, cert, x, y - x, n_mc, rng, enumeration_cap);
        samples += r.samples;
        const double norm = r.worst_slack / (1.0 + std::abs(p.value(x)));
        if (first || norm < worst_norm) {
            worst = std::move(r);
            worst_norm = norm;
            first = false;
        }
    }
    worst.samples = samples;
    std::ostringstream name;
    name << "eso(tau=" << cert.sampling.tau() << ")";
    worst.name = name.str();
    return worst;
}

CheckReport check_three_point(const ReferenceFunction& h, const FeasibleSet& q, const Vector& z,
                              const Vector& c, const std::vector<Vector>& test_points,
                              const StepScale& scale) {
    const Vector zp = mirror_step(h, q, z, c, scale);
    auto dist = [&](const Vector& a, const Vector& b) {
        if (const double* L = std::get_if<double>(&scale)) {
            return *L * bregman(h, a, b);
        }
        return weighted_bregman(h, a, b, std::get<Vector>(scale));
    };
    const double base = c.dot(zp) + dist(zp, z);
    Worst worst;
    for (const Vector& x : test_points) {
        const double lhs = c.dot(x) + dist(x, z);
        const double rhs = base + dist(x, zp);
        worst.offer(lhs - rhs, 1.0 + std::abs(lhs), {{"x", x}, {"z", z}, {"z_plus", zp}});
    }
    const bool weighted = std::holds_alternative<Vector>(scale);
    return finish(weighted ? "three_point(weighted)" : "three_point", static_cast<long>(test_points.size()),
                  worst, kInequalityTol);
}

StationarityResidual mirror_step_residual(const ReferenceFunction& h, const FeasibleSet& q,
                                          const Vector& x, const Vector& g, const StepScale& scale,
                                          const MirrorStepResult& step,
                                          const std::optional<CoordinateSet>& coords) {
    CoordinateSet moving;
    if (coords) {
        moving = *coords;
    } else {
        for (Index i = 0; i < x.size(); ++i) {
            moving.push_back(i);
        }
    }
    StationarityResidual res;
    for (Index i : moving) {
        const Component& comp = h.component(i);
        const double Li = std::holds_alternative<double>(scale) ? std::get<double>(scale)
                                                                 : std::get<Vector>(scale)[i];
        const double zi = step.z[i];
        // gradient of the subproblem objective in coordinate i
        double r = Li * (comp.derivative(zi) - comp.derivative(x[i])) + g[i];
        if (q.kind() == FeasibleSet::Kind::Simplex) {
            r += step.multiplier;
        }
        double violation = std::abs(r);
        if (q.kind() == FeasibleSet::Kind::Box) {
            if (zi <= q.lower()[i]) {
                violation = std::max(0.0, -r);
            } else if (zi >= q.upper()[i]) {
                violation = std::max(0.0, r);
            }
        } else if (q.kind() == FeasibleSet::Kind::PositiveOrthant && zi <= 0.0) {
            violation = std::max(0.0, -r);
        }
        res.stationarity = std::max(res.stationarity, violation);
        double magnitude = 1.0 + std::abs(g[i]) +
                           Li * (std::abs(comp.derivative(zi)) + std::abs(comp.derivative(x[i])));
        if (q.kind() == FeasibleSet::Kind::Simplex) {
            magnitude += std::abs(step.multiplier);
        }
        res.scaled = std::max(res.scaled, violation / magnitude);
    }
    if (q.kind() == FeasibleSet::Kind::Simplex) {
        res.constraint = std::abs(step.z.sum() - 1.0);
    }
    return res;
}

std::vector<CheckReport> run_verify_suite(const Problem& p, const SuiteOptions& opts) {
    std::vector<CheckReport> out;
    Rng rng = make_stream(opts.seed, 0xC0FFEE);
    const PointSampler point = domain_point_sampler(p, opts.scale);
    const PairSampler pairs = domain_pair_sampler(p, opts.scale);

    std::vector<Vector> points;
    for (int j = 0; j < opts.n_points; ++j) {
        points.push_back(point(rng));
    }
    out.push_back(check_gradient_fd(p, points));

    const double L = opts.L_override.value_or(p.cert.L);
    out.push_back(check_relative_smoothness(p, L, opts.n_pairs, rng, pairs));
    if (p.cert.w) {
        out.push_back(check_relative_strong_convexity(p, *p.cert.w, opts.n_pairs, rng, pairs));
    } else {
        out.push_back(check_relative_strong_convexity(p, p.cert.mu, opts.n_pairs, rng, pairs));
    }

    if (p.eso_rule) {
        for (Index tau : {Index{1}, std::min<Index>(2, p.dimension())}) {
            const EsoCertificate cert = make_eso(p, Sampling(p.dimension(), tau));
            out.push_back(check_eso_sampled(p, cert, std::max(1, opts.n_pairs / 50), 2000, rng, pairs));
            if (p.dimension() == 1) {
                break;
            }
        }
    }

    // three point property at a sampled base point with the problem's gradient
    std::vector<Vector> tests;
    for (int j = 0; j < std::max(10, opts.n_pairs / 10); ++j) {
        tests.push_back(point(rng));
    }
    const Vector z = point(rng);
    const Vector c = p.gradient(z);
    try {
        out.push_back(check_three_point(p.h, p.q, z, c, tests, p.cert.L));
        if (p.eso_rule) {
            const EsoCertificate cert = make_eso(p, Sampling::single_uniform(p.dimension()));
            out.push_back(check_three_point(p.h, p.q, z, c, tests, cert.v));
        }
    } catch (const StepOutOfDomain& e) {
        CheckReport r;
        r.name = "three_point";
        r.pass = false;
        r.detail = e.what();
        out.push_back(r);
    }
    return out;
}

}  // namespace relsmooth
