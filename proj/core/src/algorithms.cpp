#include "relsmooth/algorithms.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "relsmooth/errors.hpp"

namespace relsmooth {

std::string to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Completed:
        return "completed";
    case RunStatus::EarlyStopped:
        return "early_stopped";
    case RunStatus::Aborted:
        return "aborted";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
public:
    Recorder(const Problem& p, RunTrace& trace, const RunOptions& opts, long k)
        : p_(p), trace_(trace), opts_(opts), start_(Clock::now()) {
        if (opts.stride < 1) {
            throw InvalidParams("record stride must be at least 1");
        }
        trace_.seed = opts.seed;
        trace_.f_star = p.cert.f_star;
        trace_.records.reserve(static_cast<std::size_t>(k / opts.stride + 2));
    }

    bool due(long t, long k) const { return t % opts_.stride == 0 || t == k; }

    void add(long t, double epoch, const Vector& x, double f, double stepsize,
             std::optional<double> full_step) {
        TraceRecord r;
        r.t = t;
        r.epoch = epoch;
        r.f = f;
        r.stepsize = stepsize;
        r.breg_full_step = full_step;
        if (p_.cert.x_star) {
            r.breg_to_opt = bregman(p_.h, *p_.cert.x_star, x);
        }
        if (opts_.thin > 0 && t % opts_.thin == 0) {
            r.x = x;
        }
        r.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
        trace_.records.push_back(std::move(r));
    }

private:
    const Problem& p_;
    RunTrace& trace_;
    const RunOptions& opts_;
    Clock::time_point start_;
};

void require_start(const Problem& p, const Vector& x0) {
    if (x0.size() != p.dimension()) {
        throw DimensionMismatch("starting point has the wrong dimension");
    }
    p.h.require_domain(x0, "x0");
    if (!p.q.contains(x0, 1e-9)) {
        throw DomainError("starting point lies outside the feasible set " + p.q.name());
    }
}

void require_budget(long k) {
    if (k < 0) {
        throw InvalidParams("iteration budget must be nonnegative");
    }
}

void warn_if_below(RunTrace& trace, const Problem& p, double L) {
    if (L < p.cert.L * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "stepsize parameter " << L << " is below the smoothness certificate " << p.cert.L;
        trace.warnings.push_back(os.str());
    }
}

// D_h(x, x_(t+1,*)) with the full-coordinate step; nullopt when the step
// leaves the domain.
std::optional<double> full_step_distance(const Problem& p, const Vector& x, const Vector& g,
                                         const StepScale& scale) {
    try {
        const Vector z = mirror_step(p.h, p.q, x, g, scale);
        if (const Vector* v = std::get_if<Vector>(&scale)) {
            return weighted_bregman(p.h, x, z, *v);
        }
        return bregman(p.h, x, z);
    } catch (const StepOutOfDomain&) {
        return std::nullopt;
    }
}

bool wants_full_step(const RunOptions& opts) {
    return opts.track_full_step || opts.early_stop_tol.has_value();
}

bool should_stop(const RunOptions& opts, const std::optional<double>& d) {
    return opts.early_stop_tol && d && *d < *opts.early_stop_tol;
}

// Shared loop for the deterministic and coordinate methods.
RunTrace coordinate_loop(const std::string& name, const Problem& p, const Vector& x0,
                         const StepScale& scale, double recorded_step, long tau, long k, Rng* rng,
                         const RunOptions& opts) {
    require_start(p, x0);
    require_budget(k);
    const Index n = p.dimension();
    RunTrace trace;
    trace.algorithm = name;
    Recorder rec(p, trace, opts, k);

    const bool full = tau == n;
    const Sampling sampling(n, tau);
    SamplingWorkspace ws(sampling);
    const double epoch_per_iter = static_cast<double>(tau) / static_cast<double>(n);

    Vector x = x0;
    Vector g = Vector::Zero(n);
    for (long t = 0;; ++t) {
        std::optional<double> d;
        if (wants_full_step(opts) || (full && t < k)) {
            g = p.gradient(x);
            if (wants_full_step(opts)) {
                d = full_step_distance(p, x, g, scale);
            }
        }
        const bool stop = t < k && should_stop(opts, d);
        if (rec.due(t, k) || stop) {
            rec.add(t, static_cast<double>(t) * epoch_per_iter, x, p.value(x), recorded_step, d);
        }
        if (t == k) {
            break;
        }
        if (stop) {
            trace.status = RunStatus::EarlyStopped;
            break;
        }
        if (full) {
            x = mirror_step(p.h, p.q, x, g, scale);
        } else {
            const CoordinateSet& coords = ws.draw(*rng);
            p.f->partial_gradient(x, coords, g);
            x = mirror_step(p.h, p.q, x, g, scale, coords);
        }
    }
    trace.final_x = x;
    return trace;
}

}  // namespace

RunTrace relgd(const Problem& p, const Vector& x0, double L, long k, const RunOptions& opts) {
    if (!(L > 0.0)) {
        throw InvalidParams("relgd: L must be positive");
    }
    RunTrace trace = coordinate_loop("relgd", p, x0, L, L, p.dimension(), k, nullptr, opts);
    warn_if_below(trace, p, L);
    return trace;
}

RunTrace relrcds(const Problem& p, const Vector& x0, double L, long tau, long k, Rng& rng,
                 const RunOptions& opts) {
    if (!(L > 0.0)) {
        throw InvalidParams("relrcds: L must be positive");
    }
    if (tau < 1 || tau > p.dimension()) {
        throw InvalidParams("relrcds: need 1 <= tau <= n");
    }
    RunTrace trace = coordinate_loop("relrcds", p, x0, L, L, tau, k, &rng, opts);
    warn_if_below(trace, p, L);
    return trace;
}

RunTrace relrcd(const Problem& p, const Vector& x0, const EsoCertificate& cert, long k, Rng& rng,
                const RunOptions& opts) {
    if (cert.v.size() != p.dimension() || cert.sampling.dimension() != p.dimension()) {
        throw DimensionMismatch("relrcd: certificate dimension differs from the problem");
    }
    if (!(cert.v.array() > 0.0).all()) {
        throw CertificateError("relrcd: ESO vector must be strictly positive");
    }
    return coordinate_loop("relrcd", p, x0, cert.v, cert.v.maxCoeff(), cert.sampling.tau(), k,
                           &rng, opts);
}

RunTrace relsgd(const Problem& p, const Vector& x0, const StepsizeSchedule& schedule, long tau,
                long k, Rng& rng, const RunOptions& opts) {
    require_start(p, x0);
    require_budget(k);
    if (tau < 1) {
        throw InvalidParams("relsgd: minibatch size must be at least 1");
    }
    if (!p.f->has_stochastic_oracle()) {
        throw OracleUnavailable("relsgd: " + p.name + " has no stochastic oracle");
    }
    RunTrace trace;
    trace.algorithm = "relsgd";
    Recorder rec(p, trace, opts, k);
    const Index m = p.f->num_terms();
    const double epoch_per_iter =
        static_cast<double>(tau) / static_cast<double>(m > 0 ? m : 1);

    Vector x = x0;
    for (long t = 0;; ++t) {
        const double Lt = schedule.at(t);
        std::optional<double> d;
        if (wants_full_step(opts)) {
            d = full_step_distance(p, x, p.gradient(x), Lt);
        }
        const bool stop = t < k && should_stop(opts, d);
        if (rec.due(t, k) || stop) {
            rec.add(t, static_cast<double>(t) * epoch_per_iter, x, p.value(x), Lt, d);
        }
        if (t == k) {
            break;
        }
        if (stop) {
            trace.status = RunStatus::EarlyStopped;
            break;
        }
        bool moved = false;
        for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
            const Vector g = stochastic_grad(p, x, static_cast<int>(tau), rng);
            try {
                x = mirror_step(p.h, p.q, x, g, Lt);
                moved = true;
                break;
            } catch (const StepOutOfDomain&) {
                if (attempt < opts.max_retries) {
                    ++trace.retries;
                }
            }
        }
        if (!moved) {
            std::ostringstream os;
            os << "step " << t << " left the domain after " << opts.max_retries
               << " redraws (L_t = " << Lt << ")";
            trace.status = RunStatus::Aborted;
            trace.message = os.str();
            if (!rec.due(t, k)) {
                rec.add(t, static_cast<double>(t) * epoch_per_iter, x, p.value(x), Lt, d);
            }
            break;
        }
    }
    trace.final_x = x;
    return trace;
}

RunTrace gradient_descent(const Problem& p, const Vector& x0, double L, long k,
                          const RunOptions& opts) {
    require_start(p, x0);
    require_budget(k);
    if (!(L > 0.0)) {
        throw InvalidParams("gradient_descent: L must be positive");
    }
    RunTrace trace;
    trace.algorithm = "gd";
    Recorder rec(p, trace, opts, k);
    Vector x = x0;
    for (long t = 0;; ++t) {
        if (rec.due(t, k)) {
            rec.add(t, static_cast<double>(t), x, p.value(x), L, std::nullopt);
        }
        if (t == k) {
            break;
        }
        Vector next = x - p.gradient(x) / L;
        if (!p.f->in_domain(next)) {
            throw StepOutOfDomain("gradient_descent: step left the objective's domain");
        }
        x = std::move(next);
    }
    trace.final_x = x;
    return trace;
}

double weighted_output(const RunTrace& trace, const Vector& weights, double f_star) {
    const auto n = static_cast<Index>(trace.records.size());
    Index offset;
    if (weights.size() == n) {
        offset = 0;
    } else if (weights.size() == n - 1) {
        offset = 1;
    } else {
        throw DimensionMismatch("weighted_output: weight length does not match the trace");
    }
    if ((weights.array() < 0.0).any()) {
        throw InvalidParams("weighted_output: weights must be nonnegative");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
        throw InvalidParams("weighted_output: weights must sum to 1");
    }
    double total = 0.0;
    for (Index j = 0; j < weights.size(); ++j) {
        total += weights[j] * (trace.records[static_cast<std::size_t>(j + offset)].f - f_star);
    }
    return total;
}

double weighted_output(const RunTrace& trace, const Vector& weights) {
    if (!trace.f_star) {
        throw MissingOptimum("weighted_output: optimal value unknown for this trace");
    }
    return weighted_output(trace, weights, *trace.f_star);
}

}  // namespace relsmooth
