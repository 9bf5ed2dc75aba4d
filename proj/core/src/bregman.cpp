#include "relsmooth/bregman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relsmooth/errors.hpp"

namespace relsmooth {

namespace {

// a few ulps of |c|: the residual's own rounding error is about 2 eps |c|
constexpr double kNewtonTol = 8.0 * std::numeric_limits<double>::epsilon();
constexpr int kNewtonMaxIter = 200;
constexpr double kSimplexTol = 1e-12;  // accepted mass error
constexpr double kSimplexTarget = 1e-15;  // bisection keeps going toward this
constexpr int kSimplexMaxBisections = 200;
constexpr int kBracketMaxDoublings = 2100;

std::string fmt_index(const char* what, Index i, double value) {
    std::ostringstream os;
    os << what << "[" << i << "] = " << value;
    return os.str();
}

void require_same_size(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
        throw DimensionMismatch(os.str());
    }
}

// Root of z + 4 a z^3 = c. The cubic is odd and strictly increasing, so the
// root has the sign of c and |root| <= min(|c|, cbrt(|c| / 4a)).
double invert_quartic_gradient(double a, double c, double hint) {
    if (c == 0.0) {
        return 0.0;
    }
    auto residual = [a, c](double z) { return z + 4.0 * a * z * z * z - c; };
    double lo = std::min(0.0, c);
    double hi = std::max(0.0, c);
    const double cap = std::cbrt(std::abs(c) / (4.0 * a));
    if (c > 0) {
        hi = std::min(hi, cap);
    } else {
        lo = std::max(lo, -cap);
    }
    const double tol = kNewtonTol * std::max(1.0, std::abs(c));

    double z = (hint > lo && hint < hi) ? hint : (c > 0 ? hi : lo);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        const double r = residual(z);
        if (std::abs(r) <= tol) {
            return z;
        }
        if (r > 0) {
            hi = z;
        } else {
            lo = z;
        }
        const double slope = 1.0 + 12.0 * a * z * z;
        double next = z - r / slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == z || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(z)) {
            return next;
        }
        z = next;
    }
    return z;
}

}  // namespace

// --- Component -------------------------------------------------------------

Component Component::quadratic_plus_quartic(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidParams("quadratic_plus_quartic: coefficient must be positive and finite");
    }
    return Component(Kind::QuadraticPlusQuartic, a);
}

bool Component::in_domain(double z) const {
    if (!std::isfinite(z)) {
        return false;
    }
    return kind_ != Kind::BurgLog || z > 0.0;
}

double Component::value(double z) const {
    switch (kind_) {
    case Kind::SquaredHalf:
        return 0.5 * z * z;
    case Kind::BurgLog:
        return -std::log(z);
    case Kind::QuadraticPlusQuartic:
        return 0.5 * z * z + quartic_ * z * z * z * z;
    }
    return 0.0;
}

double Component::derivative(double z) const {
    switch (kind_) {
    case Kind::SquaredHalf:
        return z;
    case Kind::BurgLog:
        return -1.0 / z;
    case Kind::QuadraticPlusQuartic:
        return z + 4.0 * quartic_ * z * z * z;
    }
    return 0.0;
}

double Component::inverse_derivative(double c, double hint) const {
    if (!std::isfinite(c)) {
        throw RangeError("inverse_derivative: non-finite argument");
    }
    switch (kind_) {
    case Kind::SquaredHalf:
        return c;
    case Kind::BurgLog:
        if (!(c < 0.0)) {
            std::ostringstream os;
            os << "inverse_derivative: burg gradient range is (-inf, 0), got " << c;
            throw RangeError(os.str());
        }
        return -1.0 / c;
    case Kind::QuadraticPlusQuartic:
        return invert_quartic_gradient(quartic_, c, hint);
    }
    return 0.0;
}

std::string Component::name() const {
    switch (kind_) {
    case Kind::SquaredHalf:
        return "squared_half";
    case Kind::BurgLog:
        return "burg_log";
    case Kind::QuadraticPlusQuartic: {
        std::ostringstream os;
        os << "quadratic_plus_quartic(" << quartic_ << ")";
        return os.str();
    }
    }
    return "unknown";
}

// --- ReferenceFunction -----------------------------------------------------

ReferenceFunction::ReferenceFunction(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw InvalidParams("ReferenceFunction: dimension must be positive");
    }
}

ReferenceFunction ReferenceFunction::uniform(Index n, Component component) {
    if (n <= 0) {
        throw InvalidParams("ReferenceFunction: dimension must be positive");
    }
    return ReferenceFunction(std::vector<Component>(static_cast<std::size_t>(n), component));
}

bool ReferenceFunction::is_uniform() const {
    return std::all_of(components_.begin(), components_.end(),
                       [&](const Component& c) { return c == components_.front(); });
}

bool ReferenceFunction::all_of(Component::Kind kind) const {
    return std::all_of(components_.begin(), components_.end(),
                       [kind](const Component& c) { return c.kind() == kind; });
}

bool ReferenceFunction::in_domain(const Vector& x) const {
    if (x.size() != dimension()) {
        return false;
    }
    for (Index i = 0; i < x.size(); ++i) {
        if (!component(i).in_domain(x[i])) {
            return false;
        }
    }
    return true;
}

void ReferenceFunction::require_domain(const Vector& x, const char* what) const {
    if (x.size() != dimension()) {
        std::ostringstream os;
        os << what << ": expected dimension " << dimension() << ", got " << x.size();
        throw DimensionMismatch(os.str());
    }
    for (Index i = 0; i < x.size(); ++i) {
        if (!component(i).in_domain(x[i])) {
            throw DomainError(fmt_index(what, i, x[i]) + " outside domain of " +
                              component(i).name());
        }
    }
}

// --- FeasibleSet -----------------------------------------------------------

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
    if (lower.size() != upper.size()) {
        throw DimensionMismatch("box: bound dimensions differ");
    }
    for (Index i = 0; i < lower.size(); ++i) {
        if (!(lower[i] <= upper[i])) {
            throw InvalidParams(fmt_index("box: empty interval at lower", i, lower[i]));
        }
    }
    FeasibleSet s(Kind::Box);
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
    switch (kind_) {
    case Kind::FullSpace:
        return x.allFinite();
    case Kind::PositiveOrthant:
        return (x.array() >= 0.0).all();
    case Kind::Box:
        return x.size() == lower_.size() && (x.array() >= lower_.array() - tol).all() &&
               (x.array() <= upper_.array() + tol).all();
    case Kind::Simplex:
        return (x.array() > 0.0).all() && std::abs(x.sum() - 1.0) <= tol;
    }
    return false;
}

std::string FeasibleSet::name() const {
    switch (kind_) {
    case Kind::FullSpace:
        return "full_space";
    case Kind::PositiveOrthant:
        return "positive_orthant";
    case Kind::Box:
        return "box";
    case Kind::Simplex:
        return "simplex";
    }
    return "unknown";
}

// --- evaluation ------------------------------------------------------------

double eval_h(const ReferenceFunction& h, const Vector& x) {
    h.require_domain(x);
    double total = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        total += h.component(i).value(x[i]);
    }
    return total;
}

Vector grad_h(const ReferenceFunction& h, const Vector& x) {
    h.require_domain(x);
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        g[i] = h.component(i).derivative(x[i]);
    }
    return g;
}

Vector bregman_terms(const ReferenceFunction& h, const Vector& x, const Vector& y) {
    h.require_domain(x, "x");
    h.require_domain(y, "y");
    Vector d(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const Component& c = h.component(i);
        const double diff = x[i] - y[i];
        switch (c.kind()) {
        case Component::Kind::SquaredHalf:
            d[i] = 0.5 * diff * diff;
            break;
        case Component::Kind::BurgLog: {
            // x/y - log(x/y) - 1 written around r - 1 to keep precision near x = y
            const double rel = diff / y[i];
            d[i] = rel - std::log1p(rel);
            break;
        }
        case Component::Kind::QuadraticPlusQuartic: {
            // x^4 - y^4 - 4y^3(x - y) = (x - y)^2 (x^2 + 2xy + 3y^2)
            const double poly = x[i] * x[i] + 2.0 * x[i] * y[i] + 3.0 * y[i] * y[i];
            d[i] = diff * diff * (0.5 + c.quartic() * poly);
            break;
        }
        }
        if (d[i] < 0.0) {
            d[i] = 0.0;
        }
    }
    return d;
}

double bregman(const ReferenceFunction& h, const Vector& x, const Vector& y) {
    return bregman_terms(h, x, y).sum();
}

double weighted_bregman(const ReferenceFunction& h, const Vector& x, const Vector& y,
                        const Vector& v) {
    require_same_size(x, v, "weighted_bregman");
    if (!(v.array() > 0.0).all()) {
        throw InvalidParams("weighted_bregman: weights must be strictly positive");
    }
    return bregman_terms(h, x, y).dot(v);
}

double invert_grad_coordinate(const Component& component, double c, double hint) {
    return component.inverse_derivative(c, hint);
}

// --- mirror step -----------------------------------------------------------

namespace {

double scale_at(const StepScale& scale, Index i) {
    if (const double* s = std::get_if<double>(&scale)) {
        return *s;
    }
    return std::get<Vector>(scale)[i];
}

void validate_scale(const StepScale& scale, Index n) {
    if (const double* s = std::get_if<double>(&scale)) {
        if (!(*s > 0.0) || !std::isfinite(*s)) {
            throw InvalidParams("mirror_step: stepsize parameter must be positive and finite");
        }
        return;
    }
    const Vector& v = std::get<Vector>(scale);
    if (v.size() != n) {
        throw DimensionMismatch("mirror_step: per-coordinate stepsize has wrong dimension");
    }
    if (!(v.array() > 0.0).all() || !v.allFinite()) {
        throw InvalidParams("mirror_step: per-coordinate stepsizes must be positive and finite");
    }
}

CoordinateSet moving_coordinates(const std::optional<CoordinateSet>& coords, Index n) {
    if (!coords) {
        CoordinateSet all(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) {
            all[static_cast<std::size_t>(i)] = i;
        }
        return all;
    }
    for (Index i : *coords) {
        if (i < 0 || i >= n) {
            throw InvalidParams("mirror_step: coordinate index out of range");
        }
    }
    return *coords;
}

double separable_coordinate(const Component& comp, const FeasibleSet& q, Index i, double x,
                            double g, double step) {
    const double target = comp.derivative(x) - g / step;
    const bool burg = comp.kind() == Component::Kind::BurgLog;
    switch (q.kind()) {
    case FeasibleSet::Kind::FullSpace:
    case FeasibleSet::Kind::PositiveOrthant: {
        if (burg && !(target < 0.0)) {
            std::ostringstream os;
            os << "mirror_step: coordinate " << i << " has no minimizer in the open domain "
               << "(shifted gradient " << target << " >= 0); stepsize below certificate?";
            throw StepOutOfDomain(os.str());
        }
        double z = comp.inverse_derivative(target, x);
        if (q.kind() == FeasibleSet::Kind::PositiveOrthant && !burg) {
            z = std::max(z, 0.0);
        }
        return z;
    }
    case FeasibleSet::Kind::Box: {
        const double lo = q.lower()[i];
        const double hi = q.upper()[i];
        double z;
        if (burg && !(target < 0.0)) {
            if (!std::isfinite(hi)) {
                throw StepOutOfDomain("mirror_step: unbounded burg coordinate in box");
            }
            z = hi;
        } else {
            z = comp.inverse_derivative(target, x);
        }
        return std::clamp(z, lo, hi);
    }
    case FeasibleSet::Kind::Simplex:
        break;
    }
    return x;
}

MirrorStepResult simplex_step(const ReferenceFunction& h, const Vector& x, const Vector& g,
                              const StepScale& scale, const CoordinateSet& moving) {
    if (!h.all_of(Component::Kind::BurgLog)) {
        throw InvalidParams("mirror_step: the simplex is supported with burg components only");
    }
    MirrorStepResult out{x, 0.0, 0};
    if (moving.empty()) {
        return out;
    }
    double fixed_mass = x.sum();
    for (Index i : moving) {
        fixed_mass -= x[i];
    }
    const double target = 1.0 - fixed_mass;
    if (!(target > 0.0)) {
        throw DomainError("mirror_step: moving coordinates carry no simplex mass");
    }

    // Stationarity: L_i h'(z_i) = L_i h'(x_i) - g_i - lambda, i.e.
    // z_i = 1 / (1/x_i + (g_i + lambda)/L_i), finite for lambda > lambda_min.
    double lambda_min = -std::numeric_limits<double>::infinity();
    for (Index i : moving) {
        const double step = scale_at(scale, i);
        lambda_min = std::max(lambda_min, -step / x[i] - g[i]);
    }
    std::vector<double> offset(moving.size());
    std::vector<double> inv_step(moving.size());
    for (std::size_t k = 0; k < moving.size(); ++k) {
        const Index i = moving[k];
        const double step = scale_at(scale, i);
        offset[k] = std::max(0.0, (step / x[i] + g[i] + lambda_min) / step);
        inv_step[k] = 1.0 / step;
    }
    auto mass = [&](double s) {
        double total = 0.0;
        for (std::size_t k = 0; k < moving.size(); ++k) {
            total += 1.0 / (offset[k] + s * inv_step[k]);
        }
        return total;
    };

    // Bracket s = lambda - lambda_min by doubling/halving outward from 1.
    double s_hi = 1.0;
    double s_lo = 1.0;
    int guard = 0;
    while (mass(s_hi) > target) {
        s_hi *= 2.0;
        if (++guard > kBracketMaxDoublings) {
            throw ConvergenceError("mirror_step: failed to bracket simplex multiplier");
        }
    }
    guard = 0;
    while (mass(s_lo) < target) {
        s_lo *= 0.5;
        if (++guard > kBracketMaxDoublings || s_lo == 0.0) {
            throw ConvergenceError("mirror_step: failed to bracket simplex multiplier");
        }
    }

    double s = 0.5 * (s_lo + s_hi);
    double residual = mass(s) - target;
    int steps = 0;
    while (std::abs(residual) > kSimplexTarget && steps < kSimplexMaxBisections) {
        if (residual > 0) {
            s_lo = s;
        } else {
            s_hi = s;
        }
        const double mid = 0.5 * (s_lo + s_hi);
        ++steps;
        if (mid == s_lo || mid == s_hi) {
            break;
        }
        s = mid;
        residual = mass(s) - target;
    }
    if (std::abs(residual) > kSimplexTol) {
        std::ostringstream os;
        os << "mirror_step: simplex multiplier did not converge (residual " << residual << ")";
        throw ConvergenceError(os.str());
    }
    for (std::size_t k = 0; k < moving.size(); ++k) {
        out.z[moving[k]] = 1.0 / (offset[k] + s * inv_step[k]);
    }
    out.multiplier = lambda_min + s;
    out.bisection_steps = steps;
    return out;
}

}  // namespace

MirrorStepResult mirror_step_detailed(const ReferenceFunction& h, const FeasibleSet& q,
                                      const Vector& x, const Vector& g, const StepScale& scale,
                                      const std::optional<CoordinateSet>& coords) {
    h.require_domain(x, "x");
    require_same_size(x, g, "mirror_step");
    if (!g.allFinite()) {
        throw InvalidParams("mirror_step: gradient has non-finite entries");
    }
    validate_scale(scale, x.size());
    const CoordinateSet moving = moving_coordinates(coords, x.size());

    if (q.kind() == FeasibleSet::Kind::Simplex) {
        return simplex_step(h, x, g, scale, moving);
    }
    if (q.kind() == FeasibleSet::Kind::Box && q.lower().size() != x.size()) {
        throw DimensionMismatch("mirror_step: box dimension differs from x");
    }
    MirrorStepResult out{x, 0.0, 0};
    for (Index i : moving) {
        out.z[i] = separable_coordinate(h.component(i), q, i, x[i], g[i], scale_at(scale, i));
    }
    return out;
}

Vector mirror_step(const ReferenceFunction& h, const FeasibleSet& q, const Vector& x,
                   const Vector& g, const StepScale& scale,
                   const std::optional<CoordinateSet>& coords) {
    return mirror_step_detailed(h, q, x, g, scale, coords).z;
}

// --- symmetry measure ------------------------------------------------------

double symmetry_measure_estimate(const ReferenceFunction& h, const PairSampler& sampler,
                                 int n_samples, Rng& rng) {
    if (n_samples < 1) {
        throw InvalidParams("symmetry_measure_estimate: need at least one sample");
    }
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        auto [x, y] = sampler(rng);
        const double forward = bregman(h, x, y);
        const double backward = bregman(h, y, x);
        if (backward <= 0.0) {
            continue;
        }
        best = std::min(best, forward / backward);
    }
    if (!std::isfinite(best)) {
        throw InvalidParams("symmetry_measure_estimate: sampler produced no distinct pairs");
    }
    return best;
}

std::optional<double> known_symmetry_measure(const ReferenceFunction& h) {
    if (h.all_of(Component::Kind::SquaredHalf)) {
        return 1.0;
    }
    return std::nullopt;
}

}  // namespace relsmooth
