#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relsmooth/types.hpp"

namespace relsmooth {

/// One coordinate of a separable reference function h(x) = sum_i h_i(x_i).
class Component {
public:
    enum class Kind { SquaredHalf, BurgLog, QuadraticPlusQuartic };

    /// h_i(z) = z^2 / 2
    static Component squared_half() { return Component(Kind::SquaredHalf, 0.0); }
    /// h_i(z) = -log z on z > 0
    static Component burg_log() { return Component(Kind::BurgLog, 0.0); }
    /// h_i(z) = z^2 / 2 + a z^4, a > 0
    static Component quadratic_plus_quartic(double a);

    Kind kind() const { return kind_; }
    double quartic() const { return quartic_; }

    bool in_domain(double z) const;
    double value(double z) const;
    double derivative(double z) const;

    /// Solves h_i'(z) = c. `hint` seeds the Newton iteration for the cubic.
    /// Throws RangeError when c is outside the range of h_i'.
    double inverse_derivative(double c, double hint = 0.0) const;

    std::string name() const;

    bool operator==(const Component&) const = default;

private:
    Component(Kind kind, double quartic) : kind_(kind), quartic_(quartic) {}

    Kind kind_;
    double quartic_;
};

/// Separable strictly convex reference function, immutable after construction.
class ReferenceFunction {
public:
    explicit ReferenceFunction(std::vector<Component> components);

    static ReferenceFunction uniform(Index n, Component component);

    Index dimension() const { return static_cast<Index>(components_.size()); }
    const Component& component(Index i) const { return components_[static_cast<std::size_t>(i)]; }
    const std::vector<Component>& components() const { return components_; }

    /// True when every component is the same kind with the same parameter.
    bool is_uniform() const;
    bool all_of(Component::Kind kind) const;

    bool in_domain(const Vector& x) const;
    /// Throws DomainError naming the first offending coordinate.
    void require_domain(const Vector& x, const char* what = "x") const;

private:
    std::vector<Component> components_;
};

/// Closed convex feasible set, block separable except for the simplex.
class FeasibleSet {
public:
    enum class Kind { FullSpace, PositiveOrthant, Box, Simplex };

    static FeasibleSet full_space() { return FeasibleSet(Kind::FullSpace); }
    static FeasibleSet positive_orthant() { return FeasibleSet(Kind::PositiveOrthant); }
    static FeasibleSet box(Vector lower, Vector upper);
    /// {x : <1, x> = 1, x > 0}
    static FeasibleSet simplex() { return FeasibleSet(Kind::Simplex); }

    Kind kind() const { return kind_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    bool contains(const Vector& x, double tol = 1e-12) const;
    std::string name() const;

private:
    explicit FeasibleSet(Kind kind) : kind_(kind) {}

    Kind kind_;
    Vector lower_;
    Vector upper_;
};

double eval_h(const ReferenceFunction& h, const Vector& x);
Vector grad_h(const ReferenceFunction& h, const Vector& x);

/// D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>, summed coordinate-wise.
double bregman(const ReferenceFunction& h, const Vector& x, const Vector& y);

/// sum_i v_i D_{h_i}(x_i, y_i). Requires v > 0 componentwise.
double weighted_bregman(const ReferenceFunction& h, const Vector& x, const Vector& y,
                        const Vector& v);

/// Per-coordinate Bregman terms D_{h_i}(x_i, y_i).
Vector bregman_terms(const ReferenceFunction& h, const Vector& x, const Vector& y);

double invert_grad_coordinate(const Component& component, double c, double hint = 0.0);

/// Stepsize parameter for the mirror step: one scalar L, or one value per
/// coordinate (the ESO-weighted step uses v_i).
using StepScale = std::variant<double, Vector>;

struct MirrorStepResult {
    Vector z;
    /// Multiplier of the <1, z> = 1 constraint; zero for other sets.
    double multiplier = 0.0;
    int bisection_steps = 0;
};

/// Exact minimizer of <g, z> + sum_i L_i D_{h_i}(z_i, x_i) over Q, moving only
/// `coords` when given (other coordinates stay at x).
MirrorStepResult mirror_step_detailed(const ReferenceFunction& h, const FeasibleSet& q,
                                      const Vector& x, const Vector& g, const StepScale& scale,
                                      const std::optional<CoordinateSet>& coords = std::nullopt);

Vector mirror_step(const ReferenceFunction& h, const FeasibleSet& q, const Vector& x,
                   const Vector& g, const StepScale& scale,
                   const std::optional<CoordinateSet>& coords = std::nullopt);

/// Draws a pair (x, y) from the domain of a reference function.
using PairSampler = std::function<std::pair<Vector, Vector>(Rng&)>;

/// Minimum of D_h(x,y)/D_h(y,x) over sampled distinct pairs. This is an upper
/// bound on the symmetry measure alpha(h), never the infimum itself.
double symmetry_measure_estimate(const ReferenceFunction& h, const PairSampler& sampler,
                                 int n_samples, Rng& rng);

/// alpha(h) where a closed form is known (1 for pure squared-half geometry).
std::optional<double> known_symmetry_measure(const ReferenceFunction& h);

}  // namespace relsmooth
