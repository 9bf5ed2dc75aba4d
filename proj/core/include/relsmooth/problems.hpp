#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "relsmooth/bregman.hpp"
#include "relsmooth/sampling.hpp"
#include "relsmooth/types.hpp"

namespace relsmooth {

/// Smooth convex objective with exact, partial and (optionally) stochastic
/// gradient oracles. Implementations are immutable and safe to share.
class Objective {
public:
    virtual ~Objective() = default;

    virtual Index dimension() const = 0;
    virtual bool in_domain(const Vector& x) const = 0;
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;

    /// Writes the gradient entries listed in `coords` into `out` (other
    /// entries are left untouched). Default computes the full gradient.
    virtual void partial_gradient(const Vector& x, const CoordinateSet& coords, Vector& out) const;

    /// Finite-sum size m when the objective is a sum of m terms, else 0.
    virtual Index num_terms() const { return 0; }
    virtual bool has_stochastic_oracle() const { return false; }

    /// One unbiased gradient draw.
    virtual Vector stochastic_gradient(const Vector& x, Rng& rng) const;

    /// The draw associated with term i of a finite sum (m * grad f_i plus any
    /// deterministic part). Used to enumerate the oracle exactly.
    virtual Vector term_gradient(const Vector& x, Index i) const;
};

struct EsoCertificate {
    Sampling sampling;
    Vector v;
    /// min_i w_i / v_i when a strong convexity vector is known.
    std::optional<double> delta;
};

struct Certificates {
    double L = 0.0;
    double mu = 0.0;
    /// Per-coordinate strong convexity; when absent, mu * 1 is implied.
    std::optional<Vector> w;
    std::optional<double> sigma2;
    std::optional<double> f_star;
    std::optional<Vector> x_star;
};

/// Builder name plus raw inputs; enough to rebuild a Problem exactly and to
/// serialize it.
struct ProblemData {
    std::string builder;
    Matrix matrix;
    Vector vector;
    std::map<std::string, double> scalars;
};

/// Maps a sampling to a valid ESO vector, or nullopt when none is known.
using EsoRule = std::function<std::optional<Vector>(const Sampling&)>;

struct Problem {
    std::string name;
    std::shared_ptr<const Objective> f;
    ReferenceFunction h;
    FeasibleSet q;
    Certificates cert;
    EsoRule eso_rule;
    ProblemData data;

    Index dimension() const { return f->dimension(); }
    double value(const Vector& x) const { return f->value(x); }
    Vector gradient(const Vector& x) const { return f->gradient(x); }
    bool feasible(const Vector& x) const { return h.in_domain(x) && q.contains(x, 1e-9); }

    /// w if present, otherwise mu * 1.
    Vector strong_convexity_vector() const;
};

/// ESO certificate for `s`, with Delta filled in from the problem's w or mu.
/// Throws CertificateError when no ESO vector is known for this sampling.
EsoCertificate make_eso(const Problem& p, const Sampling& s);

/// Builds a certificate from a user-supplied v. Throws CertificateError when
/// v is not strictly positive or Delta would exceed 1.
EsoCertificate make_eso(const Sampling& s, Vector v, const std::optional<Vector>& w);

// --- builders --------------------------------------------------------------

/// f(x) = x'Mx/2 + a sum x_i^4 with reference h(x) = |x|^2/2 + b sum x_i^4,
/// b = reference_quartic (defaults to a). M must be PSD with diag <= 1.
Problem quad_quartic(const Matrix& M, double a, std::optional<double> reference_quartic = {});

/// Random instance of the above: A n x n standard normal, M = A'A / lambda_max.
ProblemData quad_quartic_instance(Index n, std::uint64_t seed, double a = 0.1,
                                  double reference_quartic = 1.0);

/// Euclidean smoothness constant of quad_quartic on the sublevel set
/// {f <= f(x0)}: lambda_max(M) + 12 sqrt(a f(x0)), since a x_i^4 <= f(x0) there.
/// Classical gradient descent from x0 with this constant stays in the set.
double quad_quartic_sublevel_smoothness(const Problem& p, const Vector& x0);

/// Starting point with i.i.d. N(0, scale^2) entries.
Vector normal_start(Index n, double scale, std::uint64_t seed);

/// sum_i b_i log(b_i / (Ax)_i) + (Ax)_i - b_i on x > 0, Burg geometry.
Problem poisson_kl(const Matrix& A, const Vector& b);

/// Poisson objective plus mu_reg * (-sum log x_i).
Problem regularized_poisson(const Matrix& A, const Vector& b, double mu_reg);

/// A = |A'|, b = |b'| with A', b' standard normal, shape m x n.
ProblemData poisson_instance(Index m, Index n, std::uint64_t seed, double mu_reg = 0.0);

/// -log det(H Diag(x) H') on the simplex. H must have full row rank.
Problem d_optimal_design(const Matrix& H);

/// (x - c)'M(x - c)/2 in Euclidean geometry with oracle grad f + noise_std * xi,
/// xi ~ N(0, I). sigma^2 = n noise_std^2, f* = 0, x* = c.
Problem noisy_quadratic(const Matrix& M, const Vector& center, double noise_std);

/// Rebuilds a problem from its data record.
Problem build_problem(const ProblemData& data);

/// Mean of tau independent oracle draws.
Vector stochastic_grad(const Problem& p, const Vector& x, int tau, Rng& rng);

struct NoiseEstimate {
    double sigma2 = 0.0;
    /// Set when h is not globally strongly convex, so the modulus used is a guess.
    bool heuristic = false;
    int draws = 0;
};

/// Monte Carlo estimate of E|grad f(x) - g|^2 / (strong convexity modulus of h).
NoiseEstimate estimate_sigma2(const Problem& p, const Vector& x, int draws, Rng& rng);

}  // namespace relsmooth
