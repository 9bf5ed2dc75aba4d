#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "relsmooth/bregman.hpp"
#include "relsmooth/problems.hpp"
#include "relsmooth/types.hpp"

namespace relsmooth {

struct CheckReport {
    std::string name;
    long samples = 0;
    /// Worst signed slack in the inequality's own units (negative = violated).
    double worst_slack = 0.0;
    /// Pass threshold applied to the worst slack (slack >= -tolerance).
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
    /// Offending (or worst) sample, as named vectors.
    std::vector<std::pair<std::string, Vector>> witness;
};

using PointSampler = std::function<Vector(Rng&)>;

/// Burg coordinates are log-uniform on [1e-3, 1e3] (normalized on the
/// simplex); other coordinates are N(0, scale^2), clipped into a box.
PointSampler domain_point_sampler(const ReferenceFunction& h, const FeasibleSet& q,
                                  double scale = 1.0);
PointSampler domain_point_sampler(const Problem& p, double scale = 1.0);
PairSampler domain_pair_sampler(const Problem& p, double scale = 1.0);

/// Central differences against the analytic gradient: relative step `step`, or
/// eps^(1/3) x_i on Burg coordinates. Differences below the rounding floor
/// 4 eps |f| / step count as agreement.
CheckReport check_gradient_fd(const Problem& p, const std::vector<Vector>& points,
                              double step = 1e-6, double tolerance = 1e-5);

/// f(x) <= f(y) + <grad f(y), x - y> + L D_h(x, y) on sampled pairs.
CheckReport check_relative_smoothness(const Problem& p, double L, int n_pairs, Rng& rng,
                                      const PairSampler& sampler = {});

/// f(y) >= f(x) + <grad f(x), y - x> + D_h(y, x) weighted by mu (scalar) or w.
CheckReport check_relative_strong_convexity(const Problem& p, const StepScale& modulus,
                                            int n_pairs, Rng& rng,
                                            const PairSampler& sampler = {});

/// E f(x + q_S) <= f(x) + p0 <grad f(x), q> + p0 sum_i v_i D_{h_i}(x_i + q_i, x_i).
/// Enumerates all subsets when there are at most `enumeration_cap` of them,
/// otherwise uses n_mc draws and allows three standard errors.
CheckReport check_eso(const Problem& p, const EsoCertificate& cert, const Vector& x,
                      const Vector& q, int n_mc, Rng& rng, std::size_t enumeration_cap = 20000);

/// check_eso over `n_points` sampled (x, x + q) pairs; reports the worst.
CheckReport check_eso_sampled(const Problem& p, const EsoCertificate& cert, int n_points,
                              int n_mc, Rng& rng, const PairSampler& sampler = {},
                              std::size_t enumeration_cap = 20000);

/// <c, x> + D(x, z) >= <c, z+> + D(z+, z) + D(x, z+) with z+ the mirror step
/// from z with gradient c. D is L D_h for a scalar scale, D_h weighted by v
/// for a vector scale.
CheckReport check_three_point(const ReferenceFunction& h, const FeasibleSet& q, const Vector& z,
                              const Vector& c, const std::vector<Vector>& test_points,
                              const StepScale& scale = 1.0);

struct StationarityResidual {
    /// Max KKT violation of the mirror-step subproblem, in gradient units.
    double stationarity = 0.0;
    /// Per-coordinate violation divided by 1 + |g_i| + L_i (|h_i'(z_i)| + |h_i'(x_i)|)
    /// (+ |multiplier| on the simplex), the size of the terms that cancel.
    double scaled = 0.0;
    /// |<1, z> - 1| on the simplex, 0 otherwise.
    double constraint = 0.0;
};

StationarityResidual mirror_step_residual(const ReferenceFunction& h, const FeasibleSet& q,
                                          const Vector& x, const Vector& g, const StepScale& scale,
                                          const MirrorStepResult& step,
                                          const std::optional<CoordinateSet>& coords = std::nullopt);

struct SuiteOptions {
    std::uint64_t seed = 0;
    int n_pairs = 1000;
    int n_points = 5;
    double scale = 1.0;
    /// Smoothness constant to check; defaults to the certificate.
    std::optional<double> L_override;
};

/// Every shipped check for one problem at its certificates.
std::vector<CheckReport> run_verify_suite(const Problem& p, const SuiteOptions& opts = {});

}  // namespace relsmooth
