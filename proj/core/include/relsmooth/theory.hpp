#pragma once

#include <map>
#include <optional>
#include <string>

#include "relsmooth/schedule.hpp"
#include "relsmooth/types.hpp"

namespace relsmooth {

/// Positive weights together with their sum. `normalized` always sums to 1;
/// `log_sum` stays finite when the raw weights would overflow.
struct WeightSequence {
    Vector normalized;
    double log_sum = 0.0;
    /// Index of the first entry: 1 for c_1..c_k, 0 for c_0..c_{k-1}.
    int first_index = 1;

    double sum() const;
    Index size() const { return normalized.size(); }
};

enum class BoundQuantity {
    FinalSuboptimality,
    WeightedSuboptimality,
    BregmanDistance,
    LyapunovZ,
    GradientSurrogate,
};

std::string to_string(BoundQuantity q);

struct BoundReport {
    double value = 0.0;
    BoundQuantity quantity = BoundQuantity::WeightedSuboptimality;
    std::map<std::string, double> inputs;
    /// Secondary bounds keyed by name (e.g. "loose", "bregman", "factor").
    std::map<std::string, double> extras;
    std::optional<WeightSequence> weights;
    /// False when the schedule or parameters violate a hypothesis of the
    /// underlying result; the value is then informational only.
    bool hypotheses_hold = true;
    std::string note;
};

// --- deterministic and coordinate methods -----------------------------------

/// Tight bound mu D0 / ((L/(L-mu))^k - 1) (limit L D0 / k at mu = 0) on the
/// final suboptimality; extras["loose"] = (L - mu) D0 / k.
BoundReport bound_relgd(double L, double mu, double D0, long k);

/// Weights C_t / sum C_t, t = 1..k, for the recursion
/// f_{t+1} <= (1-delta) f_t + delta f* + (phi - delta psi) D_t - phi D_{t+1}.
/// psi = 0 gives the limit weights proportional to (delta, ..., delta, 1).
WeightSequence rate_weights(double delta, double phi, double psi, long k);

/// 1 - phi/psi + (phi/psi) (phi/(phi - delta psi))^(k-1), the sum of C_t.
double rate_weights_sum(double delta, double phi, double psi, long k);

/// ((phi - delta psi) D0 + (1 - delta) r0) / sum C_t
double rate_bound(double delta, double phi, double psi, double D0, double r0, long k);

BoundReport bound_relrcds(double L, double mu, long tau, long n, double D0, double gap0, long k);

/// Bound on E Z_k = L D_h(x*, x_k) + f(x_k) - f* (mu > 0), or on the final
/// suboptimality (mu = 0). extras["factor"] holds the contraction factor.
BoundReport bound_relrcds_symmetry(double L, double mu, long tau, long n, double alpha_h,
                                   double Z0, long k);

/// Delta = min w/v. Value: weighted suboptimality bound. extras: "delta",
/// "bregman" ((1 - p0 Delta)^k D0_v, strongly convex case only) and
/// "gradient_surrogate" (gap0 / (k p0)).
BoundReport bound_relrcd_eso(const Vector& v, const Vector& w, double p0, double D0_v,
                             double gap0, long k);

struct IterationComplexity {
    /// The remark's expression with the Delta/p0 prefactor, as printed.
    double printed = 0.0;
    /// log(...) / (p0 Delta), the count implied by the (1 - p0 Delta)^k rate.
    double rate_consistent = 0.0;
};

IterationComplexity eso_iteration_complexity(double delta, double p0, double D0_v, double gap0,
                                             double eps);

// --- stochastic method ----------------------------------------------------------

/// c_0 = 1, c_t = L_{t-1}/(L_t - mu) c_{t-1}; returns c_0..c_{k-1} and C_k.
WeightSequence sgd_weights(const StepsizeSchedule& schedule, double mu, long k);

/// c_t for L_t = L + alpha t via the Gamma_alpha closed form.
Vector sgd_weights_gamma_form(double L, double mu, double alpha, long k);

/// (L_0 - mu) D0 / C_k + sigma2 sum_t c_t / (C_k L_t). extras["plateau"] =
/// sigma2 / L for constant schedules.
BoundReport bound_relsgd_general(const StepsizeSchedule& schedule, double L, double mu,
                                 double sigma2, double D0, long k);

/// As bound_relsgd_general with sigma2 replaced by sigma2 / tau.
BoundReport bound_relsgd_minibatch(const StepsizeSchedule& schedule, double L, double mu,
                                   double sigma2, long tau, double D0, long k);

/// Constant L_t (t >= 1, with L_0 = L) minimizing the k-step bound when mu = 0.
double optimal_constant_stepsize(double sigma2, double L, double D0, long k);

struct LinearScheduleBounds {
    enum class Regime { AlphaAboveMu, AlphaEqualsMu, AlphaBelowMu };
    Regime regime = Regime::AlphaAboveMu;
    double weight_sum_lower = 0.0;   // lower bound on C_k
    double ratio_sum_upper = 0.0;    // upper bound on sum_t c_t / L_t
    /// (L - mu) D0 / C_k_lower + sigma2 ratio_sum_upper / C_k_lower
    double bound = 0.0;
};

std::string to_string(LinearScheduleBounds::Regime r);

LinearScheduleBounds bounds_linear_schedule(double L, double mu, double alpha, long k,
                                            double D0 = 0.0, double sigma2 = 0.0);

/// The alpha = mu/2 special case written as a single fraction.
double bound_half_mu_closed_form(double L, double mu, double sigma2, double D0, long k);

// --- Gamma_alpha --------------------------------------------------------------

/// log Gamma_alpha(x) for the log-convex solution of
/// Gamma_alpha(x + alpha) = x Gamma_alpha(x) with Gamma_alpha(1) = 1.
double log_gamma_alpha(double alpha, double x);
double gamma_alpha(double alpha, double x);

/// Piecewise construction: 1 on [1, 1 + alpha), 1/x below 1, forward
/// recursion above. Not log-convex and not a solution of the functional
/// equation for every x; kept for comparison.
double gamma_alpha_printed(double alpha, double x);

struct GautschiCheck {
    bool pass = false;
    double ratio = 0.0;   // Gamma_alpha(x + alpha) / Gamma_alpha(x + s)
    double lower = 0.0;   // x^(1 - s/alpha)
    double upper = 0.0;   // (x + alpha)^(1 - s/alpha)
    double lower_margin = 0.0;  // ratio / lower - 1
    double upper_margin = 0.0;  // 1 - ratio / upper
};

/// Evaluates x^(1-s/alpha) <= Gamma_alpha(x+alpha)/Gamma_alpha(x+s) <= (x+alpha)^(1-s/alpha)
/// with a relative slack of 1e-12.
GautschiCheck check_gautschi(double alpha, double x, double s);

}  // namespace relsmooth
