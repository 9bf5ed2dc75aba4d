#pragma once

#include <string>

namespace relsmooth {

/// Rule producing the stepsize controlling parameter L_t for the stochastic
/// method. Larger L_t means a more conservative step.
class StepsizeSchedule {
public:
    enum class Kind { Constant, Linear, SqrtGrowth, FixedHorizonOptimal };

    /// L_t = L0
    static StepsizeSchedule constant(double L0);
    /// L_t = L0 + alpha t, alpha >= 0
    static StepsizeSchedule linear(double L0, double alpha);
    /// L_0 = c, L_t = c sqrt(t) for t >= 1
    static StepsizeSchedule sqrt_growth(double c);
    /// L_0 = L, then the constant minimizing the k-step noisy bound (mu = 0).
    static StepsizeSchedule fixed_horizon_optimal(double sigma2, double L, double D0, int k);

    Kind kind() const { return kind_; }
    double at(long t) const;
    double operator()(long t) const { return at(t); }

    double base() const { return base_; }
    double slope() const { return slope_; }
    /// The constant used for t >= 1 by FixedHorizonOptimal.
    double tail() const { return tail_; }

    std::string describe() const;

private:
    StepsizeSchedule(Kind kind, double base, double slope, double tail)
        : kind_(kind), base_(base), slope_(slope), tail_(tail) {}

    Kind kind_;
    double base_;
    double slope_;
    double tail_;
};

}  // namespace relsmooth
