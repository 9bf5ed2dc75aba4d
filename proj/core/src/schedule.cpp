#include "relsmooth/schedule.hpp"

#include <cmath>
#include <sstream>

#include "relsmooth/errors.hpp"
#include "relsmooth/theory.hpp"

namespace relsmooth {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidParams(std::string("StepsizeSchedule: ") + what + " must be positive");
    }
}

}  // namespace

StepsizeSchedule StepsizeSchedule::constant(double L0) {
    require_positive(L0, "L0");
    return StepsizeSchedule(Kind::Constant, L0, 0.0, L0);
}

StepsizeSchedule StepsizeSchedule::linear(double L0, double alpha) {
    require_positive(L0, "L0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw InvalidParams("StepsizeSchedule: alpha must be nonnegative");
    }
    return StepsizeSchedule(Kind::Linear, L0, alpha, 0.0);
}

StepsizeSchedule StepsizeSchedule::sqrt_growth(double c) {
    require_positive(c, "c");
    return StepsizeSchedule(Kind::SqrtGrowth, c, c, 0.0);
}

StepsizeSchedule StepsizeSchedule::fixed_horizon_optimal(double sigma2, double L, double D0, int k) {
    const double tail = optimal_constant_stepsize(sigma2, L, D0, k);
    return StepsizeSchedule(Kind::FixedHorizonOptimal, L, 0.0, tail);
}

double StepsizeSchedule::at(long t) const {
    if (t < 0) {
        throw InvalidParams("StepsizeSchedule: negative iteration index");
    }
    switch (kind_) {
    case Kind::Constant:
        return base_;
    case Kind::Linear:
        return base_ + slope_ * static_cast<double>(t);
    case Kind::SqrtGrowth:
        return t == 0 ? base_ : slope_ * std::sqrt(static_cast<double>(t));
    case Kind::FixedHorizonOptimal:
        return t == 0 ? base_ : tail_;
    }
    return base_;
}

std::string StepsizeSchedule::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case Kind::Constant:
        os << "constant(" << base_ << ")";
        break;
    case Kind::Linear:
        os << "linear(" << base_ << ", " << slope_ << ")";
        break;
    case Kind::SqrtGrowth:
        os << "sqrt_growth(" << base_ << ")";
        break;
    case Kind::FixedHorizonOptimal:
        os << "fixed_horizon_optimal(L0=" << base_ << ", tail=" << tail_ << ")";
        break;
    }
    return os.str();
}

}  // namespace relsmooth
