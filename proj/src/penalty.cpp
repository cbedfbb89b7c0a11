#include "svput/penalty.hpp"

#include <cmath>
#include <limits>

namespace svput {

namespace {
constexpr double kSaturationExponent = 700.0; // exp(700) is near DBL_MAX
}

double beta(double xi, const PenaltyParams& p) {
    const double z = xi / p.epsilon;
    if (z < -kSaturationExponent) return -std::numeric_limits<double>::infinity();
    return -p.C0 * std::exp(-z);
}

double beta_prime(double xi, const PenaltyParams& p) {
    const double z = xi / p.epsilon;
    if (z < -kSaturationExponent) return std::numeric_limits<double>::infinity();
    return (p.C0 / p.epsilon) * std::exp(-z);
}

double pi_smooth(double xi, double epsilon) {
    if (xi >= epsilon) return xi;
    if (xi <= -epsilon) return 0.0;
    const double t = xi + epsilon;
    return t * t / (4.0 * epsilon);
}

double pi_prime(double xi, double epsilon) {
    if (xi >= epsilon) return 1.0;
    if (xi <= -epsilon) return 0.0;
    return (xi + epsilon) / (2.0 * epsilon);
}

} // namespace svput
