#include "nids/rng.hpp"

#include <cmath>
#include <numbers>

namespace nids {

double Rng::norm_from(double u1, double u2) {
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace nids
