#include "trw/diffusion.hpp"

#include <cmath>

namespace trw {

ScheduleValue schedule(double tau) {
    check_range(tau >= 0.0 && tau <= 1.0, "schedule: tau outside [0,1]");
    const double half_pi = 1.5707963267948966;
    return ScheduleValue{std::cos(half_pi * tau), std::sin(half_pi * tau)};
}

}  // namespace trw
