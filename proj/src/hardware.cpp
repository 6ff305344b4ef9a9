#include "onn/hardware.hpp"

#include <cmath>

#include "onn/dynamics.hpp"
#include "onn/error.hpp"

namespace onn::hw {
namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void HardwareParams::validate() const {
    if (!positive(i_drv)) throw ConfigError("i_drv: must be > 0");
    if (!positive(vcc)) throw ConfigError("vcc: must be > 0");
    if (!positive(f)) throw ConfigError("f: must be > 0");
    if (!positive(c_coup)) throw ConfigError("c_coup: must be > 0");
    if (n == 0) throw ConfigError("n: must be at least 1");
}

double locking_range_fraction(const HardwareParams& hw) {
    hw.validate();
    return kTwoPi * hw.f * hw.c_coup * hw.vcc / hw.i_drv;
}

double power_per_oscillator(const HardwareParams& hw) {
    hw.validate();
    return hw.i_drv * hw.vcc;
}

CostEstimate inference_cost_estimate(const HardwareParams& hw, double delay_per_conv, std::size_t n_filters) {
    hw.validate();
    if (!positive(delay_per_conv)) throw ConfigError("delay_per_conv: must be > 0");
    if (n_filters == 0) throw ConfigError("n_filters: must be at least 1");
    CostEstimate cost;
    cost.delay = static_cast<double>(n_filters) * delay_per_conv;
    cost.energy = static_cast<double>(hw.n) * power_per_oscillator(hw) * cost.delay;
    return cost;
}

}  // namespace onn::hw
