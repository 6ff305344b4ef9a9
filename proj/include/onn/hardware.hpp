#pragma once

#include <cstddef>

namespace onn::hw {

/// Electrical parameters of a ring-oscillator array, SI units.
struct HardwareParams {
    double i_drv = 0.26e-3;  // A
    double vcc = 0.8;        // V
    double f = 6e9;          // Hz
    double c_coup = 1e-15;   // F
    std::size_t n = 26;

    /// Throws ConfigError unless every field is finite and strictly positive.
    void validate() const;
};

struct CostEstimate {
    double delay = 0.0;   // s
    double energy = 0.0;  // J
};

/// Upper bound on the relative detuning that still locks:
/// 2*pi*f*C_coup*Vcc / I_drv.
double locking_range_fraction(const HardwareParams& hw);

/// I_drv * Vcc, in watts.
double power_per_oscillator(const HardwareParams& hw);

/// Filters run one after another, so delay = n_filters * delay_per_conv and
/// energy = n * power_per_oscillator * delay.
CostEstimate inference_cost_estimate(const HardwareParams& hw, double delay_per_conv, std::size_t n_filters);

}  // namespace onn::hw
