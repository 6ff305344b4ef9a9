#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace onn {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Parameters of a coupled complex van der Pol array,
///
///   dz_i/dt = (rho + i*omega_i) z_i - rho z_i |z_i|^2 + epsilon * sum_j z_j
///
/// Time is dimensionless radian-time: with omega0 = 1 one oscillation period
/// lasts 2*pi. Physical time is obtained by dividing by 2*pi*f0.
struct OscillatorArrayConfig {
    std::size_t n = 25;
    double rho = 1.0;
    double omega0 = 1.0;
    double delta_omega = 0.05;
    double epsilon = 0.005;
    // The coupling sum runs over every j, i included, unless this is false.
    bool include_self_in_sum = true;
    // Averager output S = (1/n) sum z_j when true, sum z_j otherwise.
    bool normalize_averager = true;
    // Integration step; 0 selects 2*pi / (50 * omega_max).
    double dt = 0.0;
    double t_end = 300.0;
    // Keep every stride-th integration step in the trace.
    std::size_t stride = 1;
    std::uint64_t seed = 0;
    // Peak-detector decay constant; 0 selects ten periods of omega0.
    double peak_tau = 0.0;

    /// Checks the parameter invariants that do not depend on the encoded
    /// frequencies. Throws ConfigError naming the offending field.
    void validate() const;

    /// validate() plus the frequency-dependent guards: omega has n entries,
    /// dt <= 2*pi / (25 * omega_max), and one trace sample advances every
    /// phase by less than pi.
    void validate_for(std::span<const double> omega) const;

    /// Step size a run over `omega` will use before it is shrunk to divide
    /// t_end evenly.
    double nominal_step(std::span<const double> omega) const;

    double effective_peak_tau() const;
};

struct ComplexState {
    std::vector<Complex> z;

    std::size_t size() const noexcept { return z.size(); }
    bool operator==(const ComplexState&) const = default;
};

/// Uniformly sampled record of one integration run.
struct SimulationTrace {
    double omega0 = 1.0;
    double sample_interval = 0.0;
    std::vector<double> times;
    std::vector<ComplexState> states;
    // phases[i][k]: unwrapped arg z_i at sample k.
    std::vector<std::vector<double>> phases;
    std::vector<Complex> averager;
    std::vector<double> envelope;
    std::vector<double> peak_detector;

    std::size_t samples() const noexcept { return times.size(); }
    std::size_t oscillators() const noexcept { return states.empty() ? 0 : states.front().size(); }

    /// Builds a trace from raw state snapshots taken every `sample_interval`
    /// starting at t = 0. Derives phases, averager, envelope and the
    /// peak-detector output.
    static SimulationTrace from_states(std::vector<ComplexState> states, double sample_interval,
                                       double omega0, bool normalize_averager, double peak_tau);
};

/// Right-hand side of the array equation. Throws ConfigError on a size
/// mismatch and NumericError on non-finite input.
std::vector<Complex> derivative(std::span<const Complex> z, std::span<const double> omega,
                                const OscillatorArrayConfig& cfg);

/// Fixed-step classical Runge-Kutta integration from `init` over [0, t_end].
/// The step is shrunk so that an integer number of steps spans t_end
/// exactly. Throws DivergenceError when the state norm exceeds 10*sqrt(n)
/// or turns non-finite.
SimulationTrace integrate(std::span<const double> omega, const OscillatorArrayConfig& cfg,
                          const ComplexState& init);

/// z_i = amplitude * exp(i theta_i), theta_i uniform on [0, 2*pi) from a
/// 64-bit Mersenne Twister seeded with `seed`.
ComplexState random_initial_state(std::size_t n, std::uint64_t seed, double amplitude = 1.0);

/// Per-oscillator instantaneous angular frequency, result[i][k]. Central
/// differences of the unwrapped phase, smoothed by a centred moving average
/// of `window` samples (0 selects one period of omega0).
std::vector<std::vector<double>> instantaneous_frequency(const SimulationTrace& trace,
                                                         std::size_t window = 0);

/// Decaying running maximum: v[0] = e[0], v[k] = max(e[k], v[k-1] exp(-dt/tau)).
std::vector<double> peak_detector(std::span<const double> envelope, double sample_interval,
                                  double tau);

}  // namespace onn
