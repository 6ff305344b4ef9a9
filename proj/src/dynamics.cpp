#include "onn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "onn/error.hpp"

namespace onn {
namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

double max_abs_frequency(std::span<const double> omega, double fallback) {
    double w = 0.0;
    for (double x : omega) w = std::max(w, std::abs(x));
    return w > 0.0 ? w : fallback;
}

bool all_finite(std::span<const Complex> z) {
    return std::all_of(z.begin(), z.end(),
                       [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

void derivative_into(std::span<const Complex> z, std::span<const double> omega,
                     const OscillatorArrayConfig& cfg, std::span<Complex> out) {
    Complex sum{0.0, 0.0};
    for (Complex c : z) sum += c;
    const double rho = cfg.rho;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const Complex coupled = cfg.include_self_in_sum ? sum : sum - z[i];
        out[i] = Complex(rho, omega[i]) * z[i] - rho * std::norm(z[i]) * z[i] + cfg.epsilon * coupled;
    }
}

std::size_t step_count(double t_end, double h) {
    const double ratio = t_end / h;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
}

}  // namespace

void OscillatorArrayConfig::validate() const {
    require(n >= 1, "n: must be at least 1");
    require(std::isfinite(rho) && rho > 0.0, "rho: must be > 0");
    require(std::isfinite(omega0) && omega0 > 0.0, "omega0: must be > 0");
    require(std::isfinite(delta_omega) && delta_omega >= 0.0, "delta_omega: must be >= 0");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon: must be >= 0");
    require(std::isfinite(dt) && dt >= 0.0, "dt: must be > 0 (or 0 for automatic)");
    require(std::isfinite(t_end) && t_end > 0.0, "t_end: must be > 0");
    require(dt == 0.0 || t_end >= dt, "t_end: must be >= dt");
    require(stride >= 1, "stride: must be at least 1");
    require(std::isfinite(peak_tau) && peak_tau >= 0.0, "peak_tau: must be > 0 (or 0 for default)");
}

void OscillatorArrayConfig::validate_for(std::span<const double> omega) const {
    validate();
    require(omega.size() == n, "omega: expected " + std::to_string(n) + " frequencies, got " +
                                   std::to_string(omega.size()));
    for (double w : omega) {
        if (!std::isfinite(w)) throw NumericError("omega: non-finite natural frequency");
    }
    const double w_max = max_abs_frequency(omega, omega0);
    if (dt > 0.0) {
        const double limit = kTwoPi / (25.0 * w_max);
        require(dt <= limit * (1.0 + 1e-12),
                "dt: " + std::to_string(dt) + " exceeds the accuracy guard 2*pi/(25*omega_max) = " +
                    std::to_string(limit));
    }
    const double h = t_end / static_cast<double>(step_count(t_end, nominal_step(omega)));
    require(static_cast<double>(stride) * h * w_max < kTwoPi / 2.0,
            "stride: one trace sample must advance every phase by less than pi");
}

double OscillatorArrayConfig::nominal_step(std::span<const double> omega) const {
    if (dt > 0.0) return dt;
    return kTwoPi / (50.0 * max_abs_frequency(omega, omega0));
}

double OscillatorArrayConfig::effective_peak_tau() const {
    return peak_tau > 0.0 ? peak_tau : 10.0 * kTwoPi / omega0;
}

SimulationTrace SimulationTrace::from_states(std::vector<ComplexState> states, double sample_interval,
                                             double omega0, bool normalize_averager, double peak_tau) {
    if (states.empty()) throw InsufficientDataError("trace: no samples");
    if (!(sample_interval > 0.0)) throw ConfigError("trace: sample interval must be > 0");
    const std::size_t n = states.front().size();
    if (n == 0) throw ConfigError("trace: states must hold at least one oscillator");
    for (const auto& s : states) {
        if (s.size() != n) throw ConfigError("trace: inconsistent state sizes");
    }

    SimulationTrace trace;
    trace.omega0 = omega0;
    trace.sample_interval = sample_interval;
    const std::size_t m = states.size();
    trace.times.resize(m);
    for (std::size_t k = 0; k < m; ++k) trace.times[k] = static_cast<double>(k) * sample_interval;

    trace.phases.assign(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = trace.phases[i];
        double previous = std::arg(states[0].z[i]);
        p[0] = previous;
        for (std::size_t k = 1; k < m; ++k) {
            const double current = std::arg(states[k].z[i]);
            p[k] = p[k - 1] + std::remainder(current - previous, kTwoPi);
            previous = current;
        }
    }

    const double scale = normalize_averager ? 1.0 / static_cast<double>(n) : 1.0;
    trace.averager.resize(m);
    trace.envelope.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        Complex sum{0.0, 0.0};
        for (Complex c : states[k].z) sum += c;
        trace.averager[k] = sum * scale;
        trace.envelope[k] = std::abs(trace.averager[k]);
    }
    trace.peak_detector = onn::peak_detector(trace.envelope, sample_interval, peak_tau);
    trace.states = std::move(states);
    return trace;
}

std::vector<Complex> derivative(std::span<const Complex> z, std::span<const double> omega,
                                const OscillatorArrayConfig& cfg) {
    if (z.size() != cfg.n || omega.size() != cfg.n) {
        throw ConfigError("derivative: state and omega must both have n = " + std::to_string(cfg.n) +
                          " entries");
    }
    if (!all_finite(z)) throw NumericError("derivative: non-finite state");
    for (double w : omega) {
        if (!std::isfinite(w)) throw NumericError("derivative: non-finite frequency");
    }
    std::vector<Complex> out(z.size());
    derivative_into(z, omega, cfg, out);
    return out;
}

SimulationTrace integrate(std::span<const double> omega, const OscillatorArrayConfig& cfg,
                          const ComplexState& init) {
    cfg.validate_for(omega);
    if (init.size() != cfg.n) {
        throw ConfigError("init: expected " + std::to_string(cfg.n) + " amplitudes, got " +
                          std::to_string(init.size()));
    }
    if (!all_finite(init.z)) throw NumericError("init: non-finite initial state");

    const std::size_t n = cfg.n;
    const std::size_t steps = step_count(cfg.t_end, cfg.nominal_step(omega));
    const double h = cfg.t_end / static_cast<double>(steps);
    const double norm_limit_sq = 100.0 * static_cast<double>(n);

    std::vector<ComplexState> samples;
    samples.reserve(steps / cfg.stride + 1);
    samples.push_back(init);

    std::vector<Complex> z = init.z;
    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t step = 1; step <= steps; ++step) {
        derivative_into(z, omega, cfg, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + (0.5 * h) * k1[i];
        derivative_into(tmp, omega, cfg, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + (0.5 * h) * k2[i];
        derivative_into(tmp, omega, cfg, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
        derivative_into(tmp, omega, cfg, k4);

        double norm_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            norm_sq += std::norm(z[i]);
        }
        if (!std::isfinite(norm_sq)) throw DivergenceError(step, "integrate: state became non-finite");
        if (norm_sq > norm_limit_sq) throw DivergenceError(step, "integrate: state norm exceeded 10*sqrt(n)");

        if (step % cfg.stride == 0) samples.push_back(ComplexState{z});
    }

    return SimulationTrace::from_states(std::move(samples), h * static_cast<double>(cfg.stride),
                                        cfg.omega0, cfg.normalize_averager, cfg.effective_peak_tau());
}

ComplexState random_initial_state(std::size_t n, std::uint64_t seed, double amplitude) {
    if (n < 1) throw ConfigError("random_initial_state: n must be at least 1");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw ConfigError("random_initial_state: amplitude must be > 0");
    }
    // mt19937_64 output is fixed by the standard; the conversion to [0, 1)
    // is done by hand because distribution objects are implementation-defined.
    std::mt19937_64 engine(seed);
    ComplexState state;
    state.z.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        state.z.push_back(std::polar(amplitude, kTwoPi * u));
    }
    return state;
}

std::vector<std::vector<double>> instantaneous_frequency(const SimulationTrace& trace, std::size_t window) {
    const std::size_t m = trace.samples();
    if (m < 3) throw InsufficientDataError("instantaneous_frequency: need at least 3 samples");
    const double h = trace.sample_interval;
    if (window == 0) {
        window = static_cast<std::size_t>(std::lround(kTwoPi / trace.omega0 / h));
    }
    window = std::max<std::size_t>(window, 1) | 1;  // odd, so the average is centred
    const std::size_t half = window / 2;

    std::vector<std::vector<double>> result;
    result.reserve(trace.phases.size());
    std::vector<double> raw(m), prefix(m + 1);
    for (const auto& p : trace.phases) {
        raw[0] = (p[1] - p[0]) / h;
        raw[m - 1] = (p[m - 1] - p[m - 2]) / h;
        for (std::size_t k = 1; k + 1 < m; ++k) raw[k] = (p[k + 1] - p[k - 1]) / (2.0 * h);

        prefix[0] = 0.0;
        for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] + raw[k];
        std::vector<double> smooth(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t lo = k >= half ? k - half : 0;
            const std::size_t hi = std::min(m - 1, k + half);
            smooth[k] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
        }
        result.push_back(std::move(smooth));
    }
    return result;
}

std::vector<double> peak_detector(std::span<const double> envelope, double sample_interval, double tau) {
    if (!(tau > 0.0)) throw ConfigError("peak_detector: tau_decay must be > 0");
    std::vector<double> out(envelope.size());
    if (envelope.empty()) return out;
    const double decay = std::exp(-sample_interval / tau);
    out[0] = envelope[0];
    for (std::size_t k = 1; k < envelope.size(); ++k) {
        out[k] = std::max(envelope[k], out[k - 1] * decay);
    }
    return out;
}

}  // namespace onn
