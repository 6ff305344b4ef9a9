#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onn/dynamics.hpp"
#include "onn/encoding.hpp"
#include "onn/oracle.hpp"

namespace onn {

// Share of the trace, counted from its end, over which final frequencies and
// the envelope plateau are measured.
inline constexpr double kFinalWindowFraction = 0.1;

enum class DomMethod {
    sample_peak_detector,    // peak-detector output at sample_time
    trailing_mean_envelope,  // mean envelope over the last trailing_fraction
};

struct DomPolicy {
    DomMethod method = DomMethod::trailing_mean_envelope;
    // Radian-time at which the peak detector is read; unset reads the last sample.
    std::optional<double> sample_time;
    double trailing_fraction = 0.2;

    void validate(double t_end) const;
};

/// Degree of match: a readout of the averager envelope |S(t)|. Bounded by
/// max_j |z_j(t)|. Throws PolicyError when sample_time lies outside the trace.
double dom(const SimulationTrace& trace, const DomPolicy& policy);

/// Mean instantaneous frequency of every oscillator over the final window.
std::vector<double> final_frequencies(const SimulationTrace& trace);

/// True iff max_i |f_i - median(f)| < spread_tol, with f the final-window
/// frequencies.
bool classify_lock(const SimulationTrace& trace, double spread_tol);

/// Earliest time after which the envelope stays at or above
/// threshold_fraction times its final plateau (the mean over the final
/// window). Empty when the envelope still drops below that level inside the
/// final window.
std::optional<double> measure_lock_time(const SimulationTrace& trace, double threshold_fraction);

struct MatchOptions {
    DomPolicy policy;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7};
    // Lock classification tolerance, as a fraction of delta_omega.
    double spread_tol_fraction = 0.1;
    double lock_threshold_fraction = 0.8;
    double initial_amplitude = 1.0;
    // Appends one extra oscillator tuned to omega0 after the pixel oscillators.
    bool reference_oscillator = false;
    // Keep the first seed's trace of every filter in the report.
    bool keep_traces = false;
    unsigned jobs = 0;

    void validate(const OscillatorArrayConfig& cfg) const;
};

struct FilterRecord {
    std::size_t filter_index = 0;
    double theta_deg = 0.0;
    double k = 0.0;
    double dot = 0.0;
    std::vector<double> dom_per_seed;
    double dom_mean = 0.0;
    double dom_std = 0.0;
    // Majority vote of classify_lock over seeds.
    bool locked = false;
    double locked_fraction = 0.0;
    // Mean over seeds that locked; empty unless at least half of them did.
    std::optional<double> lock_time;
    std::optional<std::string> error;
    std::optional<SimulationTrace> trace;
};

struct MatchReport {
    std::vector<FilterRecord> records;
    // Indices of error-free records by descending dom_mean, ties by index.
    std::vector<std::size_t> ranking;
    double dynamic_range = 0.0;
};

/// Oscillator frequencies for one (fragment, filter) pair, including the
/// optional reference oscillator.
std::vector<double> encode_pair(const Fragment& fragment, const GaborFilter& filter,
                                const OscillatorArrayConfig& cfg, bool reference_oscillator);

/// Runs every filter against the fragment once per seed and averages the DOM.
/// cfg.n is replaced by the encoded oscillator count. Simulation failures are
/// recorded in FilterRecord::error rather than thrown.
MatchReport match_filters(const Fragment& fragment, std::span<const GaborFilter> bank,
                          const OscillatorArrayConfig& cfg, const MatchOptions& options);

/// Indices of the top_k error-free records by DOM, ties broken by lower index.
std::vector<std::size_t> winner_take_all(const MatchReport& report, std::size_t top_k);

struct WindowError {
    std::size_t row = 0;
    std::size_t col = 0;
    std::string message;
};

struct OnnFeatureMap {
    FeatureMap map;  // mean DOM per window; NaN where the window failed
    std::vector<WindowError> errors;
};

/// Mean DOM of the (window, filter) match at every valid window position.
OnnFeatureMap feature_map_onn(const Image& image, const GaborFilter& filter, const OscillatorArrayConfig& cfg,
                              const MatchOptions& options);

}  // namespace onn
