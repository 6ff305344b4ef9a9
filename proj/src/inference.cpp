#include "onn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "onn/error.hpp"
#include "onn/parallel.hpp"
#include "onn/stats.hpp"

namespace onn {
namespace {

std::size_t final_window_samples(std::size_t m) {
    const auto w = static_cast<std::size_t>(std::ceil(kFinalWindowFraction * static_cast<double>(m)));
    return std::clamp<std::size_t>(w, 1, m);
}

std::vector<std::size_t> rank_by_dom(const std::vector<FilterRecord>& records) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].error) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].dom_mean > records[b].dom_mean;
    });
    return order;
}

OscillatorArrayConfig sized_for(const OscillatorArrayConfig& cfg, std::size_t n) {
    OscillatorArrayConfig out = cfg;
    out.n = n;
    return out;
}

struct SeedOutcome {
    double dom = std::numeric_limits<double>::quiet_NaN();
    bool locked = false;
    std::optional<double> lock_time;
    std::optional<std::string> error;
    std::optional<SimulationTrace> trace;
};

SeedOutcome run_one(std::span<const double> omega, const OscillatorArrayConfig& cfg, const ComplexState& init,
                    const MatchOptions& options, bool keep_trace) {
    SeedOutcome out;
    try {
        SimulationTrace trace = integrate(omega, cfg, init);
        out.dom = dom(trace, options.policy);
        out.locked = classify_lock(trace, options.spread_tol_fraction * cfg.delta_omega);
        out.lock_time = measure_lock_time(trace, options.lock_threshold_fraction);
        if (keep_trace) out.trace = std::move(trace);
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

void DomPolicy::validate(double t_end) const {
    if (!(trailing_fraction > 0.0 && trailing_fraction <= 1.0)) {
        throw ConfigError("dom.trailing_fraction: must lie in (0, 1]");
    }
    if (sample_time) {
        if (!std::isfinite(*sample_time) || *sample_time < 0.0) {
            throw ConfigError("dom.sample_time: must be >= 0");
        }
        if (*sample_time > t_end) throw ConfigError("dom.sample_time: must not exceed t_end");
    }
}

double dom(const SimulationTrace& trace, const DomPolicy& policy) {
    const std::size_t m = trace.samples();
    if (m == 0) throw InsufficientDataError("dom: empty trace");
    if (policy.method == DomMethod::trailing_mean_envelope) {
        if (!(policy.trailing_fraction > 0.0 && policy.trailing_fraction <= 1.0)) {
            throw PolicyError("dom: trailing_fraction must lie in (0, 1]");
        }
        const auto count = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(policy.trailing_fraction * static_cast<double>(m))), 1, m);
        return mean(std::span<const double>(trace.envelope).last(count));
    }
    if (!policy.sample_time) return trace.peak_detector.back();
    const double t = *policy.sample_time;
    const double last = trace.times.back();
    if (!(t >= 0.0) || t > last + 0.5 * trace.sample_interval) {
        throw PolicyError("dom: sample_time " + std::to_string(t) + " lies outside the trace [0, " +
                          std::to_string(last) + "]");
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::lround(t / trace.sample_interval)), m - 1);
    return trace.peak_detector[k];
}

std::vector<double> final_frequencies(const SimulationTrace& trace) {
    const auto freq = instantaneous_frequency(trace);
    const std::size_t m = trace.samples();
    const std::size_t w = final_window_samples(m);
    std::vector<double> out;
    out.reserve(freq.size());
    for (const auto& f : freq) out.push_back(mean(std::span<const double>(f).last(w)));
    return out;
}

bool classify_lock(const SimulationTrace& trace, double spread_tol) {
    const auto f = final_frequencies(trace);
    const double mid = median(f);
    double spread = 0.0;
    for (double v : f) spread = std::max(spread, std::abs(v - mid));
    return spread < spread_tol;
}

std::optional<double> measure_lock_time(const SimulationTrace& trace, double threshold_fraction) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
        throw ConfigError("lock threshold fraction must lie in (0, 1)");
    }
    const std::size_t m = trace.samples();
    if (m == 0) return std::nullopt;
    const std::size_t w = final_window_samples(m);
    const std::size_t plateau_start = m - w;
    const double level = threshold_fraction * mean(std::span<const double>(trace.envelope).last(w));

    std::size_t k = m;
    while (k > 0 && trace.envelope[k - 1] >= level) --k;
    if (k == 0) return trace.times.front();
    // envelope[k - 1] is the last sample below the level
    if (k > plateau_start) return std::nullopt;
    return trace.times[k];
}

void MatchOptions::validate(const OscillatorArrayConfig& cfg) const {
    policy.validate(cfg.t_end);
    if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
    if (!(spread_tol_fraction > 0.0)) throw ConfigError("spread_tol_fraction: must be > 0");
    if (!(lock_threshold_fraction > 0.0 && lock_threshold_fraction < 1.0)) {
        throw ConfigError("dom_threshold_fraction: must lie in (0, 1)");
    }
    if (!(initial_amplitude > 0.0)) throw ConfigError("initial_amplitude: must be > 0");
    if (!(cfg.delta_omega > 0.0)) throw ConfigError("delta_omega: must be > 0 for frequency-shift keying");
}

std::vector<double> encode_pair(const Fragment& fragment, const GaborFilter& filter,
                                const OscillatorArrayConfig& cfg, bool reference_oscillator) {
    auto omega = fsk_encode(fragment, filter, cfg.omega0, cfg.delta_omega).omega;
    if (reference_oscillator) omega.push_back(cfg.omega0);
    return omega;
}

MatchReport match_filters(const Fragment& fragment, std::span<const GaborFilter> bank,
                          const OscillatorArrayConfig& cfg, const MatchOptions& options) {
    if (bank.empty()) throw ConfigError("bank: at least one filter is required");
    for (std::size_t f = 0; f < bank.size(); ++f) {
        if (bank[f].side != fragment.side) {
            throw ConfigError("bank[" + std::to_string(f) + "]: side " + std::to_string(bank[f].side) +
                              " does not match fragment side " + std::to_string(fragment.side));
        }
    }
    const std::size_t n = fragment.size() + (options.reference_oscillator ? 1 : 0);
    const OscillatorArrayConfig run_cfg = sized_for(cfg, n);
    run_cfg.validate();
    options.validate(run_cfg);

    std::vector<std::vector<double>> omegas;
    omegas.reserve(bank.size());
    for (const auto& g : bank) omegas.push_back(encode_pair(fragment, g, run_cfg, options.reference_oscillator));
    std::vector<ComplexState> inits;
    inits.reserve(options.seeds.size());
    for (auto seed : options.seeds) inits.push_back(random_initial_state(n, seed, options.initial_amplitude));

    const std::size_t seeds = options.seeds.size();
    std::vector<SeedOutcome> outcomes(bank.size() * seeds);
    parallel_for(outcomes.size(), options.jobs, [&](std::size_t task) {
        const std::size_t f = task / seeds;
        const std::size_t s = task % seeds;
        outcomes[task] = run_one(omegas[f], run_cfg, inits[s], options, options.keep_traces && s == 0);
    });

    MatchReport report;
    report.records.resize(bank.size());
    for (std::size_t f = 0; f < bank.size(); ++f) {
        FilterRecord& r = report.records[f];
        r.filter_index = f;
        r.theta_deg = bank[f].theta_deg;
        r.k = bank[f].k;
        r.dot = dot(fragment, bank[f]);
        std::vector<double> lock_times;
        std::size_t locked = 0;
        for (std::size_t s = 0; s < seeds; ++s) {
            SeedOutcome& o = outcomes[f * seeds + s];
            if (o.error && !r.error) r.error = "seed " + std::to_string(options.seeds[s]) + ": " + *o.error;
            r.dom_per_seed.push_back(o.dom);
            if (o.locked) ++locked;
            if (o.lock_time) lock_times.push_back(*o.lock_time);
            if (o.trace) r.trace = std::move(o.trace);
        }
        if (r.error) {
            r.dom_mean = std::numeric_limits<double>::quiet_NaN();
            r.dom_std = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        r.dom_mean = mean(r.dom_per_seed);
        r.dom_std = stddev(r.dom_per_seed);
        r.locked_fraction = static_cast<double>(locked) / static_cast<double>(seeds);
        r.locked = 2 * locked > seeds;
        if (!lock_times.empty() && 2 * lock_times.size() >= seeds) r.lock_time = mean(lock_times);
    }

    report.ranking = rank_by_dom(report.records);
    if (!report.ranking.empty()) {
        report.dynamic_range =
            report.records[report.ranking.front()].dom_mean - report.records[report.ranking.back()].dom_mean;
    }
    return report;
}

std::vector<std::size_t> winner_take_all(const MatchReport& report, std::size_t top_k) {
    auto order = rank_by_dom(report.records);
    if (top_k > order.size()) {
        throw ConfigError("top_k: " + std::to_string(top_k) + " exceeds the " + std::to_string(order.size()) +
                          " ranked filters");
    }
    order.resize(top_k);
    return order;
}

OnnFeatureMap feature_map_onn(const Image& image, const GaborFilter& filter, const OscillatorArrayConfig& cfg,
                              const MatchOptions& options) {
    const std::size_t s = filter.side;
    if (s == 0 || s > image.width || s > image.height) {
        throw InputError("feature_map_onn: filter of side " + std::to_string(s) + " is larger than the image");
    }
    const std::size_t n = s * s + (options.reference_oscillator ? 1 : 0);
    const OscillatorArrayConfig run_cfg = sized_for(cfg, n);
    run_cfg.validate();
    options.validate(run_cfg);

    OnnFeatureMap out;
    out.map.width = image.width - s + 1;
    out.map.height = image.height - s + 1;
    const std::size_t windows = out.map.width * out.map.height;
    const std::size_t seeds = options.seeds.size();

    std::vector<ComplexState> inits;
    inits.reserve(seeds);
    for (auto seed : options.seeds) inits.push_back(random_initial_state(n, seed, options.initial_amplitude));

    std::vector<SeedOutcome> outcomes(windows * seeds);
    parallel_for(outcomes.size(), options.jobs, [&](std::size_t task) {
        const std::size_t w = task / seeds;
        const Fragment window = image.window(w / out.map.width, w % out.map.width, s);
        const auto omega = encode_pair(window, filter, run_cfg, options.reference_oscillator);
        SeedOutcome o;
        try {
            o.dom = dom(integrate(omega, run_cfg, inits[task % seeds]), options.policy);
        } catch (const Error& e) {
            o.error = e.what();
        }
        outcomes[task] = std::move(o);
    });

    out.map.values.assign(windows, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t w = 0; w < windows; ++w) {
        std::vector<double> doms;
        std::optional<std::string> error;
        for (std::size_t k = 0; k < seeds; ++k) {
            const auto& o = outcomes[w * seeds + k];
            if (o.error && !error) error = "seed " + std::to_string(options.seeds[k]) + ": " + *o.error;
            doms.push_back(o.dom);
        }
        if (error) {
            out.errors.push_back(WindowError{w / out.map.width, w % out.map.width, *error});
        } else {
            out.map.values[w] = mean(doms);
        }
    }
    return out;
}

}  // namespace onn
