#include "onn/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include "onn/error.hpp"
#include "onn/io.hpp"
#include "onn/parallel.hpp"
#include "onn/stats.hpp"

namespace onn::cli {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

std::string join(const std::vector<std::size_t>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? " " : "") + std::to_string(values[i]);
    return s;
}

std::vector<std::size_t> top_by_dot(const MatchReport& report, std::size_t k) {
    std::vector<std::size_t> order(report.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return report.records[a].dot > report.records[b].dot; });
    order.resize(std::min(k, order.size()));
    return order;
}

double pearson_valid(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isfinite(a[i]) && std::isfinite(b[i])) {
            x.push_back(a[i]);
            y.push_back(b[i]);
        }
    }
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return pearson(x, y);
}

}  // namespace

void write_report_csv(const std::filesystem::path& path, const MatchReport& report) {
    auto file = open_output(path);
    io::CsvWriter csv(file, {"filter_index", "theta_deg", "k", "dot", "dom_mean", "dom_std", "locked", "lock_time"});
    for (const auto& r : report.records) {
        csv.field(r.filter_index).field(r.theta_deg).field(r.k).field(r.dot).field(r.dom_mean).field(r.dom_std);
        if (r.error) {
            csv.field("").field("");
        } else {
            csv.field(r.locked).field(r.lock_time ? io::format_number(*r.lock_time) : std::string());
        }
        csv.end_row();
    }
}

void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace) {
    const auto freq = instantaneous_frequency(trace);
    const std::size_t n = trace.oscillators();
    std::vector<std::string> header{"t", "envelope", "peak_detector", "averager_re", "averager_im"};
    for (std::size_t i = 0; i < n; ++i) header.push_back("phase_" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i) header.push_back("freq_" + std::to_string(i));

    auto file = open_output(path);
    io::CsvWriter csv(file, header);
    for (std::size_t k = 0; k < trace.samples(); ++k) {
        csv.field(trace.times[k]).field(trace.envelope[k]).field(trace.peak_detector[k]);
        csv.field(trace.averager[k].real()).field(trace.averager[k].imag());
        for (std::size_t i = 0; i < n; ++i) csv.field(trace.phases[i][k]);
        for (std::size_t i = 0; i < n; ++i) csv.field(freq[i][k]);
        csv.end_row();
    }
}

void write_map_csv(const std::filesystem::path& path, const FeatureMap& map) {
    auto file = open_output(path);
    io::CsvWriter csv(file, {"row", "col", "value"});
    for (std::size_t r = 0; r < map.height; ++r) {
        for (std::size_t c = 0; c < map.width; ++c) {
            csv.field(r).field(c).field(map.at(r, c));
            csv.end_row();
        }
    }
}

MatchReport cmd_match(const RunConfig& cfg, const MatchCommand& cmd, std::ostream& out) {
    cfg.validate();
    const Image image = io::to_image(io::read_pgm(cmd.image));
    const Fragment fragment = image.window(cmd.row, cmd.col, cfg.side);
    const auto bank = cfg.filters();

    MatchOptions options = cfg.match;
    options.keep_traces = cfg.dump_traces;
    const MatchReport report = match_filters(fragment, bank, cfg.dynamics, options);

    write_report_csv(cfg.out_dir / "report.csv", report);
    if (cfg.dump_traces) {
        for (const auto& r : report.records) {
            if (r.trace) write_trace_csv(cfg.out_dir / ("trace_filter_" + std::to_string(r.filter_index) + ".csv"), *r.trace);
        }
    }

    std::vector<double> doms, dots;
    for (const auto& r : report.records) {
        doms.push_back(r.dom_mean);
        dots.push_back(r.dot);
    }
    const std::size_t k = std::min<std::size_t>(4, report.ranking.size());
    out << "fragment " << cfg.side << "x" << cfg.side << " at (" << cmd.row << ", " << cmd.col << ") of "
        << cmd.image.string() << '\n'
        << "filters " << bank.size() << ", seeds " << options.seeds.size() << '\n'
        << "pearson(dom, dot) = " << io::format_number(pearson_valid(doms, dots)) << '\n'
        << "top-" << k << " by dom: " << join(winner_take_all(report, k)) << '\n'
        << "top-" << k << " by dot: " << join(top_by_dot(report, k)) << '\n'
        << "dynamic range = " << io::format_number(report.dynamic_range) << '\n'
        << "wrote " << (cfg.out_dir / "report.csv").string() << '\n';
    for (const auto& r : report.records) {
        if (r.error) out << "filter " << r.filter_index << " failed: " << *r.error << '\n';
    }
    return report;
}

SweepResult cmd_sweep_locking(const RunConfig& cfg, const SweepCommand& cmd, std::ostream& out) {
    if (cmd.detunings.empty()) throw ConfigError("sweep: detuning grid is empty");
    if (!(cmd.epsilon >= 0.0)) throw ConfigError("sweep: epsilon must be >= 0");
    if (cfg.match.seeds.empty()) throw ConfigError("sweep: at least one seed is required");
    const double spread_tol = cmd.spread_tol > 0.0 ? cmd.spread_tol : 0.1 * cmd.epsilon;
    if (!(spread_tol > 0.0)) throw ConfigError("sweep: spread tolerance must be > 0 (set epsilon or spread_tol)");

    OscillatorArrayConfig two = cfg.dynamics;
    two.n = 2;
    two.epsilon = cmd.epsilon;
    two.t_end = cmd.t_end;
    two.validate();
    const ComplexState init = random_initial_state(2, cfg.match.seeds.front(), cfg.match.initial_amplitude);

    SweepResult result;
    result.points.resize(cmd.detunings.size());
    auto grid = cmd.detunings;
    std::sort(grid.begin(), grid.end());
    parallel_for(grid.size(), cfg.match.jobs, [&](std::size_t i) {
        const double d = grid[i];
        const std::vector<double> omega{two.omega0 - 0.5 * d, two.omega0 + 0.5 * d};
        const SimulationTrace trace = integrate(omega, two, init);
        const auto f = final_frequencies(trace);
        const auto w = static_cast<std::size_t>(std::ceil(kFinalWindowFraction * static_cast<double>(trace.samples())));
        const auto tail = std::span<const double>(trace.envelope).last(std::max<std::size_t>(w, 1));
        const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
        SweepPoint& p = result.points[i];
        p.detuning = d;
        p.final_freq_gap = std::abs(f[1] - f[0]);
        p.locked = p.final_freq_gap < spread_tol;
        p.beat_amplitude = 0.5 * (*hi - *lo);
    });
    for (const auto& p : result.points) {
        if (!p.locked) break;
        result.boundary = p.detuning;
    }

    auto file = open_output(cfg.out_dir / "sweep_locking.csv");
    io::CsvWriter csv(file, {"detuning", "locked", "final_freq_gap", "beat_amplitude"});
    for (const auto& p : result.points) {
        csv.field(p.detuning).field(p.locked).field(p.final_freq_gap).field(p.beat_amplitude);
        csv.end_row();
    }

    out << "two-oscillator sweep, epsilon = " << io::format_number(cmd.epsilon) << ", " << grid.size()
        << " detunings\n";
    if (result.boundary) {
        out << "locking boundary = " << io::format_number(*result.boundary) << " ("
            << io::format_number(*result.boundary / cmd.epsilon) << " epsilon)\n";
    } else {
        out << "locking boundary: no locked detuning at the start of the grid\n";
    }
    out << "wrote " << (cfg.out_dir / "sweep_locking.csv").string() << '\n';
    return result;
}

FeatureMapResult cmd_featuremap(const RunConfig& cfg, const FeatureMapCommand& cmd, std::ostream& out) {
    cfg.validate();
    const Image image = io::to_image(io::read_pgm(cmd.image));
    GaborFilter filter;
    if (cmd.bank_index) {
        if (*cmd.bank_index >= cfg.bank.size()) {
            throw ConfigError("filter index " + std::to_string(*cmd.bank_index) + " is outside the " +
                              std::to_string(cfg.bank.size()) + "-filter bank");
        }
        filter = gabor_filter(cfg.side, cfg.bank[*cmd.bank_index]);
    } else {
        filter = gabor_filter(cfg.side, cmd.filter);
    }

    FeatureMapResult result;
    result.onn = feature_map_onn(image, filter, cfg.dynamics, cfg.match);
    result.oracle = convolve_valid(image, filter, cmd.oracle_mode);
    result.pearson = pearson_valid(result.onn.map.values, result.oracle.values);

    write_map_csv(cfg.out_dir / "onn_map.csv", result.onn.map);
    write_map_csv(cfg.out_dir / "oracle_map.csv", result.oracle);
    out << "feature map " << result.onn.map.width << "x" << result.onn.map.height << ", "
        << result.onn.errors.size() << " failed windows\n"
        << "pearson(onn, oracle) = " << io::format_number(result.pearson) << '\n';
    return result;
}

std::string engineering(double value, std::string_view unit) {
    static constexpr const char* prefixes[] = {"f", "p", "n", "u", "m", "", "k", "M", "G"};
    std::ostringstream s;
    s.imbue(std::locale::classic());
    if (value == 0.0 || !std::isfinite(value)) {
        s << value << ' ' << unit;
        return s.str();
    }
    int exponent = static_cast<int>(std::floor(std::log10(std::abs(value)) / 3.0)) * 3;
    exponent = std::clamp(exponent, -15, 9);
    s << std::setprecision(4) << value / std::pow(10.0, exponent) << ' ' << prefixes[(exponent + 15) / 3] << unit;
    return s.str();
}

void cmd_hw(const HwCommand& cmd, std::ostream& out) {
    const double fraction = hw::locking_range_fraction(cmd.params);
    const double power = hw::power_per_oscillator(cmd.params);
    const auto cost = hw::inference_cost_estimate(cmd.params, cmd.delay_per_conv, cmd.n_filters);
    out << "locking_range_fraction = " << io::format_number(fraction) << '\n'
        << "power_per_oscillator = " << io::format_number(power) << " W (" << engineering(power, "W") << ")\n"
        << "delay = " << io::format_number(cost.delay) << " s (" << engineering(cost.delay, "s") << ")\n"
        << "energy = " << io::format_number(cost.energy) << " J (" << engineering(cost.energy, "J") << ")\n";
}

}  // namespace onn::cli
