#include "onn/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "onn/error.hpp"

namespace onn::cli {
namespace {

using nlohmann::json;

class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    void allow(std::initializer_list<std::string_view> keys) const {
        for (const auto& item : node_.items()) {
            bool known = false;
            for (auto k : keys) known = known || item.key() == k;
            if (!known) throw ConfigError(path_ + "." + item.key() + ": unknown field");
        }
    }

    void number(const char* key, double& out) const {
        if (!node_.contains(key)) return;
        const auto& v = node_[key];
        if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
        out = v.get<double>();
    }

    template <typename Int>
    void integer(const char* key, Int& out) const {
        if (!node_.contains(key)) return;
        const auto& v = node_[key];
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(field(key) + ": expected a non-negative integer");
        }
        out = v.get<Int>();
    }

    void boolean(const char* key, bool& out) const {
        if (!node_.contains(key)) return;
        const auto& v = node_[key];
        if (!v.is_boolean()) throw ConfigError(field(key) + ": expected true or false");
        out = v.get<bool>();
    }

    std::string field(const char* key) const { return path_ + "." + key; }

private:
    const json& node_;
    std::string path_;
};

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(what) + ": cannot parse '" + std::string(text) + "' as a number");
    }
    return value;
}

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError("seeds: cannot parse '" + std::string(text) + "' as a seed");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::vector<GaborFilter> RunConfig::filters() const { return make_bank(side, bank); }

void RunConfig::validate() const {
    auto prefixed = [](const char* section, const Error& e) {
        return ConfigError(std::string("config.") + section + "." + e.what());
    };
    if (side < 1) throw ConfigError("config.bank.side: must be at least 1");
    if (bank.empty()) throw ConfigError("config.bank: at least one filter is required");
    OscillatorArrayConfig sized = dynamics;
    sized.n = side * side + (match.reference_oscillator ? 1 : 0);
    try {
        sized.validate();
        // Largest frequency any binarized or normalized pair can encode.
        const double w_max = dynamics.omega0 + 2.0 * dynamics.delta_omega;
        if (dynamics.dt > 0.0 && dynamics.dt > kTwoPi / (25.0 * w_max) * (1.0 + 1e-12)) {
            throw ConfigError("dt: exceeds the accuracy guard 2*pi/(25*(omega0 + 2*delta_omega))");
        }
    } catch (const ConfigError& e) {
        throw prefixed("dynamics", e);
    }
    try {
        match.validate(sized);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config.") + e.what());
    }
    for (std::size_t i = 0; i < bank.size(); ++i) {
        if (!(bank[i].k >= 0.0) || !(bank[i].sigma >= 0.0)) {
            throw ConfigError("config.bank[" + std::to_string(i) + "]: k and sigma must be >= 0");
        }
    }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    RunConfig cfg;
    Section top(root, "config");
    top.allow({"dynamics", "dom", "lock", "bank", "seeds", "jobs", "out_dir", "dump_traces"});

    if (root.contains("dynamics")) {
        Section d(root["dynamics"], "config.dynamics");
        d.allow({"rho", "omega0", "delta_omega", "epsilon", "dt", "t_end", "stride", "peak_tau",
                 "include_self_in_sum", "normalize_averager", "initial_amplitude", "reference_oscillator"});
        d.number("rho", cfg.dynamics.rho);
        d.number("omega0", cfg.dynamics.omega0);
        d.number("delta_omega", cfg.dynamics.delta_omega);
        d.number("epsilon", cfg.dynamics.epsilon);
        d.number("dt", cfg.dynamics.dt);
        d.number("t_end", cfg.dynamics.t_end);
        d.integer("stride", cfg.dynamics.stride);
        d.number("peak_tau", cfg.dynamics.peak_tau);
        d.boolean("include_self_in_sum", cfg.dynamics.include_self_in_sum);
        d.boolean("normalize_averager", cfg.dynamics.normalize_averager);
        d.number("initial_amplitude", cfg.match.initial_amplitude);
        d.boolean("reference_oscillator", cfg.match.reference_oscillator);
    }
    if (root.contains("dom")) {
        Section d(root["dom"], "config.dom");
        d.allow({"method", "sample_time", "trailing_fraction"});
        if (root["dom"].contains("method")) {
            const auto& m = root["dom"]["method"];
            if (m == "trailing_mean_envelope") {
                cfg.match.policy.method = DomMethod::trailing_mean_envelope;
            } else if (m == "sample_peak_detector") {
                cfg.match.policy.method = DomMethod::sample_peak_detector;
            } else {
                throw ConfigError("config.dom.method: expected \"trailing_mean_envelope\" or \"sample_peak_detector\"");
            }
        }
        if (root["dom"].contains("sample_time")) {
            double t = 0.0;
            d.number("sample_time", t);
            cfg.match.policy.sample_time = t;
        }
        d.number("trailing_fraction", cfg.match.policy.trailing_fraction);
    }
    if (root.contains("lock")) {
        Section l(root["lock"], "config.lock");
        l.allow({"spread_tol_fraction", "dom_threshold_fraction"});
        l.number("spread_tol_fraction", cfg.match.spread_tol_fraction);
        l.number("dom_threshold_fraction", cfg.match.lock_threshold_fraction);
    }
    if (root.contains("bank")) {
        const auto& b = root["bank"];
        BankDefinition def;
        try {
            if (b.is_string()) {
                std::filesystem::path p = b.get<std::string>();
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                def = load_bank_file(p);
            } else {
                def = parse_bank_json(b.dump());
            }
        } catch (const Error& e) {
            throw ConfigError(std::string("config.") + e.what());
        }
        cfg.bank = std::move(def.filters);
        if (def.side > 0) cfg.side = def.side;
    }
    if (root.contains("seeds")) {
        const auto& s = root["seeds"];
        if (!s.is_array() || s.empty()) throw ConfigError("config.seeds: expected a non-empty array");
        cfg.match.seeds.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s[i].is_number_unsigned()) {
                throw ConfigError("config.seeds[" + std::to_string(i) + "]: expected a non-negative integer");
            }
            cfg.match.seeds.push_back(s[i].get<std::uint64_t>());
        }
    }
    top.integer("jobs", cfg.match.jobs);
    if (root.contains("out_dir")) {
        if (!root["out_dir"].is_string()) throw ConfigError("config.out_dir: expected a string");
        cfg.out_dir = root["out_dir"].get<std::string>();
    }
    top.boolean("dump_traces", cfg.dump_traces);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_run_config(text.str(), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    for (auto part : split(text, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string_view::npos) {
            seeds.push_back(parse_u64(part));
            continue;
        }
        const auto lo = parse_u64(part.substr(0, dash));
        const auto hi = parse_u64(part.substr(dash + 1));
        if (hi < lo) throw ConfigError("seeds: empty range '" + std::string(part) + "'");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw ConfigError("seeds: empty list");
    return seeds;
}

std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError("grid: expected start:stop:step");
        const double start = parse_double(parts[0], "grid");
        const double stop = parse_double(parts[1], "grid");
        const double step = parse_double(parts[2], "grid");
        if (!(step > 0.0) || stop < start) throw ConfigError("grid: need step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    } else {
        for (auto part : split(text, ',')) grid.push_back(parse_double(part, "grid"));
    }
    if (grid.empty()) throw ConfigError("grid: no points");
    return grid;
}

}  // namespace onn::cli
