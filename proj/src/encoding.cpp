#include "onn/encoding.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "onn/dynamics.hpp"
#include "onn/error.hpp"

namespace onn {
namespace {

// Raw grating values this close to zero count as ties and binarize to +1.
constexpr double kTieTolerance = 1e-12;

// Exact at multiples of 90 degrees so that rotated gratings are exact
// transposes and sign ties stay ties.
double cos_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r == 0.0) return 1.0;
    if (r == 90.0 || r == 270.0) return 0.0;
    if (r == 180.0) return -1.0;
    return std::cos(r * kTwoPi / 360.0);
}

double sin_deg(double deg) { return cos_deg(deg - 90.0); }

void check_pattern(std::size_t side, const std::vector<double>& values, const char* what) {
    if (side < 1) throw InputError(std::string(what) + ": side must be at least 1");
    if (values.size() != side * side) {
        throw InputError(std::string(what) + ": expected " + std::to_string(side * side) + " values, got " +
                         std::to_string(values.size()));
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double v = values[j];
        if (!(v >= -1.0 && v <= 1.0)) {
            throw InputError(std::string(what) + ": entry " + std::to_string(j) + " = " + std::to_string(v) +
                             " outside [-1, +1]");
        }
    }
}

GaborSpec parse_filter(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    auto number = [&](const char* key, double fallback, bool required) {
        if (!j.contains(key)) {
            if (required) throw ConfigError(where + "." + key + ": missing");
            return fallback;
        }
        if (!j[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
        return j[key].get<double>();
    };
    GaborSpec spec;
    spec.theta_deg = number("theta_deg", 0.0, true);
    spec.k = number("k", 0.0, true);
    spec.phase = number("phase", 0.0, false);
    spec.sigma = number("sigma", 0.0, false);
    if (j.contains("binarized")) {
        if (!j["binarized"].is_boolean()) throw ConfigError(where + ".binarized: expected true/false");
        spec.binarized = j["binarized"].get<bool>();
    }
    if (!std::isfinite(spec.theta_deg)) throw ConfigError(where + ".theta_deg: must be finite");
    if (!(spec.k >= 0.0) || !std::isfinite(spec.k)) throw ConfigError(where + ".k: must be >= 0");
    if (!std::isfinite(spec.phase)) throw ConfigError(where + ".phase: must be finite");
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw ConfigError(where + ".sigma: must be >= 0");
    for (const auto& item : j.items()) {
        const auto& key = item.key();
        if (key != "theta_deg" && key != "k" && key != "phase" && key != "binarized" && key != "sigma") {
            throw ConfigError(where + "." + key + ": unknown field");
        }
    }
    return spec;
}

}  // namespace

Fragment Fragment::from_values(std::size_t side, std::vector<double> values) {
    check_pattern(side, values, "fragment");
    return Fragment{side, std::move(values)};
}

GaborFilter GaborFilter::from_values(std::size_t side, std::vector<double> values) {
    check_pattern(side, values, "filter");
    GaborFilter g;
    g.side = side;
    g.binarized = true;
    for (double v : values) g.binarized = g.binarized && (v == 1.0 || v == -1.0);
    g.values = std::move(values);
    g.theta_deg = std::numeric_limits<double>::quiet_NaN();
    g.k = std::numeric_limits<double>::quiet_NaN();
    g.phase = std::numeric_limits<double>::quiet_NaN();
    return g;
}

Fragment normalize_fragment(std::span<const double> raw, std::size_t side, double g_max) {
    if (!(g_max > 0.0) || !std::isfinite(g_max)) throw InputError("normalize_fragment: g_max must be > 0");
    if (raw.size() != side * side) {
        throw InputError("normalize_fragment: expected " + std::to_string(side * side) + " pixels, got " +
                         std::to_string(raw.size()));
    }
    std::vector<double> values(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        if (!(raw[j] >= 0.0 && raw[j] <= g_max)) {
            throw InputError("normalize_fragment: pixel " + std::to_string(j) + " = " + std::to_string(raw[j]) +
                             " outside [0, " + std::to_string(g_max) + "]");
        }
        values[j] = 2.0 * raw[j] / g_max - 1.0;
    }
    return Fragment::from_values(side, std::move(values));
}

GaborFilter gabor_filter(std::size_t side, const GaborSpec& spec) {
    if (side < 1) throw ConfigError("gabor_filter: side must be at least 1");
    if (!(spec.k >= 0.0)) throw ConfigError("gabor_filter: k must be >= 0");
    if (!(spec.sigma >= 0.0)) throw ConfigError("gabor_filter: sigma must be >= 0");

    const double c = cos_deg(spec.theta_deg);
    const double s = sin_deg(spec.theta_deg);
    const double centre = 0.5 * static_cast<double>(side - 1);

    GaborFilter g;
    g.side = side;
    g.theta_deg = spec.theta_deg;
    g.k = spec.k;
    g.phase = spec.phase;
    g.binarized = spec.binarized;
    g.values.resize(side * side);
    for (std::size_t row = 0; row < side; ++row) {
        const double y = static_cast<double>(row) - centre;
        for (std::size_t col = 0; col < side; ++col) {
            const double x = static_cast<double>(col) - centre;
            double raw = std::cos(kTwoPi * spec.k * (x * c + y * s) + spec.phase);
            if (spec.sigma > 0.0) raw *= std::exp(-(x * x + y * y) / (2.0 * spec.sigma * spec.sigma));
            double& out = g.values[row * side + col];
            if (spec.binarized) {
                out = raw >= -kTieTolerance ? 1.0 : -1.0;
            } else {
                out = raw;
            }
        }
    }
    return g;
}

GaborFilter gabor_filter(std::size_t side, double theta_deg, double k, double phase, bool binarized) {
    return gabor_filter(side, GaborSpec{theta_deg, k, phase, binarized, 0.0});
}

std::vector<GaborSpec> default_bank_specs() {
    std::vector<GaborSpec> specs;
    for (double theta : {0.0, 30.0, 60.0, 90.0, 120.0, 150.0}) {
        for (double k : {0.2, 0.35, 0.5}) specs.push_back(GaborSpec{theta, k, 0.0, true, 0.0});
    }
    return specs;
}

std::vector<GaborFilter> default_bank(std::size_t side) {
    const auto specs = default_bank_specs();
    return make_bank(side, specs);
}

std::vector<GaborFilter> make_bank(std::size_t side, std::span<const GaborSpec> specs) {
    std::vector<GaborFilter> bank;
    bank.reserve(specs.size());
    for (const auto& spec : specs) bank.push_back(gabor_filter(side, spec));
    return bank;
}

BankDefinition parse_bank_json(std::string_view text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("bank: ") + e.what());
    }

    BankDefinition bank;
    const nlohmann::json* filters = &root;
    std::string prefix = "bank";
    if (root.is_object()) {
        for (const auto& item : root.items()) {
            if (item.key() != "side" && item.key() != "filters") {
                throw ConfigError("bank." + item.key() + ": unknown field");
            }
        }
        if (root.contains("side")) {
            const auto& side = root["side"];
            if (!side.is_number_integer() || side.get<long long>() < 1) {
                throw ConfigError("bank.side: expected a positive integer");
            }
            bank.side = side.get<std::size_t>();
        }
        if (!root.contains("filters")) throw ConfigError("bank.filters: missing");
        filters = &root["filters"];
        prefix = "bank.filters";
    }
    if (!filters->is_array()) throw ConfigError(prefix + ": expected an array of filters");
    if (filters->empty()) throw ConfigError(prefix + ": bank must contain at least one filter");
    for (std::size_t i = 0; i < filters->size(); ++i) {
        bank.filters.push_back(parse_filter((*filters)[i], prefix + "[" + std::to_string(i) + "]"));
    }
    return bank;
}

BankDefinition load_bank_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open bank file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_bank_json(text.str());
}

FrequencyVector fsk_encode(const Fragment& fragment, const GaborFilter& filter, double omega0,
                           double delta_omega) {
    if (fragment.side != filter.side || fragment.size() != filter.size()) {
        throw ConfigError("fsk_encode: fragment side " + std::to_string(fragment.side) +
                          " does not match filter side " + std::to_string(filter.side));
    }
    if (!(omega0 > 0.0)) throw ConfigError("fsk_encode: omega0 must be > 0");
    if (!(delta_omega >= 0.0)) throw ConfigError("fsk_encode: delta_omega must be >= 0");
    FrequencyVector out;
    out.omega.resize(fragment.size());
    for (std::size_t j = 0; j < fragment.size(); ++j) {
        out.omega[j] = omega0 + delta_omega * (fragment.values[j] - filter.values[j]);
    }
    return out;
}

}  // namespace onn
