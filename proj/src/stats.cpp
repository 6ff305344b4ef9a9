#include "onn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "onn/error.hpp"

namespace onn {

double mean(std::span<const double> x) {
    if (x.empty()) throw InsufficientDataError("mean: empty series");
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median(std::span<const double> x) {
    if (x.empty()) throw InsufficientDataError("median: empty series");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("pearson: length mismatch");
    if (x.size() < 2) throw ConfigError("pearson: need at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace onn
