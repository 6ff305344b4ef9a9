#pragma once

#include <span>

namespace onn {

double mean(std::span<const double> x);

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> x);

double median(std::span<const double> x);

// Pearson correlation coefficient. Throws ConfigError on a length mismatch
// or fewer than two values; returns NaN when either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace onn
