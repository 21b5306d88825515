#pragma once

#include <cmath>
#include <numeric>
#include <span>

#include <boost/math/distributions/students_t.hpp>

namespace nobcr {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Half-width of the two-sided 95% t interval for the mean; 0 for fewer than two values.
inline double ci95_halfwidth(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const boost::math::students_t dist(static_cast<double>(xs.size() - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return t * sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace nobcr
