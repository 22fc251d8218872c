#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bipep/errors.hpp"

namespace bipep {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

namespace detail {

/// Plain least-squares line through (x, y).
inline RateFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    // a constant series fitted exactly has no variance to explain
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

}  // namespace detail

/// Least-squares line through (log eps, log value): the empirical decay
/// exponent of a sweep quantity.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw ConfigError("fit_rate: need at least 3 points for a rate fit");
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [eps, value] : points) {
        if (!(eps > 0.0)) throw LogDomainError("fit_rate: eps must be positive");
        if (!(value > 0.0))
            throw LogDomainError("fit_rate: values must be positive for a log-log fit");
        x.push_back(std::log(eps));
        y.push_back(std::log(value));
    }
    return detail::linear_fit(x, y);
}

}  // namespace bipep
