#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "horizonlab/errors.hpp"

namespace horizonlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

// ordinary least squares y = intercept + slope * x
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("fit_line: length mismatch");
    if (x.size() < 2) throw InsufficientData("fit_line: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DegenerateInput("fit_line: all x identical");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.n = x.size();
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    f.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return f;
}

// ln y = intercept + slope * ln x   (power law y ~ x^slope)
inline LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw ArithmeticDomainError("fit_loglog: x must be positive");
        lx[i] = std::log(x[i]);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw ArithmeticDomainError("fit_loglog: y must be positive");
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

// ln y = intercept + slope * x   (exponential y ~ e^{slope x})
inline LineFit fit_loglinear(std::span<const double> x, std::span<const double> y) {
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw ArithmeticDomainError("fit_loglinear: y must be positive");
        ly[i] = std::log(y[i]);
    }
    return fit_line(x, ly);
}

} // namespace horizonlab
