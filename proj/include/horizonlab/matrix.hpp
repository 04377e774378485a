#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace horizonlab {

// dense real symmetric matrix, row-major
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    static SymMatrix zero(std::size_t n) { return {n, std::vector<double>(n * n, 0.0)}; }

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    double frobenius() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }

    double max_asymmetry() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                m = std::max(m, std::abs(at(i, j) - at(j, i)));
        return m;
    }

    double trace() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += at(i, i);
        return s;
    }
};

} // namespace horizonlab
