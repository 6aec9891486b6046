#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace clm {

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline double sq(double x) { return x * x; }

/// Max-abs over a value vector. Empty vectors have sup norm 0.
inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// y += s*x
inline void axpy(double s, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

/// Thrown when an iterative solve exhausts its iteration budget.
struct SolveError : std::runtime_error {
    double residual;
    int iterations;
    SolveError(const std::string& what, double res, int it)
        : std::runtime_error(what + " (residual=" + std::to_string(res) +
                             ", iterations=" + std::to_string(it) + ")"),
          residual(res), iterations(it) {}
};

}  // namespace clm
