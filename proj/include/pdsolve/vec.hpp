#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdsolve {

using Vec = std::vector<double>;

inline void check_dim(const char* where, std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw std::invalid_argument(std::string(where) + ": expected vector of length " +
                                    std::to_string(expected) + ", got " + std::to_string(actual));
    }
}

inline double dot(const Vec& a, const Vec& b) {
    check_dim("dot", a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double norm_inf(const Vec& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

inline Vec add(const Vec& a, const Vec& b) {
    check_dim("add", a.size(), b.size());
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline Vec sub(const Vec& a, const Vec& b) {
    check_dim("sub", a.size(), b.size());
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline Vec scaled(const Vec& a, double s) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

// alpha*a + beta*b
inline Vec combine(double alpha, const Vec& a, double beta, const Vec& b) {
    check_dim("combine", a.size(), b.size());
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
    return out;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

inline double norm_pair(const Vec& x, const Vec& y) {
    return std::sqrt(norm_sq(x) + norm_sq(y));
}

}  // namespace pdsolve
