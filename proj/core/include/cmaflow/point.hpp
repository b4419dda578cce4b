#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace cmaflow {

/// A point of C^n (n <= 2) in real coordinates (x1, y1, x2, y2); unused
/// trailing coordinates stay zero so the same type serves n = 1 and n = 2.
struct Point {
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};

    double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }

    double norm2() const { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]; }
    double norm() const { return std::sqrt(norm2()); }

    friend Point operator+(Point a, const Point& b) {
        for (int i = 0; i < 4; ++i) a.x[i] += b.x[i];
        return a;
    }
    friend Point operator-(Point a, const Point& b) {
        for (int i = 0; i < 4; ++i) a.x[i] -= b.x[i];
        return a;
    }
    friend Point operator*(double s, Point a) {
        for (double& c : a.x) c *= s;
        return a;
    }
};

inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }

}  // namespace cmaflow
