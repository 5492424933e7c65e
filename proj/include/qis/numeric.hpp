#ifndef QIS_NUMERIC_HPP
#define QIS_NUMERIC_HPP

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace qis {

// Neumaier-compensated accumulator. Fiber sums over ~1e5 states need the
// compensation to keep 1e-10 residual tolerances meaningful.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

inline double compensated_sum(const std::vector<double>& xs) {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace qis

#endif
