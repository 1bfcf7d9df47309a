#pragma once

#include <cmath>

namespace singul {

/// Neumaier-compensated accumulator. The Laplacian responses we measure are
/// small residuals of O(1) kernel sums, so plain summation loses the signal.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

}  // namespace singul
