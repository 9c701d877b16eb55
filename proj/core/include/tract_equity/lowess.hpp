#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tract_equity {

struct LowessPoint {
    double x = 0.0;
    double y = 0.0;
    double weight = 1.0;  // point weight, multiplies the kernel weight
};

struct LowessOptions {
    double frac = 2.0 / 3.0;       // fraction of points in each local window
    int iterations = 3;            // robustness reweighting passes
    std::size_t grid_points = 100;  // evenly spaced evaluation positions
};

struct LowessCurve {
    std::vector<double> x;
    std::vector<double> y;
};

// Locally weighted linear regression with a tricube kernel over the
// frac-nearest neighbors, plus bisquare robustness reweighting. The curve
// is sampled at grid_points evenly spaced x positions spanning the data.
// Scaling every point weight by the same positive constant leaves the
// output unchanged. Throws TooFewPointsError for fewer than 3 points and
// Error for frac outside (0,1] or negative weights.
LowessCurve lowess_trend(std::span<const LowessPoint> points,
                         const LowessOptions& options = {});

}  // namespace tract_equity
