#include "tract_equity/lowess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tract_equity/errors.hpp"

namespace tract_equity {

namespace {

double tricube(double u) {
    if (u >= 1.0) return 0.0;
    double t = 1.0 - u * u * u;
    return t * t * t;
}

class Fitter {
public:
    Fitter(std::span<const LowessPoint> pts, std::size_t window, double x_range)
        : pts_(pts),
          window_(window),
          // Cleveland's degeneracy guard: below this x-spread the local fit
          // collapses to a weighted mean.
          denom_floor_(0.001 * x_range),
          robustness_(pts.size(), 1.0),
          scratch_(pts.size()) {}

    std::vector<double>& robustness() { return robustness_; }

    double fit_at(double x0) const {
        const std::size_t n = pts_.size();
        for (std::size_t i = 0; i < n; ++i) scratch_[i] = std::abs(pts_[i].x - x0);
        std::vector<double> dist = scratch_;
        std::nth_element(dist.begin(), dist.begin() + static_cast<long>(window_ - 1),
                         dist.end());
        const double h = dist[window_ - 1];

        double wsum = 0.0, xbar = 0.0, ybar = 0.0;
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double d = scratch_[i];
            double k;
            if (h > 0.0) {
                if (d > h) continue;
                k = tricube(d / h);
            } else {
                if (d > 0.0) continue;
                k = 1.0;
            }
            w[i] = k * pts_[i].weight * robustness_[i];
            wsum += w[i];
            xbar += w[i] * pts_[i].x;
            ybar += w[i] * pts_[i].y;
        }
        if (wsum <= 0.0) {
            // Every in-window point was robustness-zeroed; fall back to the
            // plain kernel fit.
            for (std::size_t i = 0; i < n; ++i) {
                double d = scratch_[i];
                if (h > 0.0 ? d > h : d > 0.0) continue;
                w[i] = (h > 0.0 ? tricube(d / h) : 1.0) * pts_[i].weight;
                wsum += w[i];
                xbar += w[i] * pts_[i].x;
                ybar += w[i] * pts_[i].y;
            }
        }
        if (wsum <= 0.0) return pts_[nearest_index(x0)].y;
        xbar /= wsum;
        ybar /= wsum;

        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] <= 0.0) continue;
            double dx = pts_[i].x - xbar;
            sxx += w[i] * dx * dx;
            sxy += w[i] * dx * (pts_[i].y - ybar);
        }
        if (std::sqrt(sxx / wsum) <= denom_floor_) return ybar;
        return ybar + (sxy / sxx) * (x0 - xbar);
    }

private:
    std::size_t nearest_index(double x0) const {
        std::size_t best = 0;
        double best_d = std::abs(pts_[0].x - x0);
        for (std::size_t i = 1; i < pts_.size(); ++i) {
            double d = std::abs(pts_[i].x - x0);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    std::span<const LowessPoint> pts_;
    std::size_t window_;
    double denom_floor_;
    std::vector<double> robustness_;
    mutable std::vector<double> scratch_;
};

}  // namespace

LowessCurve lowess_trend(std::span<const LowessPoint> points, const LowessOptions& options) {
    const std::size_t n = points.size();
    if (n < 3) {
        throw TooFewPointsError("lowess needs at least 3 points, got " + std::to_string(n));
    }
    if (!(options.frac > 0.0) || options.frac > 1.0) {
        throw Error("lowess frac must be in (0, 1], got " + std::to_string(options.frac));
    }
    if (options.grid_points < 2) throw Error("lowess grid needs at least 2 positions");
    for (const LowessPoint& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.weight) ||
            p.weight < 0.0) {
            throw Error("lowess points must be finite with nonnegative weights");
        }
    }

    double xmin = points[0].x, xmax = points[0].x;
    for (const LowessPoint& p : points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }

    auto window = static_cast<std::size_t>(options.frac * static_cast<double>(n));
    window = std::clamp<std::size_t>(window, 2, n);

    Fitter fitter(points, window, xmax - xmin);

    // Robustness passes refit at the data positions and downweight outliers
    // by bisquare of the scaled residual.
    std::vector<double> abs_res(n);
    for (int iter = 0; iter < options.iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            abs_res[i] = std::abs(points[i].y - fitter.fit_at(points[i].x));
        }
        std::vector<double> sorted = abs_res;
        std::sort(sorted.begin(), sorted.end());
        double cmad = 3.0 * (sorted[n / 2] + sorted[n - n / 2 - 1]);
        if (cmad <= 0.0) {
            std::fill(fitter.robustness().begin(), fitter.robustness().end(), 1.0);
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double r = abs_res[i];
            double& rw = fitter.robustness()[i];
            if (r <= 0.001 * cmad) {
                rw = 1.0;
            } else if (r > 0.999 * cmad) {
                rw = 0.0;
            } else {
                double u = r / cmad;
                double t = 1.0 - u * u;
                rw = t * t;
            }
        }
    }

    LowessCurve curve;
    curve.x.resize(options.grid_points);
    curve.y.resize(options.grid_points);
    const double step = (xmax - xmin) / static_cast<double>(options.grid_points - 1);
    for (std::size_t k = 0; k < options.grid_points; ++k) {
        double x0 = k + 1 == options.grid_points ? xmax : xmin + step * static_cast<double>(k);
        curve.x[k] = x0;
        curve.y[k] = fitter.fit_at(x0);
    }
    return curve;
}

}  // namespace tract_equity
