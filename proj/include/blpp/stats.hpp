#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "blpp/errors.hpp"

namespace blpp {

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// jackknife standard error of the sample mean
inline double jackknife_stderr(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        const double loo = (m * static_cast<double>(n) - x) / static_cast<double>(n - 1);
        ss += (loo - m) * (loo - m);
    }
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

// jackknife standard error of sum(num)/sum(den)
inline double jackknife_ratio_stderr(const std::vector<double>& num,
                                     const std::vector<double>& den) {
    require(num.size() == den.size() && num.size() >= 2, "ratio jackknife needs paired samples");
    const size_t n = num.size();
    double sn = 0.0, sd = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sn += num[i];
        sd += den[i];
    }
    const double full = sn / sd;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double loo = (sn - num[i]) / (sd - den[i]);
        ss += (loo - full) * (loo - full);
    }
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    int points_used = 0;
    bool valid = false;
};

struct FitPoint {
    double n = 0.0;
    double value = 0.0;
    double stderr_value = 0.0;
};

// Ordinary least squares of log(value) against log(n).
inline FitResult fit_loglog(const std::vector<FitPoint>& points) {
    require(points.size() >= 3, "log-log fit needs at least three points");
    for (const auto& pt : points)
        require(pt.n > 0.0 && pt.value > 0.0, "log-log fit needs positive values");
    const int n = static_cast<int>(points.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = std::log(points[i].n);
        ys[i] = std::log(points[i].value);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    require(sxx > 0.0, "log-log fit needs at least two distinct abscissae");
    FitResult out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (out.intercept + out.slope * xs[i]);
        ssr += r * r;
    }
    out.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    out.points_used = n;
    out.valid = true;
    return out;
}

// two-sample Kolmogorov-Smirnov statistic
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "KS needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double v = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= v) ++ia;
        while (ib < b.size() && b[ib] <= v) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return d;
}

// asymptotic two-sample KS rejection threshold at the given level
inline double ks_critical(double level, size_t na, size_t nb) {
    const double c = std::sqrt(-0.5 * std::log(level / 2.0));
    return c * std::sqrt((static_cast<double>(na) + static_cast<double>(nb)) /
                         (static_cast<double>(na) * static_cast<double>(nb)));
}

inline double quantile(std::vector<double> xs, double q) {
    require(!xs.empty(), "quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * (static_cast<double>(xs.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace blpp
