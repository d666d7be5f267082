#pragma once

#include "hcran/common.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace hcran {

struct LineSearchSettings {
    int scan_points = 64;
    double rel_tol = 1e-8;  // of the initial bracket width
    int max_iter = 100;
};

struct LineSearchResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool golden_fallback = false;
};

namespace detail {

template <class F>
double checked(F& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw NumericalError("objective is not finite inside the search bracket");
    return v;
}

template <class F>
LineSearchResult golden_section_max(F& f, double a, double b, double tol, LineSearchResult r) {
    const double inv_phi = 1.0 / std::numbers::phi;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = checked(f, c);
    double fd = checked(f, d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = checked(f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = checked(f, d);
        }
        ++r.iterations;
    }
    r.golden_fallback = true;
    r.x = fc >= fd ? c : d;
    r.value = std::max(fc, fd);
    return r;
}

}  // namespace detail

// Central difference clipped to [lo, hi].
template <class F>
double finite_difference(F&& f, double x, double step, double lo, double hi) {
    const double a = std::max(lo, x - step);
    const double b = std::min(hi, x + step);
    if (!(b > a)) return 0.0;
    return (f(b) - f(a)) / (b - a);
}

// Maximizes `value` on [lo, hi] by cubic interpolation on a derivative bracket.
// The iteration works on -value so the bracket has slope < 0 at the left end
// and > 0 at the right end.
template <class F, class D>
LineSearchResult cubic_interpolation_search(F&& value, D&& deriv, double lo, double hi,
                                            const LineSearchSettings& settings = {}) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "invalid search bracket");
    LineSearchResult best{lo, detail::checked(value, lo), 0, false};
    auto consider = [&](double x, double v) {
        if (v > best.value) {
            best.x = x;
            best.value = v;
        }
    };
    if (hi - lo <= 0.0) return best;

    const double eps = settings.rel_tol * (hi - lo);
    const int n = std::max(2, settings.scan_points);
    std::vector<double> xs(n), fs(n), gs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
        fs[i] = detail::checked(value, xs[i]);
        gs[i] = deriv(xs[i]);
        consider(xs[i], fs[i]);
    }

    // Bracket around the best-valued interior maximum candidate.
    int pick = -1;
    for (int i = 0; i + 1 < n; ++i) {
        if (gs[i] > 0.0 && gs[i + 1] < 0.0 && (pick < 0 || std::max(fs[i], fs[i + 1]) > std::max(fs[pick], fs[pick + 1])))
            pick = i;
    }
    if (pick < 0) return best;

    double p1 = xs[pick], p2 = xs[pick + 1];
    double f1 = -fs[pick], f2 = -fs[pick + 1];
    double s1 = -gs[pick], s2 = -gs[pick + 1];
    LineSearchResult r = best;
    int slow = 0;
    for (int k = 0; k < settings.max_iter; ++k) {
        const double h = p2 - p1;
        if (std::abs(h) <= eps) break;
        const double s = 3.0 * (f2 - f1) / h;
        const double z = s - s1 - s2;
        const double w = std::sqrt(std::max(0.0, z * z - s1 * s2));
        double p = p1 + h * (1.0 - (s2 + w + z) / (s2 - s1 + 2.0 * w));
        // Bisect when the step leaves the bracket or the bracket stops shrinking.
        if (!std::isfinite(p) || p <= p1 || p >= p2 || slow >= 3) {
            p = 0.5 * (p1 + p2);
            slow = 0;
        }
        const double fv = -detail::checked(value, p);
        const double g = -deriv(p);
        ++r.iterations;
        consider(p, -fv);
        if (g == 0.0) break;
        const double before = h;
        if (g < 0.0) {
            p1 = p;
            f1 = fv;
            s1 = g;
        } else {
            p2 = p;
            f2 = fv;
            s2 = g;
        }
        slow = (p2 - p1) > 0.5 * before ? slow + 1 : 0;
        if (k + 1 == settings.max_iter && p2 - p1 > eps) {
            LineSearchResult gsr = detail::golden_section_max(value, p1, p2, eps, r);
            consider(gsr.x, gsr.value);
            r.golden_fallback = true;
            r.iterations = gsr.iterations;
        }
    }
    r.x = best.x;
    r.value = best.value;
    return r;
}

}  // namespace hcran
