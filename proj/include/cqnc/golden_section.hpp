#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace cqnc {

struct ScalarMinimum {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
    bool interior = false;   // false when the minimum sits on a bracket end
    bool unimodal = false;   // sampled values fall, then rise (no second dip)
};

/// Golden-section search for the minimum of f on [a, b] to absolute tolerance tol in x.
template <typename F>
ScalarMinimum golden_section(F&& f, double a, double b, double tol)
{
    constexpr double inv_phi = 0.6180339887498948482;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (std::abs(b - a) > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    ScalarMinimum m;
    if (fc <= fd) {
        m.x = c;
        m.value = fc;
    } else {
        m.x = d;
        m.value = fd;
    }
    return m;
}

/// Coarse uniform sampling of [lo, hi] followed by golden-section refinement
/// around the best sample. Samples returning +inf (infeasible) are skipped.
template <typename F>
ScalarMinimum sampled_minimize(F&& f, double lo, double hi, std::size_t samples, double tol)
{
    std::vector<double> xs(samples);
    std::vector<double> fs(samples);
    const double step = (hi - lo) / static_cast<double>(samples - 1);
    std::size_t best = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        xs[i] = i + 1 == samples ? hi : lo + step * static_cast<double>(i);
        fs[i] = f(xs[i]);
        if (fs[i] < fs[best]) best = i;
    }

    ScalarMinimum result;
    if (!std::isfinite(fs[best])) {
        result.x = xs[best];
        return result;
    }

    // Unimodal: non-increasing up to best, non-decreasing after, within a relative slack.
    const auto le = [](double u, double v) { return u <= v + 1e-12 * std::abs(v); };
    bool unimodal = true;
    for (std::size_t i = 1; i <= best; ++i) unimodal = unimodal && le(fs[i], fs[i - 1]);
    for (std::size_t i = best + 1; i < samples; ++i) unimodal = unimodal && le(fs[i - 1], fs[i]);

    const std::size_t left = best == 0 ? 0 : best - 1;
    const std::size_t right = best + 1 == samples ? best : best + 1;
    result = golden_section(f, xs[left], xs[right], tol);
    if (fs[best] < result.value) {
        result.x = xs[best];
        result.value = fs[best];
    }
    result.interior = best != 0 && best + 1 != samples;
    result.unimodal = unimodal;
    return result;
}

} // namespace cqnc
