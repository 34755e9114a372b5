#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature with a hard budget on
// integrand evaluations. The error estimate is the raw |K15 - G7| difference,
// which over-estimates the K15 error on smooth integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "binspec/errors.hpp"

namespace binspec {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    int max_evaluations = 2048;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the center.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

template <typename F>
Panel gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int k = 0; k < 7; ++k) {
        const double dx = half * kKronrodNodes[k];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[k] * sum;
        if (k % 2 == 1) gauss += kGaussWeights[k / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b]; throws QuadratureError once the evaluation budget
/// is exhausted before the summed error estimate reaches abs_tol.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    constexpr int kPanelCost = 15;
    std::vector<detail::Panel> panels;
    panels.push_back(detail::gk15(f, a, b));
    int evaluations = kPanelCost;
    auto by_error = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };

    double total_error = panels.front().error;
    while (total_error > opt.abs_tol) {
        if (evaluations + 2 * kPanelCost > opt.max_evaluations) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not reach tolerance " << opt.abs_tol << " within "
                << opt.max_evaluations << " evaluations (error estimate " << total_error << ")";
            throw QuadratureError(msg.str());
        }
        std::pop_heap(panels.begin(), panels.end(), by_error);
        const detail::Panel worst = panels.back();
        panels.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        panels.push_back(detail::gk15(f, worst.a, mid));
        std::push_heap(panels.begin(), panels.end(), by_error);
        panels.push_back(detail::gk15(f, mid, worst.b));
        std::push_heap(panels.begin(), panels.end(), by_error);
        evaluations += 2 * kPanelCost;

        total_error = 0.0;
        for (const auto& p : panels) total_error += p.error;
    }

    QuadratureResult out;
    out.evaluations = evaluations;
    // Sum in interval order so the result does not depend on heap layout.
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
    for (const auto& p : panels) {
        out.value += p.value;
        out.abs_error += p.error;
    }
    return out;
}

}  // namespace binspec
