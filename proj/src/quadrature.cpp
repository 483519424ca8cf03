#include "pcrit/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pcrit {

void trapezoid_rule(const Axis& axis, int intervals, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.clear();
    weights.clear();
    for (const Segment& seg : axis) {
        if (!(seg.b > seg.a)) continue;
        if (seg.log_spaced && !(seg.a > 0.0))
            throw std::invalid_argument("trapezoid_rule: log segment needs a > 0");
        const double lo = seg.log_spaced ? std::log(seg.a) : seg.a;
        const double hi = seg.log_spaced ? std::log(seg.b) : seg.b;
        const double step = (hi - lo) / intervals;
        for (int k = 0; k <= intervals; ++k) {
            const double u = (k == intervals) ? hi : lo + k * step;
            const double x = seg.log_spaced ? std::exp(u) : u;
            double w = (k == 0 || k == intervals) ? 0.5 * step : step;
            if (seg.log_spaced) w *= x;
            nodes.push_back(x);
            weights.push_back(w);
        }
    }
}

namespace {

template <class Sum>
QuadratureResult refine(Sum&& trapezoid_at, const QuadratureOptions& options) {
    QuadratureResult result;
    double prev_trap = trapezoid_at(options.base_intervals);
    double prev_rich = prev_trap;
    for (int level = 1; level <= options.max_level; ++level) {
        const double trap = trapezoid_at(options.base_intervals << level);
        const double rich = trap + (trap - prev_trap) / 3.0;
        const double scale = std::abs(rich);
        const double change = std::abs(rich - prev_rich);
        result.value = rich;
        result.level = level;
        result.rel_change = scale > 0.0 ? change / scale : change;
        if (level >= 2 && (change <= options.rel_tol * scale || (scale == 0.0 && change == 0.0))) {
            result.converged = true;
            return result;
        }
        prev_trap = trap;
        prev_rich = rich;
    }
    return result;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, const Axis& axis,
                           const QuadratureOptions& options) {
    std::vector<double> x, w;
    return refine(
        [&](int intervals) {
            trapezoid_rule(axis, intervals, x, w);
            double sum = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * f(x[i]);
            return sum;
        },
        options);
}

QuadratureResult integrate(const std::function<double(double, double)>& f, const Axis& axis_x,
                           const Axis& axis_y, const QuadratureOptions& options) {
    std::vector<double> x, wx, y, wy;
    return refine(
        [&](int intervals) {
            trapezoid_rule(axis_x, intervals, x, wx);
            trapezoid_rule(axis_y, intervals, y, wy);
            double sum = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (wx[i] == 0.0) continue;
                double row = 0.0;
                for (std::size_t j = 0; j < y.size(); ++j) row += wy[j] * f(x[i], y[j]);
                sum += wx[i] * row;
            }
            return sum;
        },
        options);
}

}  // namespace pcrit
