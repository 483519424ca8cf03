#ifndef PCRIT_QUADRATURE_HPP
#define PCRIT_QUADRATURE_HPP

// Composite trapezoid rules on piecewise segments with one Richardson
// extrapolation step per refinement level, in one and two variables.

#include <functional>
#include <vector>

namespace pcrit {

/// One piece of an integration axis. Log segments are sampled uniformly in
/// ln(x) on [a, b] (a > 0) with the Jacobian folded into the weights.
struct Segment {
    double a = 0.0;
    double b = 0.0;
    bool log_spaced = false;
};

using Axis = std::vector<Segment>;

struct QuadratureOptions {
    double rel_tol = 1e-6;
    int base_intervals = 16;  // per segment at level 0
    int max_level = 9;
};

struct QuadratureResult {
    double value = 0.0;
    double rel_change = 0.0;  // |R_L - R_{L-1}| / |R_L| at the last level
    int level = 0;
    bool converged = false;
};

/// Nodes and trapezoid weights of the axis with `intervals` per segment.
void trapezoid_rule(const Axis& axis, int intervals, std::vector<double>& nodes,
                    std::vector<double>& weights);

QuadratureResult integrate(const std::function<double(double)>& f, const Axis& axis,
                           const QuadratureOptions& options = {});

/// Tensor-product rule: integrates f(x, y) over axis_x times axis_y,
/// refining both axes together.
QuadratureResult integrate(const std::function<double(double, double)>& f, const Axis& axis_x,
                           const Axis& axis_y, const QuadratureOptions& options = {});

}  // namespace pcrit

#endif  // PCRIT_QUADRATURE_HPP
