#include "pcrit/testfn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcrit {

namespace {

// integrands are set to zero where the test function is below this value
constexpr double kPhiFloor = 1e-300;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// |d|^e phi^{-c} evaluated in log space so tiny factors cannot produce 0 * inf
double ratio_power(double derivative, double e, double phi, double c) {
    if (phi < kPhiFloor || derivative == 0.0) return 0.0;
    return std::exp(e * std::log(std::abs(derivative)) - c * std::log(phi));
}

Axis split_axis(std::vector<double> breaks, bool log_tail_from_second) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    Axis axis;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const bool log_seg = log_tail_from_second && i >= 1 && breaks[i] > 0.0;
        axis.push_back({breaks[i], breaks[i + 1], log_seg});
    }
    return axis;
}

// Radii where the forcing or initial data change character; keeps narrow
// features resolved when the test-function support is much wider.
std::vector<double> data_breakpoints(const ForcingSpec& forcing, const InitialDataSpec& initial) {
    std::vector<double> out;
    if (const auto* tail = std::get_if<PowerTailForcing>(&forcing.kind))
        out.push_back(tail->plateau_radius);
    if (const auto* g = std::get_if<GaussianForcing>(&forcing.kind)) {
        out.push_back(g->width);
        out.push_back(6.0 * g->width);
    }
    if (const auto* g = std::get_if<GaussianInitial>(&initial.kind)) {
        out.push_back(g->width);
        out.push_back(6.0 * g->width);
    }
    if (std::holds_alternative<ResidualForcing>(forcing.kind) ||
        std::holds_alternative<BarrierFractionInitial>(initial.kind))
        out.push_back(1.0);
    return out;
}

QuantityEstimate to_estimate(const QuadratureResult& q) { return {q.value, q.converged, q.rel_change}; }

}  // namespace

double CutoffProfile::value(double s) const {
    if (s <= plateau_end) return 1.0;
    if (s >= support_end) return 0.0;
    const double t = (s - plateau_end) / (support_end - plateau_end);
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double CutoffProfile::derivative(double s) const {
    if (s <= plateau_end || s >= support_end) return 0.0;
    const double width = support_end - plateau_end;
    const double t = (s - plateau_end) / width;
    return -30.0 * t * t * (1.0 - t) * (1.0 - t) / width;
}

double CutoffProfile::max_slope() const { return 15.0 / (8.0 * (support_end - plateau_end)); }

double TestFunctionSpec::time_exponent() const { return alpha / (alpha - 1.0); }
double TestFunctionSpec::space_exponent() const { return beta / (beta - p + 1.0); }

double TestFunctionSpec::plateau_radius(double T) const {
    return std::visit(overloaded{
                          [&](const PowerScaling& s) { return phi.plateau_end * std::pow(T, s.kappa); },
                          [&](const LogScaling& s) {
                              return std::pow(T, s.theta * (1.0 + phi.plateau_end));
                          },
                      },
                      variant);
}

double TestFunctionSpec::support_radius(double T) const {
    return std::visit(overloaded{
                          [&](const PowerScaling& s) { return phi.support_end * std::pow(T, s.kappa); },
                          [&](const LogScaling& s) {
                              return std::pow(T, s.theta * (1.0 + phi.support_end));
                          },
                      },
                      variant);
}

double TestFunctionSpec::similarity(double radius, double T) const {
    return std::visit(overloaded{
                          [&](const PowerScaling& s) { return radius / std::pow(T, s.kappa); },
                          [&](const LogScaling& s) {
                              if (radius <= 0.0) return -std::numeric_limits<double>::infinity();
                              const double scale = s.theta * std::log(T);
                              return (std::log(radius) - scale) / scale;
                          },
                      },
                      variant);
}

double TestFunctionSpec::similarity_slope(double radius, double T) const {
    return std::visit(overloaded{
                          [&](const PowerScaling& s) { return std::pow(T, -s.kappa); },
                          [&](const LogScaling& s) {
                              if (radius <= 0.0) return 0.0;
                              return 1.0 / (radius * s.theta * std::log(T));
                          },
                      },
                      variant);
}

double TestFunctionSpec::space_factor(double radius, double T) const {
    return std::pow(phi.value(similarity(radius, T)), space_exponent());
}

double TestFunctionSpec::space_factor_dr(double radius, double T) const {
    const double s = similarity(radius, T);
    const double d = phi.derivative(s);
    if (d == 0.0) return 0.0;
    const double b = space_exponent();
    return b * std::pow(phi.value(s), b - 1.0) * d * similarity_slope(radius, T);
}

double TestFunctionSpec::time_factor(double t, double T) const {
    return std::pow(psi.value(t / T), time_exponent());
}

double TestFunctionSpec::time_factor_dt(double t, double T) const {
    const double d = psi.derivative(t / T);
    if (d == 0.0) return 0.0;
    const double a = time_exponent();
    return a * std::pow(psi.value(t / T), a - 1.0) * d / T;
}

double balancing_kappa(double alpha, double beta, double p) {
    return alpha * (beta - p + 1.0) / (beta * (alpha - 1.0));
}

TestFunctionSpec power_test_function(double alpha, double beta, double p,
                                     std::optional<double> kappa) {
    if (!(alpha > 1.0) || !(beta > p - 1.0))
        throw std::invalid_argument("power_test_function: needs alpha > 1 and beta > p-1");
    return TestFunctionSpec{PowerScaling{kappa.value_or(balancing_kappa(alpha, beta, p))},
                            alpha, beta, p, CutoffProfile{0.5, 1.0}, CutoffProfile{0.5, 1.0}};
}

TestFunctionSpec wide_power_test_function(double alpha, double beta, double p,
                                          std::optional<double> kappa) {
    TestFunctionSpec spec = power_test_function(alpha, beta, p, kappa);
    spec.phi = CutoffProfile{1.0, 2.0};
    return spec;
}

double log_theta_limit(double alpha, int n) { return alpha / (2.0 * n * (alpha - 1.0)); }

TestFunctionSpec log_test_function(double alpha, double beta, double p, int n,
                                   std::optional<double> theta) {
    if (!(alpha > 1.0) || !(beta > p - 1.0))
        throw std::invalid_argument("log_test_function: needs alpha > 1 and beta > p-1");
    const double limit = log_theta_limit(alpha, n);
    const double th = theta.value_or(0.5 * limit);
    if (!(th > 0.0) || !(th < limit))
        throw std::invalid_argument("log_test_function: theta must lie in (0, alpha/(2n(alpha-1)))");
    return TestFunctionSpec{LogScaling{th}, alpha, beta, p, CutoffProfile{0.5, 1.0},
                            CutoffProfile{0.0, 1.0}};
}

bool RescaledIntegrals::converged() const {
    return I1.converged && I2.converged && F.converged && U0.converged && plateau_mass.converged;
}

RescaledIntegrals rescaled_integrals(const TestFunctionSpec& spec, int n, double T,
                                     const ForcingSpec& forcing, const InitialDataSpec& initial,
                                     const QuadratureOptions& options) {
    if (!(T >= 10.0)) throw std::invalid_argument("rescaled_integrals: needs T >= 10");
    const double omega = sphere_area(n);
    const double a = spec.time_exponent();
    const double b = spec.space_exponent();
    const double ct = 1.0 / (spec.alpha - 1.0);
    const double cx = (spec.p - 1.0) / (spec.beta - spec.p + 1.0);
    const double r_plateau = spec.plateau_radius(T);
    const double r_support = spec.support_radius(T);

    std::vector<double> radial_breaks{0.0, r_plateau, r_support};
    std::vector<double> data_breaks = radial_breaks;
    for (double brk : data_breakpoints(forcing, initial))
        if (brk < r_support) data_breaks.push_back(brk);
    const bool log_ramp = spec.is_log();
    const Axis r_axis = split_axis(radial_breaks, log_ramp);
    const Axis data_axis = split_axis(data_breaks, true);
    const Axis t_axis{{0.0, spec.psi.plateau_end * T, false},
                      {spec.psi.plateau_end * T, std::min(1.0, spec.psi.support_end) * T, false}};

    auto weight = [&](double r) { return omega * std::pow(r, n - 1); };

    RescaledIntegrals out;
    out.T = T;
    out.I1 = to_estimate(integrate(
        [&](double t, double r) {
            const double sf = spec.space_factor(r, T);
            const double phi = spec.time_factor(t, T) * sf;
            return ratio_power(spec.time_factor_dt(t, T) * sf, a, phi, ct) * weight(r);
        },
        t_axis, r_axis, options));
    out.I2 = to_estimate(integrate(
        [&](double t, double r) {
            const double tf = spec.time_factor(t, T);
            const double phi = tf * spec.space_factor(r, T);
            return ratio_power(tf * spec.space_factor_dr(r, T), b, phi, cx) * weight(r);
        },
        t_axis, r_axis, options));
    out.F = to_estimate(integrate(
        [&](double r) { return evaluate(forcing, r) * spec.space_factor(r, T) * weight(r); },
        data_axis, options));
    out.U0 = to_estimate(integrate(
        [&](double r) {
            return evaluate(initial, r) * spec.time_factor(0.0, T) * spec.space_factor(r, T) *
                   weight(r);
        },
        data_axis, options));

    // plateau ball of the unscaled profile
    const double ball = spec.is_log() ? 1.0 : spec.phi.plateau_end;
    std::vector<double> ball_breaks{0.0, ball};
    if (const auto* tail = std::get_if<PowerTailForcing>(&forcing.kind)) {
        if (tail->plateau_radius < ball) ball_breaks.push_back(tail->plateau_radius);
    }
    out.plateau_mass = to_estimate(integrate(
        [&](double r) { return evaluate(forcing, r) * weight(r); }, split_axis(ball_breaks, false),
        options));
    return out;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 4) throw std::invalid_argument("scaling_fit: needs at least 4 samples");
    const auto m = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto [x, value] = samples[static_cast<std::size_t>(i)];
        if (!(x > 0.0)) throw std::invalid_argument("scaling_fit: abscissae must be positive");
        if (i > 0 && !(x > samples[static_cast<std::size_t>(i - 1)].first))
            throw std::invalid_argument("scaling_fit: abscissae must be strictly increasing");
        if (!(value > 0.0)) throw std::invalid_argument("scaling_fit: values must be positive");
        A(i, 0) = std::log(x);
        A(i, 1) = 1.0;
        y(i) = std::log(value);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    ScalingFit fit;
    fit.slope = coef(0);
    fit.intercept = coef(1);
    fit.residual = (A * coef - y).cwiseAbs().maxCoeff();
    return fit;
}

ForcingMassBound forcing_mass_lower_bound(const PowerTailForcing& forcing, double T, double kappa,
                                          int n, double space_exponent) {
    if (!(forcing.r > 0.0) || !(forcing.r < n))
        throw std::invalid_argument("forcing_mass_lower_bound: needs 0 < r < n");
    const double scale = std::pow(T, kappa);
    if (0.5 * scale < forcing.plateau_radius)
        throw std::invalid_argument(
            "forcing_mass_lower_bound: annulus T^kappa/2 < |x| must lie beyond the plateau radius");
    const CutoffProfile wide{1.0, 2.0};
    const double omega = sphere_area(n);
    const ForcingSpec f{forcing, SignClass::StrictlyPositive};

    const Axis axis = split_axis({0.0, forcing.plateau_radius, scale, 2.0 * scale}, true);
    QuadratureOptions options;
    options.rel_tol = 1e-9;
    const auto q = integrate(
        [&](double r) {
            return evaluate(f, r) * std::pow(wide.value(r / scale), space_exponent) * omega *
                   std::pow(r, n - 1);
        },
        axis, options);

    ForcingMassBound out;
    out.mass = q.value;
    const double d = n - forcing.r;
    out.bound_constant = forcing.amplitude * omega * (1.0 - std::pow(2.0, -d)) / d;
    out.bound = out.bound_constant * std::pow(T, d * kappa);
    out.holds = out.mass >= out.bound;
    return out;
}

WeakFormGap weak_form_gap(const Trajectory& traj, const TestFunctionSpec& spec,
                          const ProblemSpec& problem) {
    if (traj.snapshots.size() < 2 || traj.times.size() != traj.snapshots.size())
        throw std::invalid_argument("weak_form_gap: needs at least two snapshots");
    if (traj.n != problem.n) throw std::invalid_argument("weak_form_gap: dimension mismatch");
    const double T = traj.times.back();
    if (spec.psi.support_end > 1.0)
        throw std::invalid_argument("weak_form_gap: test function must vanish at the horizon");
    if (spec.support_radius(T) > traj.grid.R())
        throw std::invalid_argument("weak_form_gap: test function support exceeds the domain");

    const RadialGrid& grid = traj.grid;
    const Eigen::ArrayXd& r = grid.centers();
    const Eigen::ArrayXd w = sphere_area(problem.n) * grid.shell_measures(problem.n);
    const Eigen::ArrayXd sf = r.unaryExpr([&](double x) { return spec.space_factor(x, T); });
    const Eigen::ArrayXd sf_dr = r.unaryExpr([&](double x) { return spec.space_factor_dr(x, T); });
    const double p = problem.p;

    WeakFormGap out;
    out.lhs = (w * traj.snapshots.front() * sf).sum() * spec.time_factor(0.0, T);
    const std::size_t K = traj.times.size();
    for (std::size_t k = 0; k < K; ++k) {
        double tau = 0.0;
        if (k > 0) tau += 0.5 * (traj.times[k] - traj.times[k - 1]);
        if (k + 1 < K) tau += 0.5 * (traj.times[k + 1] - traj.times[k]);
        const double t = traj.times[k];
        const double tf = spec.time_factor(t, T);
        const double tfd = spec.time_factor_dt(t, T);
        if (tf == 0.0 && tfd == 0.0) continue;

        const Eigen::ArrayXd& u = traj.snapshots[k];
        const Eigen::ArrayXd g = cell_gradient(u, grid.h(), traj.boundary_value);
        Eigen::ArrayXd source = traj.forcing;
        if (problem.lambda != 0.0) source += problem.lambda * u.abs().pow(problem.alpha);
        if (problem.mu != 0.0) source += problem.mu * g.abs().pow(problem.beta);
        const Eigen::ArrayXd flux = g.unaryExpr(
            [p](double s) { return s == 0.0 ? 0.0 : std::pow(std::abs(s), p - 2.0) * s; });

        out.lhs += tau * tf * (w * source * sf).sum();
        out.rhs += tau * (w * (tf * flux * sf_dr - tfd * u * sf)).sum();
    }
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

}  // namespace pcrit
