#include "pcrit/solver.hpp"

#include "pcrit/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcrit {

RadialGrid::RadialGrid(double radius, int cells) : radius_(radius), cells_(cells) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("RadialGrid: radius must be positive and finite");
    if (cells < 64) throw std::invalid_argument("RadialGrid: needs at least 64 cells");
    centers_ = Eigen::ArrayXd::LinSpaced(cells, 0.5 * h(), radius - 0.5 * h());
}

Eigen::ArrayXd RadialGrid::shell_measures(int n) const {
    Eigen::ArrayXd out(cells_);
    for (int i = 0; i < cells_; ++i)
        out(i) = (std::pow(face(i + 1), n) - std::pow(face(i), n)) / n;
    return out;
}

double p_flux(double s, double p, double delta) {
    if (p == 2.0) return s;
    return std::pow(s * s + delta * delta, 0.5 * (p - 2.0)) * s;
}

double p_flux_slope_bound(double s, double p, double delta) {
    if (p == 2.0) return 1.0;
    return std::pow(s * s + delta * delta, 0.5 * (p - 2.0)) * std::max(1.0, p - 1.0);
}

Eigen::ArrayXd cell_gradient(const Eigen::ArrayXd& u, double h, double boundary_value) {
    const Eigen::Index N = u.size();
    Eigen::ArrayXd g(N);
    g(0) = (u(1) - u(0)) / (2.0 * h);
    if (N > 2) g.segment(1, N - 2) = (u.tail(N - 2) - u.head(N - 2)) / (2.0 * h);
    const double ghost = 2.0 * boundary_value - u(N - 1);
    g(N - 1) = (ghost - u(N - 2)) / (2.0 * h);
    return g;
}

RadialDiscretization::RadialDiscretization(const ProblemSpec& spec, const RadialGrid& grid,
                                           const SolverConfig& config)
    : spec_(spec), grid_(grid), config_(config) {
    if (const auto barrier = barrier_in_play(spec))
        boundary_value_ = evaluate_barrier(*barrier, grid.R()).v;
    else
        boundary_value_ = evaluate(spec.initial, grid.R());
    forcing_ = evaluate(spec.forcing, grid.centers());
    face_area_.resize(grid.N() + 1);
    for (int i = 0; i <= grid.N(); ++i) face_area_(i) = std::pow(grid.face(i), spec.n - 1);
    shell_ = grid.shell_measures(spec.n);
}

Eigen::ArrayXd RadialDiscretization::initial_state() const {
    return evaluate(spec_.initial, grid_.centers());
}

Eigen::ArrayXd RadialDiscretization::rate(const Eigen::ArrayXd& u) const {
    const int N = grid_.N();
    const double h = grid_.h();
    const double p = spec_.p;
    const double delta = config_.delta;

    // flux through face j (between cells j-1 and j); face 0 is the symmetry axis
    Eigen::ArrayXd flux(N + 1);
    flux(0) = 0.0;
    for (int j = 1; j < N; ++j) flux(j) = p_flux((u(j) - u(j - 1)) / h, p, delta);
    flux(N) = p_flux((boundary_value_ - u(N - 1)) / (0.5 * h), p, delta);
    flux *= face_area_;

    const Eigen::ArrayXd g = cell_gradient(u, h, boundary_value_);
    Eigen::ArrayXd out = (flux.tail(N) - flux.head(N)) / shell_ + forcing_;
    if (spec_.lambda != 0.0) out += spec_.lambda * u.abs().pow(spec_.alpha);
    if (spec_.mu != 0.0) out += spec_.mu * g.abs().pow(spec_.beta);
    return out;
}

double RadialDiscretization::stable_dt(const Eigen::ArrayXd& u) const {
    const int N = grid_.N();
    const double h = grid_.h();
    double d_max = 1.0;
    if (spec_.p != 2.0) {
        d_max = 0.0;
        for (int j = 1; j < N; ++j)
            d_max = std::max(d_max, p_flux_slope_bound((u(j) - u(j - 1)) / h, spec_.p, config_.delta));
        d_max = std::max(d_max, p_flux_slope_bound((boundary_value_ - u(N - 1)) / (0.5 * h),
                                                   spec_.p, config_.delta));
    }
    const double sup_u = u.abs().maxCoeff();
    const double sup_g = cell_gradient(u, h, boundary_value_).abs().maxCoeff();
    double r_lip = 1.0;
    if (spec_.lambda != 0.0)
        r_lip += std::abs(spec_.lambda) * spec_.alpha * std::pow(sup_u, spec_.alpha - 1.0);
    if (spec_.mu != 0.0)
        r_lip += std::abs(spec_.mu) * spec_.beta * std::pow(sup_g, spec_.beta - 1.0);
    return config_.sigma * std::min(h * h / (2.0 * spec_.n * d_max), 1.0 / r_lip);
}

double RadialDiscretization::advance(Eigen::ArrayXd& u, double dt_cap) const {
    const double dt = std::min(stable_dt(u), dt_cap);
    u += dt * rate(u);
    return dt;
}

std::pair<Eigen::ArrayXd, double> advance(const Eigen::ArrayXd& state, const RadialGrid& grid,
                                          const SolverConfig& config, const ProblemSpec& spec) {
    const RadialDiscretization disc(spec, grid, config);
    Eigen::ArrayXd next = state;
    const double dt = disc.advance(next, std::numeric_limits<double>::infinity());
    return {std::move(next), dt};
}

double default_domain_radius(const ProblemSpec& spec) { return 40.0 * length_scale(spec); }

namespace {

void validate_config(const SolverConfig& c) {
    if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0, 1)");
    if (!(c.delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(c.T_max > 0.0) || !std::isfinite(c.T_max))
        throw std::invalid_argument("T_max must be positive and finite");
    if (c.snapshot_count < 2) throw std::invalid_argument("snapshot_count must be >= 2");
    if (c.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

}  // namespace

RunResult run(const ProblemSpec& spec, const RadialGrid& grid, const SolverConfig& config) {
    const ValidationReport report = validate_spec(spec, ValidationMode::Structural);
    if (!report.ok()) throw std::invalid_argument("run: invalid spec: " + report.failures());
    validate_config(config);

    const RadialDiscretization disc(spec, grid, config);
    Eigen::ArrayXd u = disc.initial_state();
    const double sup0 = u.abs().maxCoeff();
    const double u_blow = config.U_blow.value_or(1e6 * std::max(1.0, sup0));
    if (!(u_blow > sup0)) throw std::invalid_argument("U_blow must exceed sup|u0|");
    const double dt_min = config.dt_min.value_or(1e-13 * config.T_max);
    const Eigen::ArrayXd shell = grid.shell_measures(spec.n);
    const double omega = sphere_area(spec.n);

    RunResult result{{}, {}, Trajectory{grid, spec.n, disc.boundary_value(), disc.forcing(), {}, {}}};
    Verdict& verdict = result.verdict;
    TrajectoryStats& stats = result.stats;
    Trajectory& traj = result.trajectory;

    double t = 0.0;
    double sup_max = sup0;
    double dt_sum = 0.0;
    stats.dt_min = std::numeric_limits<double>::infinity();
    stats.dt_max = 0.0;
    stats.min_value = u.minCoeff();

    auto record = [&](double time, bool snapshot) {
        const double sup = u.abs().maxCoeff();
        stats.sup_norm.t.push_back(time);
        stats.sup_norm.value.push_back(sup);
        stats.l1_norm.t.push_back(time);
        stats.l1_norm.value.push_back(omega * (u.abs() * shell).sum());
        if (snapshot) {
            traj.times.push_back(time);
            traj.snapshots.push_back(u);
            stats.min_value = std::min(stats.min_value, u.minCoeff());
        }
    };
    auto finish = [&](Outcome outcome) {
        verdict.outcome = outcome;
        verdict.sup_max = sup_max;
        verdict.final_time = t;
        verdict.step_count = stats.step_count;
        stats.dt_mean = stats.step_count > 0 ? dt_sum / stats.step_count : 0.0;
        if (stats.step_count == 0) stats.dt_min = 0.0;
    };
    auto blow_up = [&](const char* trigger) {
        verdict.t_blow = t;
        verdict.trigger = trigger;
        record(t, false);
        finish(Outcome::BlowUp);
        return result;
    };

    record(0.0, true);
    const int K = config.snapshot_count;
    for (int k = 1; k < K; ++k) {
        const double target = (k == K - 1) ? config.T_max : config.T_max * k / (K - 1);
        while (t < target) {
            if (stats.step_count >= config.max_steps) {
                verdict.reason = "step budget exhausted";
                finish(Outcome::Inconclusive);
                return result;
            }
            const double planned = disc.stable_dt(u);
            const double remaining = target - t;
            if (!std::isfinite(planned)) return blow_up("nonfinite");
            if (planned < dt_min && planned < remaining) return blow_up("dt_collapse");
            const double dt = std::min(planned, remaining);
            u += dt * disc.rate(u);
            t = (dt == remaining) ? target : t + dt;
            ++stats.step_count;
            dt_sum += dt;
            stats.dt_min = std::min(stats.dt_min, dt);
            stats.dt_max = std::max(stats.dt_max, dt);

            if (!u.allFinite()) return blow_up("nonfinite");
            const double sup = u.abs().maxCoeff();
            sup_max = std::max(sup_max, sup);
            if (sup >= u_blow) return blow_up("threshold");
        }
        record(target, true);
    }

    // Domain-truncation guard: the cell next to the pinned boundary must sit
    // at the boundary value at the horizon.
    const double scale = std::max({sup_max, std::abs(disc.boundary_value()),
                                   std::numeric_limits<double>::min()});
    stats.truncation_indicator = std::abs(u(grid.N() - 1) - disc.boundary_value()) / scale;
    if (stats.truncation_indicator > config.truncation_tol) {
        verdict.reason = "under-resolved: near-boundary value differs from the pinned value by " +
                         std::to_string(stats.truncation_indicator) + " relative";
        finish(Outcome::Inconclusive);
        return result;
    }
    finish(Outcome::GlobalBounded);
    return result;
}

double compare_to_supersolution(const Trajectory& trajectory, const SupersolutionParams& params) {
    const Eigen::ArrayXd v = evaluate_barrier(params, trajectory.grid.centers()).v;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& snap : trajectory.snapshots) worst = std::max(worst, (snap - v).maxCoeff());
    return worst;
}

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::BlowUp: return "BlowUp";
        case Outcome::GlobalBounded: return "GlobalBounded";
        case Outcome::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

Outcome outcome_from_string(const std::string& text) {
    if (text == "BlowUp") return Outcome::BlowUp;
    if (text == "GlobalBounded") return Outcome::GlobalBounded;
    if (text == "Inconclusive") return Outcome::Inconclusive;
    throw std::invalid_argument("unknown outcome '" + text + "'");
}

}  // namespace pcrit
