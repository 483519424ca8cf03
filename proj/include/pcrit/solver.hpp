#ifndef PCRIT_SOLVER_HPP
#define PCRIT_SOLVER_HPP

// Radial finite-volume solver for
//
//   u_t = r^{1-n} (r^{n-1} Phi_p(u_r))_r + lambda |u|^alpha + mu |u_r|^beta + f(r)
//
// with explicit Euler stepping, a zero-flux face at the origin and a pinned
// Dirichlet value at r = R.

#include "pcrit/model.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcrit {

class RadialGrid {
public:
    RadialGrid(double radius, int cells);

    double R() const { return radius_; }
    int N() const { return cells_; }
    double h() const { return radius_ / cells_; }
    double center(int i) const { return (i + 0.5) * h(); }
    double face(int i) const { return i * h(); }

    const Eigen::ArrayXd& centers() const { return centers_; }
    /// |shell_i| / omega_n = (r_{i+1/2}^n - r_{i-1/2}^n) / n
    Eigen::ArrayXd shell_measures(int n) const;

private:
    double radius_;
    int cells_;
    Eigen::ArrayXd centers_;
};

struct SolverConfig {
    double delta = 1e-8;
    double sigma = 0.4;
    double T_max = 10.0;
    std::optional<double> U_blow;   // default 1e6 max(1, sup|u0|)
    std::optional<double> dt_min;   // default 1e-13 T_max
    int snapshot_count = 11;
    long long max_steps = 200'000'000;
    double truncation_tol = 1e-3;
};

/// Regularized flux (s^2 + delta^2)^{(p-2)/2} s.
double p_flux(double s, double p, double delta);

/// Bound on dPhi_p/ds used by the time-step rule.
double p_flux_slope_bound(double s, double p, double delta);

/// Gradient at cell centers: centered differences, even reflection at the
/// origin and a ghost value 2 u_b - u_{N-1} at the outer face.
Eigen::ArrayXd cell_gradient(const Eigen::ArrayXd& u, double h, double boundary_value);

/// Semi-discrete operator for one problem on one grid.
class RadialDiscretization {
public:
    RadialDiscretization(const ProblemSpec& spec, const RadialGrid& grid, const SolverConfig& config);

    const RadialGrid& grid() const { return grid_; }
    const ProblemSpec& spec() const { return spec_; }
    double boundary_value() const { return boundary_value_; }
    const Eigen::ArrayXd& forcing() const { return forcing_; }
    Eigen::ArrayXd initial_state() const;

    /// du/dt at every cell.
    Eigen::ArrayXd rate(const Eigen::ArrayXd& u) const;
    /// Adaptive explicit step bound sigma min(h^2/(2n D_max), 1/R_lip).
    double stable_dt(const Eigen::ArrayXd& u) const;

    /// One explicit Euler step no longer than dt_cap; returns the step used.
    double advance(Eigen::ArrayXd& u, double dt_cap) const;

private:
    ProblemSpec spec_;
    RadialGrid grid_;
    SolverConfig config_;
    double boundary_value_;
    Eigen::ArrayXd forcing_;
    Eigen::ArrayXd face_area_;  // r_{i-1/2}^{n-1}, i = 0..N
    Eigen::ArrayXd shell_;      // shell measures / omega_n
};

/// Free-function form: one step from state with the problem's own dt rule.
std::pair<Eigen::ArrayXd, double> advance(const Eigen::ArrayXd& state, const RadialGrid& grid,
                                          const SolverConfig& config, const ProblemSpec& spec);

enum class Outcome { BlowUp, GlobalBounded, Inconclusive };

struct Verdict {
    Outcome outcome = Outcome::Inconclusive;
    double t_blow = 0.0;        // BlowUp only
    std::string trigger;        // BlowUp: "threshold", "dt_collapse", "nonfinite"
    std::string reason;         // Inconclusive only
    double sup_max = 0.0;
    double final_time = 0.0;
    long long step_count = 0;
};

struct TimeSeries {
    std::vector<double> t;
    std::vector<double> value;
};

struct TrajectoryStats {
    TimeSeries sup_norm;
    TimeSeries l1_norm;
    long long step_count = 0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    double dt_mean = 0.0;
    double min_value = 0.0;     // min of u over all recorded snapshots
    double truncation_indicator = 0.0;
};

struct Trajectory {
    RadialGrid grid;
    int n = 3;
    double boundary_value = 0.0;
    Eigen::ArrayXd forcing;         // forcing samples at cell centers
    std::vector<double> times;
    std::vector<Eigen::ArrayXd> snapshots;
};

struct RunResult {
    Verdict verdict;
    TrajectoryStats stats;
    Trajectory trajectory;
};

/// Steps to T_max, a blow-up trigger, or the step budget. Throws
/// std::invalid_argument on an invalid spec or config.
RunResult run(const ProblemSpec& spec, const RadialGrid& grid, const SolverConfig& config);

/// Default outer radius: 40 times the data length scale.
double default_domain_radius(const ProblemSpec& spec);

/// max over snapshots and cells of u_i - v(r_i).
double compare_to_supersolution(const Trajectory& trajectory, const SupersolutionParams& params);

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& text);

}  // namespace pcrit

#endif  // PCRIT_SOLVER_HPP
