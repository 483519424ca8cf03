#ifndef PCRIT_TESTFN_HPP
#define PCRIT_TESTFN_HPP

// Rescaled cutoff test functions
//
//   phi(t, x) = Psi^{a}(t/T) Phi^{b}(s(|x|, T)),  a = alpha/(alpha-1), b = beta/(beta-p+1)
//
// with s = |x|/T^kappa (power variant) or s = ln(|x|/T^theta)/ln(T^theta)
// (logarithmic variant), and the integrals the nonexistence argument bounds.

#include "pcrit/model.hpp"
#include "pcrit/quadrature.hpp"
#include "pcrit/solver.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace pcrit {

/// 1 on (-inf, plateau_end], quintic smoothstep ramp down to 0 at
/// support_end, 0 beyond. C^2 at both junctions.
struct CutoffProfile {
    double plateau_end = 0.5;
    double support_end = 1.0;

    double value(double s) const;
    double derivative(double s) const;
    /// max |derivative| = 15 / (8 (support_end - plateau_end)).
    double max_slope() const;
};

struct PowerScaling {
    double kappa;
};
struct LogScaling {
    double theta;
};

struct TestFunctionSpec {
    std::variant<PowerScaling, LogScaling> variant;
    double alpha = 4.0;
    double beta = 3.0;
    double p = 2.0;
    CutoffProfile psi;
    CutoffProfile phi;

    double time_exponent() const;   // alpha/(alpha-1)
    double space_exponent() const;  // beta/(beta-p+1)
    bool is_log() const { return std::holds_alternative<LogScaling>(variant); }

    /// Spatial plateau and support radii at scale T.
    double plateau_radius(double T) const;
    double support_radius(double T) const;

    /// Spatial similarity variable s(|x|, T) and ds/d|x|.
    double similarity(double radius, double T) const;
    double similarity_slope(double radius, double T) const;

    double space_factor(double radius, double T) const;       // Phi^b(s)
    double space_factor_dr(double radius, double T) const;
    double time_factor(double t, double T) const;             // Psi^a(t/T)
    double time_factor_dt(double t, double T) const;
};

/// kappa = alpha(beta-p+1)/(beta(alpha-1)), the balancing choice.
double balancing_kappa(double alpha, double beta, double p);

/// Power variant with Psi, Phi ramping on [1/2, 1] and the balancing kappa
/// unless one is given.
TestFunctionSpec power_test_function(double alpha, double beta, double p,
                                     std::optional<double> kappa = std::nullopt);

/// Power variant whose spatial cutoff is 1 on [0, 1) and 0 from 2 on.
TestFunctionSpec wide_power_test_function(double alpha, double beta, double p,
                                          std::optional<double> kappa = std::nullopt);

/// Upper limit alpha/(2n(alpha-1)) on theta for the logarithmic variant.
double log_theta_limit(double alpha, int n);

/// Logarithmic variant (Phi ramps on [0, 1] in the log variable). Default
/// theta is half the limit. Throws when theta is not below the limit.
TestFunctionSpec log_test_function(double alpha, double beta, double p, int n,
                                   std::optional<double> theta = std::nullopt);

struct QuantityEstimate {
    double value = 0.0;
    bool converged = false;
    double rel_change = 0.0;
};

struct RescaledIntegrals {
    double T = 0.0;
    QuantityEstimate I1;   // iint |phi_t|^{a} phi^{-1/(alpha-1)}
    QuantityEstimate I2;   // iint |grad phi|^{b} phi^{-(p-1)/(beta-p+1)}
    QuantityEstimate F;    // int f Phi^{b}(s) dx
    QuantityEstimate U0;   // int u0 phi(0, x) dx
    QuantityEstimate plateau_mass;  // int of f over the spatial plateau ball

    bool converged() const;
};

/// Quadrature of the four integrals at scale T (T >= 10). Throws
/// std::invalid_argument when T < 10.
RescaledIntegrals rescaled_integrals(const TestFunctionSpec& spec, int n, double T,
                                     const ForcingSpec& forcing,
                                     const InitialDataSpec& initial = {ConstantInitial{0.0}},
                                     const QuadratureOptions& options = {});

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max |log value - fit|
};

/// Least-squares fit of log(value) against log(x). Needs >= 4 samples with
/// x > 0 strictly increasing and value > 0; throws otherwise.
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& samples);

struct ForcingMassBound {
    double mass = 0.0;
    double bound = 0.0;
    double bound_constant = 0.0;  // C' with bound = C' T^{(n-r) kappa}
    bool holds = false;
};

/// Forcing mass against the wide cutoff, and the exact annulus integral of
/// C|x|^{-r} over T^kappa/2 < |x| < T^kappa. Requires 0 < r < n.
ForcingMassBound forcing_mass_lower_bound(const PowerTailForcing& forcing, double T, double kappa,
                                          int n, double space_exponent = 1.0);

struct WeakFormGap {
    double lhs = 0.0;  // iint [lambda|u|^alpha + mu|u_r|^beta + f] phi + int u0 phi(0)
    double rhs = 0.0;  // iint (Phi_p(u_r) phi_r - u phi_t)
    double gap = 0.0;  // |lhs - rhs|
};

/// Residual of the weak identity for a stored trajectory, with the test
/// function scaled to the trajectory horizon. Throws when the test function
/// support exceeds the computational domain or fewer than two snapshots exist.
WeakFormGap weak_form_gap(const Trajectory& trajectory, const TestFunctionSpec& spec,
                          const ProblemSpec& problem);

}  // namespace pcrit

#endif  // PCRIT_TESTFN_HPP
