#ifndef PCRIT_MODEL_HPP
#define PCRIT_MODEL_HPP

// Problem instance for the radial p-Laplace heat equation
//
//   u_t - div(|grad u|^{p-2} grad u) = lambda |u|^alpha + mu |grad u|^beta + f(|x|)
//
// posed on R^n with radially symmetric forcing and initial data.

#include <Eigen/Core>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pcrit {

/// Parameters of the explicit stationary barrier v = eps (1 + |x|^{p/(p-1)})^{-m}.
struct SupersolutionParams {
    int n = 3;
    double p = 2.0;
    double alpha = 4.0;
    double beta = 3.0;
    double lambda = 1.0;
    double mu = 1.0;
    double m = 0.4;
    double epsilon = 0.1;
    std::optional<double> r;  // decay target (second critical exponent mode)
};

/// Radial samples (radius, value), radii strictly increasing. Linear
/// interpolation inside, constant extension outside.
struct RadialTable {
    std::vector<double> radii;
    std::vector<double> values;

    double operator()(double radius) const;
};

struct ZeroForcing {};
struct ResidualForcing {
    SupersolutionParams params;
};
/// f = C * max(R0, |x|)^{-r}; continuous, and f >= C |x|^{-r} for |x| >= R0.
struct PowerTailForcing {
    double amplitude = 1.0;
    double r = 2.0;
    double plateau_radius = 1.0;
};
/// f = amplitude * exp(-(|x| / width)^2).
struct GaussianForcing {
    double amplitude = 1.0;
    double width = 1.0;
};

enum class SignClass { StrictlyPositive, PositiveIntegral, Unsigned };

struct ForcingSpec {
    std::variant<ZeroForcing, ResidualForcing, PowerTailForcing, GaussianForcing, RadialTable> kind;
    SignClass sign_info = SignClass::Unsigned;
};

struct ConstantInitial {
    double value = 0.0;
};
/// u0 = amplitude * exp(-(|x| / width)^2).
struct GaussianInitial {
    double amplitude = 1.0;
    double width = 1.0;
};
/// u0 = fraction * v for the barrier v built from params.
struct BarrierFractionInitial {
    double fraction = 0.5;
    SupersolutionParams params;
};

struct InitialDataSpec {
    std::variant<ConstantInitial, GaussianInitial, BarrierFractionInitial, RadialTable> kind;
};

struct ProblemSpec {
    int n = 3;
    double p = 2.0;
    double lambda = 1.0;
    double mu = 1.0;
    double alpha = 4.0;
    double beta = 3.0;
    ForcingSpec forcing;
    InitialDataSpec initial;
};

struct ValidationRule {
    std::string name;
    bool passed = true;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationRule> rules;

    bool ok() const;
    /// Messages of every failed rule, joined by "; ".
    std::string failures() const;
};

enum class ValidationMode {
    Structural,     // operator condition and finite data only
    TheoremBacked,  // additionally alpha, beta > max{1, p-1}
};

ValidationReport validate_spec(const ProblemSpec& spec,
                               ValidationMode mode = ValidationMode::TheoremBacked);

/// Surface area of the unit (n-1)-sphere in R^n.
double sphere_area(int n);

/// Lower bound 2n/(n+1) on p for the operator to be admissible.
inline double p_lower_bound(int n) { return 2.0 * n / (n + 1.0); }

double evaluate(const ForcingSpec& forcing, double radius);
double evaluate(const InitialDataSpec& initial, double radius);
Eigen::ArrayXd evaluate(const ForcingSpec& forcing, const Eigen::ArrayXd& radii);
Eigen::ArrayXd evaluate(const InitialDataSpec& initial, const Eigen::ArrayXd& radii);

/// Barrier parameters when the forcing or the initial datum is built from one.
std::optional<SupersolutionParams> barrier_in_play(const ProblemSpec& spec);

/// Characteristic length of the forcing and initial data (at least 1).
double length_scale(const ProblemSpec& spec);

std::string to_string(SignClass sign);
SignClass sign_class_from_string(const std::string& text);

}  // namespace pcrit

#endif  // PCRIT_MODEL_HPP
