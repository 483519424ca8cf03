#ifndef PCRIT_SUPERSOLUTION_HPP
#define PCRIT_SUPERSOLUTION_HPP

// Explicit stationary barrier v(x) = eps (1 + |x|^q)^{-m}, q = p/(p-1), with
// closed-form gradient, p-Laplacian and residual forcing
//
//   f = -Delta_p v - lambda v^alpha - mu |grad v|^beta.

#include "pcrit/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace pcrit {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo < x && x < hi; }
};

/// Open window of admissible decay exponents m; nullopt when empty.
std::optional<Interval> admissible_m_range(int n, double p, double alpha, double beta,
                                           std::optional<double> r = std::nullopt);

template <typename Scalar>
struct BarrierEvaluation {
    Scalar v;
    Scalar grad_norm;
    Scalar p_laplacian;  // signed Delta_p v
    Scalar residual;
};

/// Closed forms at one radius. Scalar may be any floating type.
template <typename Scalar>
BarrierEvaluation<Scalar> evaluate_barrier(const SupersolutionParams& params, Scalar radius) {
    using std::pow;
    if (radius < Scalar(0)) throw std::invalid_argument("evaluate_barrier: radius < 0");
    const Scalar p = params.p;
    const Scalar n = params.n;
    const Scalar m = params.m;
    const Scalar eps = params.epsilon;
    const Scalar q = p / (p - 1);
    const Scalar rho = pow(radius, q);
    const Scalar base = 1 + rho;
    const Scalar amp = pow(eps * m * q, p - 1);  // (eps m p/(p-1))^{p-1}
    const Scalar k = (m + 1) * (p - 1);

    BarrierEvaluation<Scalar> out;
    out.v = eps * pow(base, -m);
    out.grad_norm = m * eps * q * pow(radius, 1 / (p - 1)) * pow(base, -m - 1);
    // -Delta_p v = amp base^{-k-1} [n + (n - (m+1) p) rho], grouped to avoid cancellation
    const Scalar minus_plap = amp * pow(base, -k - 1) * (n + (n - (m + 1) * p) * rho);
    out.p_laplacian = -minus_plap;
    out.residual = minus_plap - Scalar(params.lambda) * pow(out.v, Scalar(params.alpha)) -
                   Scalar(params.mu) * pow(out.grad_norm, Scalar(params.beta));
    return out;
}

/// Column-wise profile over a radius array.
struct BarrierProfile {
    Eigen::ArrayXd radius;
    Eigen::ArrayXd v;
    Eigen::ArrayXd grad_norm;
    Eigen::ArrayXd p_laplacian;
    Eigen::ArrayXd residual;
};

BarrierProfile evaluate_barrier(const SupersolutionParams& params, const Eigen::ArrayXd& radii);

/// Slack M_eps; positivity makes the residual strictly positive everywhere.
double m_epsilon(const SupersolutionParams& params);

/// Analytic lower bound amp * M_eps * (1 + |x|^q)^{-(m+1)(p-1)} on the residual.
double residual_lower_bound(const SupersolutionParams& params, double radius);

/// Root of eps -> M_eps by bracket doubling and bisection (relative tol 1e-10).
double epsilon_star(int n, double p, double alpha, double beta, double m, double lambda,
                    double mu);

double epsilon_star(const SupersolutionParams& params);

/// Radius 0 followed by count-1 log-spaced radii on [rmin, rmax].
Eigen::ArrayXd log_grid_with_origin(double rmin, double rmax, int count);

struct DecayCertificate {
    double r = 0.0;
    double constant = 0.0;       // C with f(radius) <= C radius^{-r}, radius >= 1
    double max_scaled = 0.0;     // max of f radius^r over the grid tail
    bool exponent_ok = false;    // (m+1) p >= r
    bool holds = false;
};

struct Certificate {
    SupersolutionParams params;
    double epsilon_star = 0.0;
    double safety = 0.9;
    double m_eps = 0.0;
    int points = 0;
    double min_residual = 0.0;
    double min_lower_bound = 0.0;
    double max_bound_violation = 0.0;  // max(bound - residual), should be <= 0
    bool residual_dominates_bound = false;
    bool bound_nonnegative = false;
    std::optional<DecayCertificate> decay;
    std::string comparison;

    bool passed() const;
};

class CertificationRefused : public std::runtime_error {
public:
    CertificationRefused(const std::string& what, double eps_star)
        : std::runtime_error(what), epsilon_star_(eps_star) {}
    double epsilon_star() const { return epsilon_star_; }

private:
    double epsilon_star_;
};

/// Certifies residual positivity on grid (and, with params.r set, membership
/// of the residual in the decaying class). Throws CertificationRefused when
/// epsilon exceeds safety * eps* or m is outside the admissible window.
Certificate certify(const SupersolutionParams& params, const Eigen::ArrayXd& grid,
                    double safety = 0.9);

}  // namespace pcrit

#endif  // PCRIT_SUPERSOLUTION_HPP
