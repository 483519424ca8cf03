#include "pcrit/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pcrit {

std::optional<Interval> admissible_m_range(int n, double p, double alpha, double beta,
                                           std::optional<double> r) {
    const double da = alpha - p + 1.0;
    const double db = beta - p + 1.0;
    if (!(da > 0.0) || !(db > 0.0)) return std::nullopt;
    double lo = std::max((p - 1.0) / da, (p - 1.0) * (p - beta) / (p * db));
    if (r) lo = std::max(lo, (*r - p) / p);
    const double hi = (n - p) / p;
    if (!(lo < hi)) return std::nullopt;
    return Interval{lo, hi};
}

BarrierProfile evaluate_barrier(const SupersolutionParams& params, const Eigen::ArrayXd& radii) {
    BarrierProfile out;
    const Eigen::Index count = radii.size();
    out.radius = radii;
    out.v.resize(count);
    out.grad_norm.resize(count);
    out.p_laplacian.resize(count);
    out.residual.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto e = evaluate_barrier(params, radii(i));
        out.v(i) = e.v;
        out.grad_norm(i) = e.grad_norm;
        out.p_laplacian(i) = e.p_laplacian;
        out.residual(i) = e.residual;
    }
    return out;
}

double m_epsilon(const SupersolutionParams& s) {
    const double p = s.p;
    const double mq = s.m * p / (p - 1.0);
    return (s.n - p - s.m * p) -
           s.lambda * std::pow(s.epsilon, s.alpha - p + 1.0) * std::pow(1.0 / mq, p - 1.0) -
           s.mu * std::pow(s.epsilon * mq, s.beta - p + 1.0);
}

double residual_lower_bound(const SupersolutionParams& s, double radius) {
    const double p = s.p;
    const double q = p / (p - 1.0);
    const double amp = std::pow(s.epsilon * s.m * q, p - 1.0);
    return amp * m_epsilon(s) * std::pow(1.0 + std::pow(radius, q), -(s.m + 1.0) * (p - 1.0));
}

double epsilon_star(int n, double p, double alpha, double beta, double m, double lambda,
                    double mu) {
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("epsilon_star: lambda and mu must be positive");
    if (!(m > 0.0) || !(n - p - m * p > 0.0))
        throw std::invalid_argument("epsilon_star: needs 0 < m < (n-p)/p");
    SupersolutionParams s{n, p, alpha, beta, lambda, mu, m, 1.0, std::nullopt};
    auto slack = [&](double eps) {
        s.epsilon = eps;
        return m_epsilon(s);
    };
    double hi = 1.0;
    while (slack(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("epsilon_star: no sign change found");
    }
    double lo = 0.0;
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (slack(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double epsilon_star(const SupersolutionParams& s) {
    return epsilon_star(s.n, s.p, s.alpha, s.beta, s.m, s.lambda, s.mu);
}

Eigen::ArrayXd log_grid_with_origin(double rmin, double rmax, int count) {
    if (count < 2 || !(rmin > 0.0) || !(rmax > rmin))
        throw std::invalid_argument("log_grid_with_origin: needs count >= 2 and 0 < rmin < rmax");
    Eigen::ArrayXd grid(count);
    grid(0) = 0.0;
    grid.tail(count - 1) =
        Eigen::ArrayXd::LinSpaced(count - 1, std::log(rmin), std::log(rmax)).exp();
    return grid;
}

bool Certificate::passed() const {
    return residual_dominates_bound && bound_nonnegative && (!decay || decay->holds);
}

Certificate certify(const SupersolutionParams& params, const Eigen::ArrayXd& grid, double safety) {
    const auto window = admissible_m_range(params.n, params.p, params.alpha, params.beta, params.r);
    const double eps_star = window && window->contains(params.m) ? epsilon_star(params) : 0.0;
    if (!window || !window->contains(params.m)) {
        std::ostringstream os;
        os << "m = " << params.m << " is outside the admissible window";
        if (window) os << " (" << window->lo << ", " << window->hi << ")";
        throw CertificationRefused(os.str(), eps_star);
    }
    if (!(params.epsilon > 0.0) || params.epsilon > safety * eps_star) {
        std::ostringstream os;
        os.precision(10);
        os << "epsilon = " << params.epsilon << " exceeds " << safety << " * eps* = "
           << safety * eps_star << " (eps* = " << eps_star << ")";
        throw CertificationRefused(os.str(), eps_star);
    }

    Certificate cert;
    cert.params = params;
    cert.epsilon_star = eps_star;
    cert.safety = safety;
    cert.m_eps = m_epsilon(params);
    cert.points = static_cast<int>(grid.size());

    const BarrierProfile profile = evaluate_barrier(params, grid);
    const Eigen::ArrayXd bound =
        grid.unaryExpr([&](double rad) { return residual_lower_bound(params, rad); });
    cert.min_residual = profile.residual.minCoeff();
    cert.min_lower_bound = bound.minCoeff();
    cert.max_bound_violation = (bound - profile.residual).maxCoeff();
    cert.residual_dominates_bound = (profile.residual >= bound).all();
    cert.bound_nonnegative = (bound >= 0.0).all() && cert.m_eps > 0.0;

    if (params.r) {
        DecayCertificate decay;
        decay.r = *params.r;
        decay.exponent_ok = (params.m + 1.0) * params.p >= decay.r;
        double scaled_max = 0.0;
        bool any = false;
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            if (grid(i) < 1.0) continue;
            scaled_max = std::max(scaled_max, profile.residual(i) * std::pow(grid(i), decay.r));
            any = true;
        }
        decay.max_scaled = scaled_max;
        decay.constant = 1.05 * scaled_max;
        bool bounded = any && std::isfinite(decay.constant);
        for (Eigen::Index i = 0; i < grid.size() && bounded; ++i) {
            if (grid(i) >= 1.0)
                bounded = profile.residual(i) <= decay.constant * std::pow(grid(i), -decay.r);
        }
        decay.holds = bounded && decay.exponent_ok;
        cert.decay = decay;
    }

    std::ostringstream os;
    os << "v is a stationary supersolution: -Delta_p v - lambda v^alpha - mu |grad v|^beta = f "
          "with f >= "
       << cert.min_lower_bound
       << " on the grid, so v solves the stationary equation exactly with forcing f and "
          "solutions started below v with this forcing stay below v";
    cert.comparison = os.str();
    return cert;
}

}  // namespace pcrit
