#include "pcrit/solver.hpp"
#include "pcrit/testfn.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pcrit;

namespace {

const double kPi = std::numbers::pi;

ForcingSpec gaussian_forcing() { return ForcingSpec{GaussianForcing{1.0, 1.0}, SignClass::StrictlyPositive}; }

// 4 pi int_0^a r^2 e^{-r^2} dr
double gaussian_ball_mass(double a) {
    return 4.0 * kPi * (std::sqrt(kPi) / 4.0 * std::erf(a) - 0.5 * a * std::exp(-a * a));
}

// exact heat-kernel solution in n = 3 sampled on a grid
Trajectory heat_kernel_trajectory(int cells, int intervals, double T, double R) {
    const RadialGrid grid(R, cells);
    Trajectory traj{grid, 3, 0.0, Eigen::ArrayXd::Zero(cells), {}, {}};
    auto u = [](double t, double r) { return std::pow(1 + 4 * t, -1.5) * std::exp(-r * r / (1 + 4 * t)); };
    traj.boundary_value = u(T, R);
    for (int k = 0; k <= intervals; ++k) {
        const double t = T * k / intervals;
        traj.times.push_back(t);
        traj.snapshots.push_back(grid.centers().unaryExpr([&](double r) { return u(t, r); }));
    }
    return traj;
}

}  // namespace

TEST_CASE("cutoff profile shape") {
    const CutoffProfile c{0.5, 1.0};
    CHECK(c.value(0.0) == 1.0);
    CHECK(c.value(0.5) == 1.0);
    CHECK(c.value(1.0) == 0.0);
    CHECK(c.value(3.0) == 0.0);
    CHECK(c.value(-4.0) == 1.0);
    CHECK(c.value(0.75) == doctest::Approx(0.5));
    CHECK(c.max_slope() == doctest::Approx(15.0 / 4.0));

    for (const CutoffProfile& prof : {CutoffProfile{0.5, 1.0}, CutoffProfile{1.0, 2.0}, CutoffProfile{0.0, 1.0}}) {
        double prev = 2.0;
        double steepest = 0.0;
        for (int k = 0; k <= 10000; ++k) {
            const double s = -0.5 + 3.0 * k / 10000.0;
            const double v = prof.value(s);
            CHECK(v <= prev);
            prev = v;
            steepest = std::max(steepest, std::abs(prof.derivative(s)));
        }
        CHECK(steepest <= prof.max_slope() * (1 + 1e-12));
        // C^1 across both junctions
        const double h = 1e-6;
        for (double j : {prof.plateau_end, prof.support_end}) {
            const double left = (prof.value(j) - prof.value(j - h)) / h;
            const double right = (prof.value(j + h) - prof.value(j)) / h;
            CHECK(std::abs(right - left) < 1e-8);
            CHECK(std::abs(prof.derivative(j + h) - prof.derivative(j - h)) < 1e-8);
        }
        // derivative agrees with differences of the value inside the ramp
        const double mid = 0.5 * (prof.plateau_end + prof.support_end);
        CHECK(prof.derivative(mid) == doctest::Approx((prof.value(mid + h) - prof.value(mid - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("balancing kappa identity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double p = 1.6 + 2 * u(rng);
        const double alpha = std::max(1.0, p - 1) + 0.05 + 5 * u(rng);
        const double beta = std::max(1.0, p - 1) + 0.05 + 5 * u(rng);
        const double kappa = balancing_kappa(alpha, beta, p);
        CHECK(std::abs(kappa * beta / (beta - p + 1) - alpha / (alpha - 1)) <= 1e-12 * alpha / (alpha - 1));
    }
    CHECK(balancing_kappa(4.0, 3.0, 2.0) == doctest::Approx(8.0 / 9.0));
    CHECK(std::get<PowerScaling>(power_test_function(4.0, 3.0, 2.0).variant).kappa == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("critical beta exponent identities") {
    for (int n = 2; n <= 10; ++n)
        for (double p : {1.8, 2.0, 2.5, 3.0}) {
            const double beta = (p - 1) * n / (n - 1);
            CHECK(beta / (beta - p + 1) == doctest::Approx(double(n)).epsilon(1e-12));
            CHECK((p - 1) / (beta - p + 1) == doctest::Approx(double(n - 1)).epsilon(1e-12));
        }
}

TEST_CASE("log variant") {
    CHECK(log_theta_limit(4.0, 3) == doctest::Approx(4.0 / 18.0));
    const auto tf = log_test_function(4.0, 1.5, 2.0, 3);
    CHECK(std::get<LogScaling>(tf.variant).theta == doctest::Approx(1.0 / 9.0));
    CHECK_THROWS(log_test_function(4.0, 1.5, 2.0, 3, 0.3));
    CHECK_THROWS(log_test_function(4.0, 1.5, 2.0, 3, 0.0));

    // |grad Phi(s)| <= C / (|x| ln T) with C = max slope / theta
    for (double T : {1e3, 1e5, 1e7}) {
        const double theta = std::get<LogScaling>(tf.variant).theta;
        const double C = tf.phi.max_slope() / theta;
        const double lo = tf.plateau_radius(T), hi = tf.support_radius(T);
        for (int k = 0; k <= 500; ++k) {
            const double r = lo * std::pow(hi / lo, k / 500.0);
            const double grad = std::abs(tf.phi.derivative(tf.similarity(r, T)) * tf.similarity_slope(r, T));
            CHECK(grad <= C / (r * std::log(T)) * (1 + 1e-12));
        }
    }
}

TEST_CASE("rescaled integrals") {
    const auto tf = power_test_function(4.0, 3.0, 2.0);
    CHECK_THROWS(rescaled_integrals(tf, 3, 5.0, gaussian_forcing()));

    const InitialDataSpec u0{GaussianInitial{1.0, 1.0}};
    const auto res = rescaled_integrals(tf, 3, 1e3, gaussian_forcing(), u0);
    CHECK(res.converged());
    CHECK(res.F.value == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-6));
    CHECK(res.U0.value == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-6));
    CHECK(res.plateau_mass.value == doctest::Approx(gaussian_ball_mass(0.5)).epsilon(1e-6));

    // resolution doubling leaves the values unchanged
    QuadratureOptions fine;
    fine.base_intervals = 32;
    const auto res2 = rescaled_integrals(tf, 3, 1e3, gaussian_forcing(), u0, fine);
    CHECK(res2.I1.value == doctest::Approx(res.I1.value).epsilon(1e-6));
    CHECK(res2.I2.value == doctest::Approx(res.I2.value).epsilon(1e-6));

    std::vector<std::pair<double, double>> s1, s2;
    for (double T : {1e2, 1e3, 1e4, 1e5}) {
        const auto r = rescaled_integrals(tf, 3, T, gaussian_forcing());
        s1.emplace_back(T, r.I1.value);
        s2.emplace_back(T, r.I2.value);
    }
    CHECK(scaling_fit(s1).slope == doctest::Approx(7.0 / 3.0).epsilon(1e-6));
    CHECK(scaling_fit(s2).slope == doctest::Approx(7.0 / 3.0).epsilon(1e-6));

    // an unbalanced kappa separates the two rates
    const auto off = power_test_function(4.0, 3.0, 2.0, 0.5);
    s1.clear();
    s2.clear();
    for (double T : {1e2, 1e3, 1e4, 1e5}) {
        const auto r = rescaled_integrals(off, 3, T, gaussian_forcing());
        s1.emplace_back(T, r.I1.value);
        s2.emplace_back(T, r.I2.value);
    }
    CHECK(scaling_fit(s1).slope == doctest::Approx(0.5 * 3 + 1 - 4.0 / 3.0).epsilon(1e-6));
    CHECK(scaling_fit(s2).slope == doctest::Approx(0.5 * 3 + 1 - 0.5 * 1.5).epsilon(1e-6));
}

TEST_CASE("scaling_fit") {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k < 6; ++k) {
        const double T = std::pow(10.0, 1 + k);
        s.emplace_back(T, 5 * std::pow(T, 2.5));
    }
    auto fit = scaling_fit(s);
    CHECK(std::abs(fit.slope - 2.5) <= 1e-9);
    CHECK(fit.intercept == doctest::Approx(std::log(5.0)));
    CHECK(fit.residual < 1e-9);

    s.clear();
    for (int k = 0; k <= 8; ++k) {
        const double T = std::pow(10.0, 4 + 0.5 * k);
        s.emplace_back(T, (1 + 1 / std::log(T)) / T);
    }
    CHECK(std::abs(scaling_fit(s).slope + 1) < 0.01);

    s = {{1, 3}, {10, 3}, {100, 3}, {1000, 3}};
    CHECK(std::abs(scaling_fit(s).slope) < 1e-12);
    CHECK_THROWS(scaling_fit({{1, 3}, {10, 3}, {100, 3}}));
    CHECK_THROWS(scaling_fit({{1, 3}, {10, -3}, {100, 3}, {1000, 3}}));
    CHECK_THROWS(scaling_fit({{1, 3}, {10, 3}, {10, 3}, {1000, 3}}));
}

TEST_CASE("forcing-mass lower bound") {
    const PowerTailForcing tail{1.0, 2.0, 1.0};
    const double kappa = 8.0 / 9.0;
    const auto b = forcing_mass_lower_bound(tail, 1e4, kappa, 3);
    CHECK(b.holds);
    CHECK(b.mass >= b.bound);
    CHECK(b.bound_constant == doctest::Approx(2.0 * kPi));
    CHECK(b.bound == doctest::Approx(2.0 * kPi * std::pow(10.0, 32.0 / 9.0)));

    const auto b2 = forcing_mass_lower_bound(PowerTailForcing{2.0, 2.0, 1.0}, 1e4, kappa, 3);
    CHECK(b2.bound == doctest::Approx(2 * b.bound));
    CHECK(b2.mass == doctest::Approx(2 * b.mass).epsilon(1e-9));

    CHECK_THROWS(forcing_mass_lower_bound(PowerTailForcing{1.0, 3.0, 1.0}, 1e4, kappa, 3));
    CHECK_THROWS(forcing_mass_lower_bound(PowerTailForcing{1.0, 0.0, 1.0}, 1e4, kappa, 3));

    // bound exponent tends to zero as r -> n
    const auto near = forcing_mass_lower_bound(PowerTailForcing{1.0, 2.999, 1.0}, 1e4, kappa, 3);
    CHECK(near.holds);
    CHECK(std::log(near.bound / near.bound_constant) / std::log(1e4) == doctest::Approx(0.001 * kappa));
}

TEST_CASE("weak-form gap vanishes for the zero solution") {
    ProblemSpec problem;
    problem.forcing = ForcingSpec{ZeroForcing{}, SignClass::Unsigned};
    problem.initial = InitialDataSpec{ConstantInitial{0.0}};
    SolverConfig config;
    config.T_max = 10.0;
    const auto result = run(problem, RadialGrid(40.0, 128), config);
    const auto gap = weak_form_gap(result.trajectory, power_test_function(4.0, 3.0, 2.0), problem);
    CHECK(gap.gap == 0.0);
}

TEST_CASE("weak-form gap shrinks for the exact heat kernel") {
    ProblemSpec problem;
    problem.lambda = 0.0;
    problem.mu = 0.0;
    const auto tf = power_test_function(4.0, 3.0, 2.0);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        const auto traj = heat_kernel_trajectory(128 << level, 20 << level, 10.0, 20.0);
        const double gap = weak_form_gap(traj, tf, problem).gap;
        CAPTURE(level);
        CHECK(gap > 0.0);
        if (level > 0) CHECK(std::log2(prev / gap) >= 1.0);
        prev = gap;
    }
    auto traj = heat_kernel_trajectory(128, 20, 10.0, 5.0);
    CHECK_THROWS(weak_form_gap(traj, tf, problem));
    traj.snapshots.resize(1);
    traj.times.resize(1);
    CHECK_THROWS(weak_form_gap(traj, tf, problem));
}
