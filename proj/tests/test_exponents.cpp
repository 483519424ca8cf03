#include "pcrit/exponents.hpp"
#include "pcrit/supersolution.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace pcrit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProblemSpec instance(int n, double p, double alpha, double beta, SignClass sign = SignClass::StrictlyPositive) {
    ProblemSpec spec;
    spec.n = n;
    spec.p = p;
    spec.alpha = alpha;
    spec.beta = beta;
    spec.forcing = ForcingSpec{GaussianForcing{1.0, 1.0}, sign};
    spec.initial = InitialDataSpec{ConstantInitial{0.0}};
    return spec;
}

ProblemSpec tail_instance(int n, double p, double alpha, double beta, double r) {
    ProblemSpec spec = instance(n, p, alpha, beta);
    spec.forcing = ForcingSpec{PowerTailForcing{1.0, r, 1.0}, SignClass::StrictlyPositive};
    return spec;
}

}  // namespace

TEST_CASE("first_critical spot values") {
    auto c = first_critical(3, 2.0);
    CHECK(c.alpha_cr == 3.0);
    CHECK(c.beta_cr == 1.5);
    CHECK(c.source == ExponentSource::InhomogeneousThm1);
    c = first_critical(2, 2.0);
    CHECK(c.alpha_cr == kInf);
    CHECK(c.beta_cr == 2.0);
    c = first_critical(5, 3.0);
    CHECK(c.alpha_cr == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(c.beta_cr == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(first_critical(3, 3.5).alpha_cr == kInf);
    CHECK_THROWS(first_critical(3, 1.5));
}

TEST_CASE("first_critical at p = 2 is n/(n-2), n/(n-1)") {
    for (int n = 3; n <= 20; ++n) {
        const auto c = first_critical(n, 2.0);
        CAPTURE(n);
        CHECK(c.alpha_cr == double(n) / (n - 2));
        CHECK(c.beta_cr == double(n) / (n - 1));
    }
}

TEST_CASE("first_critical is decreasing in n with limit p - 1") {
    for (double p : {2.0, 2.5, 3.0}) {
        int n0 = int(std::floor(p)) + 1;
        for (int n = n0; n < 60; ++n) {
            CHECK(first_critical(n + 1, p).alpha_cr < first_critical(n, p).alpha_cr);
            CHECK(first_critical(n + 1, p).beta_cr < first_critical(n, p).beta_cr);
        }
        const int big = 1'000'000;
        const auto c = first_critical(big, p);
        // exact gaps p(p-1)/(n-p) and (p-1)/(n-1)
        CHECK(c.alpha_cr - (p - 1.0) == doctest::Approx(p * (p - 1.0) / (big - p)).epsilon(1e-6));
        CHECK(c.beta_cr - (p - 1.0) == doctest::Approx((p - 1.0) / (big - 1.0)).epsilon(1e-6));
        CHECK(c.alpha_cr - (p - 1.0) < 1e-5);
        CHECK(c.beta_cr - (p - 1.0) < 1e-5);
    }
}

TEST_CASE("historical exponents") {
    auto h = homogeneous_critical(1, 2.0);
    CHECK(h.alpha_cr == doctest::Approx(3.0));
    CHECK(h.beta_cr == doctest::Approx(1.5));
    h = homogeneous_critical(3, 2.0);
    CHECK(h.alpha_cr == doctest::Approx(5.0 / 3.0));
    CHECK(h.beta_cr == doctest::Approx(1.25));
    h = homogeneous_critical(2, 3.0);
    CHECK(h.alpha_cr == doctest::Approx(3.5));
    CHECK(h.beta_cr == doctest::Approx(7.0 / 3.0));
    for (int n = 1; n <= 8; ++n) {
        CHECK(homogeneous_critical(n, 2.0).alpha_cr == doctest::Approx(fujita_critical(n).alpha_cr));
        CHECK(galaktionov_critical(n, 2.5).alpha_cr == doctest::Approx(homogeneous_critical(n, 2.5).alpha_cr));
    }
    CHECK(fujita_critical(3).beta_cr == kInf);
    CHECK(bandle_levine_zhang_critical(2).alpha_cr == kInf);
    CHECK(bandle_levine_zhang_critical(3).alpha_cr == 3.0);
    CHECK(bandle_levine_zhang_critical(3).alpha_cr == first_critical(3, 2.0).alpha_cr);
}

TEST_CASE("second_critical") {
    CHECK(second_critical(2.0, 4.0, 3.0) == doctest::Approx(8.0 / 3.0));
    CHECK(second_critical(3.0, 5.0, 4.0) == doctest::Approx(5.0));
    CHECK(second_critical(2.0, 1e12, 1e12) == doctest::Approx(2.0));
    CHECK_THROWS(second_critical(2.0, 1.0, 3.0));
    CHECK_THROWS(second_critical(2.0, 3.0, 0.5));
}

TEST_CASE("classify reference instances") {
    auto pred = classify(instance(3, 2.0, 2.0, 4.0, SignClass::PositiveIntegral));
    CHECK(pred.verdict == RegimeVerdict::NonexistenceGlobal);
    CHECK(pred.clause == "Thm1(i)");
    CHECK_FALSE(pred.critical_flags.any());

    pred = classify(instance(3, 2.0, 3.0, 4.0));
    CHECK(pred.verdict == RegimeVerdict::NonexistenceGlobal);
    CHECK(pred.critical_flags.alpha);
    CHECK_FALSE(pred.critical_flags.beta);
    CHECK(to_string(pred.critical_flags) == "alpha");

    pred = classify(instance(3, 2.0, 4.0, 3.0));
    CHECK(pred.verdict == RegimeVerdict::GlobalPossible);
    CHECK(pred.clause == "Thm1(ii)");

    pred = classify(tail_instance(3, 2.0, 4.0, 3.0, 2.8), 2.8);
    CHECK(pred.verdict == RegimeVerdict::GlobalPossible);
    CHECK(pred.clause == "Thm2(ii)");

    pred = classify(tail_instance(3, 2.0, 4.0, 3.0, -1.0), -1.0);
    CHECK(pred.verdict == RegimeVerdict::NonexistenceGlobal);
    CHECK(pred.clause == "Thm2(iii)");

    pred = classify(tail_instance(3, 2.0, 4.0, 3.0, 2.0), 2.0);
    CHECK(pred.verdict == RegimeVerdict::NonexistenceGlobal);
    CHECK(pred.clause == "Thm2(i)");
}

TEST_CASE("classify ties and boundaries") {
    const double r_star = 8.0 / 3.0;
    auto pred = classify(tail_instance(3, 2.0, 4.0, 3.0, r_star), r_star);
    CHECK(pred.verdict == RegimeVerdict::GlobalPossible);
    CHECK(pred.critical_flags.r);

    // a tie within 1e-12 relative counts as critical
    pred = classify(instance(3, 2.0, 3.0 * (1.0 + 1e-14), 4.0));
    CHECK(pred.verdict == RegimeVerdict::NonexistenceGlobal);
    CHECK(pred.critical_flags.alpha);
    pred = classify(instance(3, 2.0, 3.0 + 1e-9, 4.0));
    CHECK(pred.verdict == RegimeVerdict::GlobalPossible);

    pred = classify(instance(3, 2.0, 3.0, 1.5));
    CHECK(to_string(pred.critical_flags) == "alpha+beta");
    CHECK(critical_flags_from_string("alpha+beta").alpha);
    CHECK(critical_flags_from_string("alpha+beta").beta);
    CHECK_FALSE(critical_flags_from_string("none").any());

    // r = n leaves the existence window
    pred = classify(tail_instance(3, 2.0, 4.0, 3.0, 3.0), 3.0);
    CHECK(pred.verdict == RegimeVerdict::OutsideTheory);
}

TEST_CASE("classify refuses outside the hypotheses") {
    auto spec = instance(3, 2.0, 2.0, 4.0);
    spec.lambda = 0.0;
    auto pred = classify(spec);
    CHECK(pred.verdict == RegimeVerdict::OutsideTheory);
    CHECK(pred.reason.find("lambda") != std::string::npos);

    spec = instance(3, 2.0, 2.0, 4.0);
    spec.mu = -1.0;
    CHECK(classify(spec).verdict == RegimeVerdict::OutsideTheory);

    // p != 2 needs f > 0, a positive integral is not enough
    pred = classify(instance(4, 2.5, 2.0, 4.0, SignClass::PositiveIntegral));
    CHECK(pred.verdict == RegimeVerdict::OutsideTheory);
    CHECK(classify(instance(4, 2.5, 2.0, 4.0)).verdict == RegimeVerdict::NonexistenceGlobal);

    // unsigned forcing gives no nonexistence claim
    CHECK(classify(instance(3, 2.0, 2.0, 4.0, SignClass::Unsigned)).verdict == RegimeVerdict::OutsideTheory);

    CHECK(classify(instance(3, 1.4, 2.0, 4.0)).verdict == RegimeVerdict::OutsideTheory);
    CHECK(classify(instance(3, 2.0, 0.9, 4.0)).verdict == RegimeVerdict::OutsideTheory);

    // r given but the forcing is not a matching power tail
    CHECK(classify(instance(3, 2.0, 4.0, 3.0), 2.0).verdict == RegimeVerdict::OutsideTheory);
}

TEST_CASE("verdict regions partition the (alpha, beta) plane") {
    for (auto [n, p] : {std::pair{3, 2.0}, std::pair{5, 3.0}}) {
        const auto crit = first_critical(n, p);
        const double lo = std::max(1.0, p - 1.0);
        for (int i = 1; i <= 50; ++i)
            for (int j = 1; j <= 50; ++j) {
                const double alpha = lo + 0.1 * i;
                const double beta = lo + 0.05 * j;
                const auto pred = classify(instance(n, p, alpha, beta));
                const bool nonexistence = alpha <= crit.alpha_cr || beta <= crit.beta_cr ||
                                          at_threshold(alpha, crit.alpha_cr) || at_threshold(beta, crit.beta_cr);
                CAPTURE(n);
                CAPTURE(alpha);
                CAPTURE(beta);
                CHECK(pred.verdict ==
                      (nonexistence ? RegimeVerdict::NonexistenceGlobal : RegimeVerdict::GlobalPossible));
            }
    }
}

TEST_CASE("r* < n exactly when the second existence window is nonempty") {
    for (auto [n, p] : {std::pair{3, 2.0}, std::pair{5, 3.0}}) {
        const double lo = std::max(1.0, p - 1.0);
        for (int i = 1; i <= 20; ++i)
            for (int j = 1; j <= 20; ++j) {
                const double alpha = lo + 0.3 * i;
                const double beta = lo + 0.2 * j;
                const double r_star = second_critical(p, alpha, beta);
                const bool window = r_star < n;
                // independent witness: some r on a fine grid in [0, n) classified Thm2(ii)
                bool witness = false;
                for (int k = 0; k < 300 && !witness; ++k) {
                    const double r = n * k / 300.0;
                    witness = classify(tail_instance(n, p, alpha, beta, r), r).clause == "Thm2(ii)";
                }
                witness = witness || (window && classify(tail_instance(n, p, alpha, beta, r_star), r_star).clause ==
                                                    "Thm2(ii)");
                CAPTURE(alpha);
                CAPTURE(beta);
                CHECK(window == witness);
                // same equivalence through the barrier m window
                const bool m_window = admissible_m_range(n, p, alpha, beta).has_value();
                CHECK(window == m_window);
            }
    }
}

TEST_CASE("verdict strings") {
    for (auto v : {RegimeVerdict::NonexistenceGlobal, RegimeVerdict::GlobalPossible, RegimeVerdict::OutsideTheory})
        CHECK(regime_verdict_from_string(to_string(v)) == v);
    CHECK_THROWS(regime_verdict_from_string("Maybe"));
}
