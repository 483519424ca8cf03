#include "pcrit/io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace pcrit;
using nlohmann::json;

namespace {

ProblemSpec reference() {
    ProblemSpec spec;
    spec.n = 5;
    spec.p = 2.5;
    spec.lambda = 0.5;
    spec.mu = 2.0;
    spec.alpha = 6.0;
    spec.beta = 4.0;
    spec.forcing = ForcingSpec{PowerTailForcing{1.5, 2.0, 0.75}, SignClass::StrictlyPositive};
    spec.initial = InitialDataSpec{GaussianInitial{0.2, 3.0}};
    return spec;
}

}  // namespace

TEST_CASE("problem specs round-trip") {
    const ProblemSpec spec = reference();
    const json j = spec;
    CHECK(j.at("schema_version") == kSchemaVersion);
    const ProblemSpec back = j.get<ProblemSpec>();
    CHECK(json(back) == j);
    CHECK(back.n == 5);
    CHECK(back.p == 2.5);
    CHECK(std::get<PowerTailForcing>(back.forcing.kind).plateau_radius == 0.75);
    CHECK(back.forcing.sign_info == SignClass::StrictlyPositive);

    ProblemSpec table = spec;
    table.forcing = ForcingSpec{RadialTable{{0.0, 1.0, 2.0}, {1.0, 0.5, 0.0}}, SignClass::PositiveIntegral};
    table.initial = InitialDataSpec{RadialTable{{0.0, 4.0}, {0.1, 0.0}}};
    CHECK(json(json(table).get<ProblemSpec>()) == json(table));

    // exact doubles survive the text form
    ProblemSpec odd = spec;
    odd.alpha = 0.1 + 0.2;
    CHECK(json::parse(json(odd).dump()).get<ProblemSpec>().alpha == odd.alpha);
}

TEST_CASE("problem spec defaults and rejection") {
    const json minimal = {{"schema_version", 1}, {"n", 3}, {"p", 2.0}, {"alpha", 4.0}, {"beta", 3.0}};
    const auto spec = minimal.get<ProblemSpec>();
    CHECK(spec.lambda == 1.0);
    CHECK(spec.mu == 1.0);

    json bad = minimal;
    bad["schema_version"] = 99;
    CHECK_THROWS(bad.get<ProblemSpec>());
    bad = minimal;
    bad["forcing"] = {{"kind", "mystery"}};
    CHECK_THROWS(bad.get<ProblemSpec>());
    bad = minimal;
    bad.erase("alpha");
    CHECK_THROWS(bad.get<ProblemSpec>());
}

TEST_CASE("barrier-backed data") {
    json j = json(reference());
    j["n"] = 3;
    j["p"] = 2.0;
    j["alpha"] = 4.0;
    j["beta"] = 3.0;
    j["lambda"] = 1.0;
    j["mu"] = 1.0;
    j["forcing"] = {{"kind", "supersolution_residual"}, {"sign", "positive"}, {"barrier", json::object()}};
    j["initial"] = {{"kind", "barrier_fraction"}, {"fraction", 0.5}, {"barrier", {{"m", 0.4}}}};
    const auto spec = j.get<ProblemSpec>();
    const auto& f = std::get<ResidualForcing>(spec.forcing.kind).params;
    CHECK(f.m == doctest::Approx(5.0 / 12.0));  // window (1/3, 1/2)
    CHECK(f.epsilon == doctest::Approx(0.9 * epsilon_star(f)));
    const auto& u = std::get<BarrierFractionInitial>(spec.initial.kind);
    CHECK(u.fraction == 0.5);
    CHECK(u.params.m == 0.4);
    CHECK(json(json(spec).get<ProblemSpec>()) == json(spec));

    ProblemSpec closed;
    closed.n = 2;
    CHECK_THROWS(default_barrier(closed));
    const auto b = default_barrier(ProblemSpec{}, 2.8, std::nullopt, 0.01);
    CHECK(b.r == 2.8);
    CHECK(b.m == doctest::Approx(0.45));
    CHECK(b.epsilon == 0.01);
}

TEST_CASE("infinite thresholds are null") {
    const auto c = first_critical(2, 2.0);
    const json j = c;
    CHECK(j.at("alpha_cr").is_null());
    CHECK(j.at("beta_cr") == 2.0);
    CHECK(number_or_inf(json(nullptr)) == std::numeric_limits<double>::infinity());
    CHECK(number_or_null(3.5) == 3.5);

    ProblemSpec spec;
    spec.n = 2;
    spec.forcing = ForcingSpec{GaussianForcing{}, SignClass::StrictlyPositive};
    const auto pred = classify(spec);
    const json pj = pred;
    CHECK(pj.dump().find("Infinity") == std::string::npos);
    const auto back = pj.get<RegimePrediction>();
    CHECK(back.verdict == pred.verdict);
    CHECK(back.clause == pred.clause);
    CHECK(back.alpha_cr == std::numeric_limits<double>::infinity());
    CHECK(json(back) == pj);
}

TEST_CASE("verdicts round-trip") {
    Verdict v;
    v.outcome = Outcome::BlowUp;
    v.t_blow = 13.5;
    v.trigger = "dt_collapse";
    v.sup_max = 1e6;
    v.final_time = 13.5;
    v.step_count = 42;
    json j = v;
    CHECK(j.contains("t_blow"));
    CHECK_FALSE(j.contains("reason"));
    CHECK(json(j.get<Verdict>()) == j);

    v = Verdict{};
    v.outcome = Outcome::Inconclusive;
    v.reason = "step budget exhausted";
    j = v;
    CHECK_FALSE(j.contains("t_blow"));
    CHECK(j.at("reason") == v.reason);
    CHECK(json(j.get<Verdict>()) == j);

    v.outcome = Outcome::GlobalBounded;
    v.reason.clear();
    j = v;
    CHECK_FALSE(j.contains("reason"));
    CHECK(j.get<Verdict>().outcome == Outcome::GlobalBounded);
}

TEST_CASE("solver configs round-trip") {
    SolverConfig c;
    json j = c;
    CHECK(j.at("U_blow").is_null());
    CHECK(j.at("dt_min").is_null());
    auto back = j.get<SolverConfig>();
    CHECK_FALSE(back.U_blow);
    CHECK(json(back) == j);

    c.U_blow = 1e4;
    c.T_max = 25.0;
    c.snapshot_count = 7;
    j = c;
    back = j.get<SolverConfig>();
    CHECK(*back.U_blow == 1e4);
    CHECK(back.T_max == 25.0);
    CHECK(back.snapshot_count == 7);
    // missing keys keep their defaults
    CHECK(json::object().get<SolverConfig>().sigma == SolverConfig{}.sigma);
}

TEST_CASE("report documents") {
    ValidationReport r = validate_spec(ProblemSpec{});
    json j = r;
    CHECK(j.at("ok") == r.ok());
    CHECK(j.at("rules").size() == r.rules.size());

    SupersolutionParams s;
    s.epsilon = 0.9 * epsilon_star(s);
    const Certificate cert = certify(s, log_grid_with_origin(1e-4, 1e4, 256));
    j = cert;
    for (const char* key : {"params", "epsilon_star", "m_epsilon", "min_residual", "passed", "decay"})
        CHECK(j.contains(key));
    CHECK(j.at("decay").is_null());
    CHECK(j.at("params").get<SupersolutionParams>().epsilon == s.epsilon);
}
