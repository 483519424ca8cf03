#include "pcrit/io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcrit {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class T>
T value_or(const json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    return (it == j.end() || it->is_null()) ? fallback : it->get<T>();
}

RadialTable table_from_json(const json& j) {
    RadialTable t;
    t.radii = j.at("radii").get<std::vector<double>>();
    t.values = j.at("values").get<std::vector<double>>();
    return t;
}

json table_to_json(const RadialTable& t) { return {{"radii", t.radii}, {"values", t.values}}; }

ForcingSpec forcing_from_json(const json& j, const ProblemSpec& spec) {
    ForcingSpec f;
    f.sign_info = sign_class_from_string(value_or<std::string>(j, "sign", "unsigned"));
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        f.kind = ZeroForcing{};
    } else if (kind == "supersolution_residual") {
        f.kind = ResidualForcing{barrier_from_json(value_or(j, "barrier", json::object()), spec)};
    } else if (kind == "power_tail") {
        f.kind = PowerTailForcing{value_or(j, "amplitude", 1.0), j.at("r").get<double>(),
                                  value_or(j, "plateau_radius", 1.0)};
    } else if (kind == "gaussian") {
        f.kind = GaussianForcing{value_or(j, "amplitude", 1.0), value_or(j, "width", 1.0)};
    } else if (kind == "table") {
        f.kind = table_from_json(j);
    } else {
        throw std::invalid_argument("unknown forcing kind '" + kind + "'");
    }
    return f;
}

InitialDataSpec initial_from_json(const json& j, const ProblemSpec& spec) {
    InitialDataSpec u;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        u.kind = ConstantInitial{value_or(j, "value", 0.0)};
    } else if (kind == "gaussian") {
        u.kind = GaussianInitial{value_or(j, "amplitude", 1.0), value_or(j, "width", 1.0)};
    } else if (kind == "barrier_fraction") {
        u.kind = BarrierFractionInitial{value_or(j, "fraction", 0.5),
                                        barrier_from_json(value_or(j, "barrier", json::object()), spec)};
    } else if (kind == "table") {
        u.kind = table_from_json(j);
    } else {
        throw std::invalid_argument("unknown initial data kind '" + kind + "'");
    }
    return u;
}

void time_series_to_json(json& j, const char* key, const TimeSeries& s) {
    j[key] = {{"t", s.t}, {"value", s.value}};
}

}  // namespace

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or_inf(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

SupersolutionParams default_barrier(const ProblemSpec& spec, std::optional<double> r,
                                    std::optional<double> m, std::optional<double> epsilon,
                                    double safety) {
    SupersolutionParams s{spec.n, spec.p, spec.alpha, spec.beta, spec.lambda, spec.mu,
                          0.0, 0.0, r};
    if (m) {
        s.m = *m;
    } else {
        const auto window = admissible_m_range(spec.n, spec.p, spec.alpha, spec.beta, r);
        if (!window) throw std::invalid_argument("admissible m window is empty for this instance");
        s.m = window->midpoint();
    }
    s.epsilon = epsilon ? *epsilon : safety * epsilon_star(s);
    return s;
}

SupersolutionParams barrier_from_json(const json& j, const ProblemSpec& spec, double safety) {
    ProblemSpec base = spec;
    base.n = value_or(j, "n", spec.n);
    base.p = value_or(j, "p", spec.p);
    base.alpha = value_or(j, "alpha", spec.alpha);
    base.beta = value_or(j, "beta", spec.beta);
    base.lambda = value_or(j, "lambda", spec.lambda);
    base.mu = value_or(j, "mu", spec.mu);
    std::optional<double> r, m, eps;
    if (j.contains("r") && !j["r"].is_null()) r = j["r"].get<double>();
    if (j.contains("m") && !j["m"].is_null()) m = j["m"].get<double>();
    if (j.contains("epsilon") && !j["epsilon"].is_null()) eps = j["epsilon"].get<double>();
    return default_barrier(base, r, m, eps, safety);
}

void to_json(json& j, const SupersolutionParams& s) {
    j = {{"n", s.n},           {"p", s.p},   {"alpha", s.alpha}, {"beta", s.beta},
         {"lambda", s.lambda}, {"mu", s.mu}, {"m", s.m},         {"epsilon", s.epsilon}};
    j["r"] = s.r ? json(*s.r) : json(nullptr);
}

void from_json(const json& j, SupersolutionParams& s) {
    s.n = j.at("n").get<int>();
    s.p = j.at("p").get<double>();
    s.alpha = j.at("alpha").get<double>();
    s.beta = j.at("beta").get<double>();
    s.lambda = j.at("lambda").get<double>();
    s.mu = j.at("mu").get<double>();
    s.m = j.at("m").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    s.r = (j.contains("r") && !j["r"].is_null()) ? std::optional<double>(j["r"].get<double>())
                                                  : std::nullopt;
}

void to_json(json& j, const ForcingSpec& f) {
    std::visit(overloaded{
                   [&](const ZeroForcing&) { j = {{"kind", "zero"}}; },
                   [&](const ResidualForcing& r) {
                       j = {{"kind", "supersolution_residual"}, {"barrier", r.params}};
                   },
                   [&](const PowerTailForcing& t) {
                       j = {{"kind", "power_tail"},
                            {"amplitude", t.amplitude},
                            {"r", t.r},
                            {"plateau_radius", t.plateau_radius}};
                   },
                   [&](const GaussianForcing& g) {
                       j = {{"kind", "gaussian"}, {"amplitude", g.amplitude}, {"width", g.width}};
                   },
                   [&](const RadialTable& t) {
                       j = table_to_json(t);
                       j["kind"] = "table";
                   },
               },
               f.kind);
    j["sign"] = to_string(f.sign_info);
}

void to_json(json& j, const InitialDataSpec& u) {
    std::visit(overloaded{
                   [&](const ConstantInitial& c) { j = {{"kind", "constant"}, {"value", c.value}}; },
                   [&](const GaussianInitial& g) {
                       j = {{"kind", "gaussian"}, {"amplitude", g.amplitude}, {"width", g.width}};
                   },
                   [&](const BarrierFractionInitial& b) {
                       j = {{"kind", "barrier_fraction"}, {"fraction", b.fraction}, {"barrier", b.params}};
                   },
                   [&](const RadialTable& t) {
                       j = table_to_json(t);
                       j["kind"] = "table";
                   },
               },
               u.kind);
}

void to_json(json& j, const ProblemSpec& spec) {
    j = {{"schema_version", kSchemaVersion},
         {"n", spec.n},
         {"p", spec.p},
         {"lambda", spec.lambda},
         {"mu", spec.mu},
         {"alpha", spec.alpha},
         {"beta", spec.beta},
         {"forcing", spec.forcing},
         {"initial", spec.initial}};
}

void from_json(const json& j, ProblemSpec& spec) {
    const int version = value_or(j, "schema_version", kSchemaVersion);
    if (version != kSchemaVersion)
        throw std::invalid_argument("unsupported ProblemSpec schema_version " + std::to_string(version));
    spec.n = j.at("n").get<int>();
    spec.p = j.at("p").get<double>();
    spec.lambda = value_or(j, "lambda", 1.0);
    spec.mu = value_or(j, "mu", 1.0);
    spec.alpha = j.at("alpha").get<double>();
    spec.beta = j.at("beta").get<double>();
    spec.forcing = j.contains("forcing") ? forcing_from_json(j["forcing"], spec) : ForcingSpec{};
    spec.initial = j.contains("initial") ? initial_from_json(j["initial"], spec) : InitialDataSpec{};
}

void to_json(json& j, const CriticalExponents& c) {
    j = {{"alpha_cr", number_or_null(c.alpha_cr)},
         {"beta_cr", number_or_null(c.beta_cr)},
         {"source", to_string(c.source)}};
}

void to_json(json& j, const RegimePrediction& pred) {
    j = {{"verdict", to_string(pred.verdict)},
         {"clause", pred.clause},
         {"critical_flags", to_string(pred.critical_flags)},
         {"reason", pred.reason},
         {"alpha_cr", number_or_null(pred.alpha_cr)},
         {"beta_cr", number_or_null(pred.beta_cr)},
         {"r_star", pred.r_star ? number_or_null(*pred.r_star) : json(nullptr)}};
}

void from_json(const json& j, RegimePrediction& pred) {
    pred.verdict = regime_verdict_from_string(j.at("verdict").get<std::string>());
    pred.clause = j.at("clause").get<std::string>();
    pred.critical_flags = critical_flags_from_string(j.at("critical_flags").get<std::string>());
    pred.reason = value_or<std::string>(j, "reason", "");
    pred.alpha_cr = number_or_inf(j.at("alpha_cr"));
    pred.beta_cr = number_or_inf(j.at("beta_cr"));
    pred.r_star = j.at("r_star").is_null() ? std::nullopt
                                           : std::optional<double>(j["r_star"].get<double>());
}

void to_json(json& j, const Verdict& v) {
    j = {{"outcome", to_string(v.outcome)},
         {"sup_max", v.sup_max},
         {"final_time", v.final_time},
         {"step_count", v.step_count}};
    if (v.outcome == Outcome::BlowUp) {
        j["t_blow"] = v.t_blow;
        j["trigger"] = v.trigger;
    }
    if (v.outcome == Outcome::Inconclusive) j["reason"] = v.reason;
}

void from_json(const json& j, Verdict& v) {
    v.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    v.sup_max = j.at("sup_max").get<double>();
    v.final_time = j.at("final_time").get<double>();
    v.step_count = j.at("step_count").get<long long>();
    v.t_blow = value_or(j, "t_blow", 0.0);
    v.trigger = value_or<std::string>(j, "trigger", "");
    v.reason = value_or<std::string>(j, "reason", "");
}

void to_json(json& j, const SolverConfig& c) {
    j = {{"delta", c.delta},
         {"sigma", c.sigma},
         {"T_max", c.T_max},
         {"U_blow", c.U_blow ? json(*c.U_blow) : json(nullptr)},
         {"dt_min", c.dt_min ? json(*c.dt_min) : json(nullptr)},
         {"snapshot_count", c.snapshot_count},
         {"max_steps", c.max_steps},
         {"truncation_tol", c.truncation_tol}};
}

void from_json(const json& j, SolverConfig& c) {
    SolverConfig d;
    c.delta = value_or(j, "delta", d.delta);
    c.sigma = value_or(j, "sigma", d.sigma);
    c.T_max = value_or(j, "T_max", d.T_max);
    c.U_blow = (j.contains("U_blow") && !j["U_blow"].is_null())
                   ? std::optional<double>(j["U_blow"].get<double>())
                   : std::nullopt;
    c.dt_min = (j.contains("dt_min") && !j["dt_min"].is_null())
                   ? std::optional<double>(j["dt_min"].get<double>())
                   : std::nullopt;
    c.snapshot_count = value_or(j, "snapshot_count", d.snapshot_count);
    c.max_steps = value_or(j, "max_steps", d.max_steps);
    c.truncation_tol = value_or(j, "truncation_tol", d.truncation_tol);
}

void to_json(json& j, const TrajectoryStats& s) {
    j = json::object();
    time_series_to_json(j, "sup_norm_history", s.sup_norm);
    time_series_to_json(j, "l1_norm_history", s.l1_norm);
    j["step_count"] = s.step_count;
    j["dt"] = {{"min", s.dt_min}, {"max", s.dt_max}, {"mean", s.dt_mean}};
    j["min_value"] = s.min_value;
    j["truncation_indicator"] = s.truncation_indicator;
}

void to_json(json& j, const ValidationReport& r) {
    j = {{"ok", r.ok()}, {"rules", json::array()}};
    for (const auto& rule : r.rules)
        j["rules"].push_back({{"name", rule.name}, {"passed", rule.passed}, {"message", rule.message}});
}

void to_json(json& j, const Certificate& c) {
    j = {{"params", c.params},
         {"epsilon_star", c.epsilon_star},
         {"safety", c.safety},
         {"m_epsilon", c.m_eps},
         {"points", c.points},
         {"min_residual", c.min_residual},
         {"min_lower_bound", c.min_lower_bound},
         {"max_bound_violation", c.max_bound_violation},
         {"residual_dominates_bound", c.residual_dominates_bound},
         {"bound_nonnegative", c.bound_nonnegative},
         {"comparison", c.comparison},
         {"passed", c.passed()}};
    if (c.decay) {
        j["decay"] = {{"r", c.decay->r},
                      {"constant", c.decay->constant},
                      {"max_scaled", c.decay->max_scaled},
                      {"exponent_ok", c.decay->exponent_ok},
                      {"holds", c.decay->holds}};
    } else {
        j["decay"] = nullptr;
    }
}

void to_json(json& j, const RescaledIntegrals& r) {
    auto q = [](const QuantityEstimate& e) {
        return json{{"value", e.value}, {"converged", e.converged}, {"rel_change", e.rel_change}};
    };
    j = {{"T", r.T},   {"I1", q(r.I1)}, {"I2", q(r.I2)}, {"F", q(r.F)}, {"U0", q(r.U0)},
         {"plateau_mass", q(r.plateau_mass)}};
}

}  // namespace pcrit
