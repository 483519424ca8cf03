#include "pcrit/model.hpp"

#include "pcrit/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pcrit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

bool table_ok(const RadialTable& table, std::string& why) {
    if (table.radii.size() != table.values.size() || table.radii.empty()) {
        why = "table needs equally many radii and values (at least one)";
        return false;
    }
    for (std::size_t i = 0; i < table.radii.size(); ++i) {
        if (!std::isfinite(table.radii[i]) || !std::isfinite(table.values[i])) {
            why = "table sample " + std::to_string(i) + " is not finite";
            return false;
        }
        if (table.radii[i] < 0.0 || (i > 0 && table.radii[i] <= table.radii[i - 1])) {
            why = "table radii must be nonnegative and strictly increasing";
            return false;
        }
    }
    return true;
}

// Grid used to verify declared sign classes; `extent` in data length scales.
Eigen::ArrayXd sign_check_grid(const ProblemSpec& spec, double extent) {
    return Eigen::ArrayXd::LinSpaced(2049, 0.0, extent * length_scale(spec));
}

}  // namespace

double RadialTable::operator()(double radius) const {
    if (radii.empty()) return 0.0;
    if (radius <= radii.front()) return values.front();
    if (radius >= radii.back()) return values.back();
    const auto it = std::upper_bound(radii.begin(), radii.end(), radius);
    const auto j = static_cast<std::size_t>(it - radii.begin());
    const double w = (radius - radii[j - 1]) / (radii[j] - radii[j - 1]);
    return (1.0 - w) * values[j - 1] + w * values[j];
}

bool ValidationReport::ok() const {
    return std::all_of(rules.begin(), rules.end(), [](const auto& r) { return r.passed; });
}

std::string ValidationReport::failures() const {
    std::string out;
    for (const auto& rule : rules) {
        if (rule.passed) continue;
        if (!out.empty()) out += "; ";
        out += rule.message;
    }
    return out;
}

double sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("sphere_area: dimension must be >= 1");
    double area = (n % 2 == 1) ? 2.0 : 2.0 * std::numbers::pi;
    for (int k = (n % 2 == 1) ? 1 : 2; k + 2 <= n; k += 2) area *= 2.0 * std::numbers::pi / k;
    return area;
}

double evaluate(const ForcingSpec& forcing, double radius) {
    return std::visit(
        overloaded{
            [](const ZeroForcing&) { return 0.0; },
            [&](const ResidualForcing& f) { return evaluate_barrier(f.params, radius).residual; },
            [&](const PowerTailForcing& f) {
                return f.amplitude * std::pow(std::max(f.plateau_radius, radius), -f.r);
            },
            [&](const GaussianForcing& f) {
                const double z = radius / f.width;
                return f.amplitude * std::exp(-z * z);
            },
            [&](const RadialTable& t) { return t(radius); },
        },
        forcing.kind);
}

double evaluate(const InitialDataSpec& initial, double radius) {
    return std::visit(overloaded{
                          [](const ConstantInitial& c) { return c.value; },
                          [&](const GaussianInitial& g) {
                              const double z = radius / g.width;
                              return g.amplitude * std::exp(-z * z);
                          },
                          [&](const BarrierFractionInitial& b) {
                              return b.fraction * evaluate_barrier(b.params, radius).v;
                          },
                          [&](const RadialTable& t) { return t(radius); },
                      },
                      initial.kind);
}

Eigen::ArrayXd evaluate(const ForcingSpec& forcing, const Eigen::ArrayXd& radii) {
    return radii.unaryExpr([&](double r) { return evaluate(forcing, r); });
}

Eigen::ArrayXd evaluate(const InitialDataSpec& initial, const Eigen::ArrayXd& radii) {
    return radii.unaryExpr([&](double r) { return evaluate(initial, r); });
}

std::optional<SupersolutionParams> barrier_in_play(const ProblemSpec& spec) {
    if (const auto* f = std::get_if<ResidualForcing>(&spec.forcing.kind)) return f->params;
    if (const auto* u = std::get_if<BarrierFractionInitial>(&spec.initial.kind)) return u->params;
    return std::nullopt;
}

double length_scale(const ProblemSpec& spec) {
    double scale = 1.0;
    std::visit(overloaded{
                   [](const ZeroForcing&) {},
                   [](const ResidualForcing&) {},
                   [&](const PowerTailForcing& f) { scale = std::max(scale, f.plateau_radius); },
                   [&](const GaussianForcing& f) { scale = std::max(scale, f.width); },
                   [&](const RadialTable& t) {
                       if (!t.radii.empty()) scale = std::max(scale, t.radii.back() / 40.0);
                   },
               },
               spec.forcing.kind);
    std::visit(overloaded{
                   [](const ConstantInitial&) {},
                   [&](const GaussianInitial& g) { scale = std::max(scale, g.width); },
                   [](const BarrierFractionInitial&) {},
                   [&](const RadialTable& t) {
                       if (!t.radii.empty()) scale = std::max(scale, t.radii.back() / 40.0);
                   },
               },
               spec.initial.kind);
    return scale;
}

ValidationReport validate_spec(const ProblemSpec& spec, ValidationMode mode) {
    ValidationReport report;
    auto add = [&](std::string name, bool passed, std::string message) {
        report.rules.push_back({std::move(name), passed, passed ? std::string{} : std::move(message)});
    };

    add("dimension", spec.n >= 1, "n = " + std::to_string(spec.n) + " must be >= 1");
    const bool finite = std::isfinite(spec.p) && std::isfinite(spec.lambda) &&
                        std::isfinite(spec.mu) && std::isfinite(spec.alpha) &&
                        std::isfinite(spec.beta);
    add("finite_parameters", finite, "p, lambda, mu, alpha, beta must be finite");
    if (spec.n < 1 || !finite) return report;

    const double p_min = p_lower_bound(spec.n);
    add("operator", spec.p > p_min, "p <= 2n/(n+1) = " + fmt(p_min));

    if (mode == ValidationMode::TheoremBacked) {
        const double floor = std::max(1.0, spec.p - 1.0);
        add("alpha", spec.alpha > floor, "alpha <= max{1, p-1} = " + fmt(floor));
        add("beta", spec.beta > floor, "beta <= max{1, p-1} = " + fmt(floor));
    }

    std::string why;
    bool data_ok = true;
    if (const auto* t = std::get_if<RadialTable>(&spec.forcing.kind)) data_ok = table_ok(*t, why);
    if (const auto* g = std::get_if<GaussianForcing>(&spec.forcing.kind)) {
        data_ok = std::isfinite(g->amplitude) && g->width > 0.0;
        why = "gaussian forcing needs finite amplitude and positive width";
    }
    if (const auto* pt = std::get_if<PowerTailForcing>(&spec.forcing.kind)) {
        data_ok = std::isfinite(pt->amplitude) && std::isfinite(pt->r) && pt->plateau_radius > 0.0;
        why = "power-tail forcing needs finite amplitude and exponent, positive plateau radius";
    }
    add("forcing_data", data_ok, why);

    why.clear();
    data_ok = true;
    std::visit(overloaded{
                   [&](const ConstantInitial& c) {
                       data_ok = std::isfinite(c.value);
                       why = "constant initial value must be finite";
                   },
                   [&](const GaussianInitial& g) {
                       data_ok = std::isfinite(g.amplitude) && g.width > 0.0;
                       why = "gaussian initial data needs finite amplitude and positive width";
                   },
                   [&](const BarrierFractionInitial& b) {
                       data_ok = b.fraction > 0.0 && b.fraction <= 1.0;
                       why = "barrier fraction must lie in (0, 1]";
                   },
                   [&](const RadialTable& t) { data_ok = table_ok(t, why); },
               },
               spec.initial.kind);
    add("initial_data", data_ok, why);

    if (const auto params = barrier_in_play(spec)) {
        const bool same = params->n == spec.n && params->p == spec.p &&
                          params->alpha == spec.alpha && params->beta == spec.beta &&
                          params->lambda == spec.lambda && params->mu == spec.mu;
        add("barrier_parameters", same && params->epsilon > 0.0,
            "barrier parameters must share (n, p, alpha, beta, lambda, mu) with the problem "
            "and have epsilon > 0");
    }
    if (!report.ok()) return report;

    // Declared sign class, verified on a sampling grid.
    if (spec.forcing.sign_info != SignClass::Unsigned) {
        if (spec.forcing.sign_info == SignClass::StrictlyPositive) {
            // kept short enough that Gaussian tails stay representable
            const Eigen::ArrayXd f = evaluate(spec.forcing, sign_check_grid(spec, 8.0));
            add("forcing_sign", f.minCoeff() > 0.0,
                "forcing declared strictly positive but min f = " + fmt(f.minCoeff()));
        } else {
            // midpoint-rule mass on the sampling grid
            const Eigen::ArrayXd radii = sign_check_grid(spec, 40.0);
            const double h = radii(1) - radii(0);
            const Eigen::ArrayXd mid = (radii.head(radii.size() - 1) + 0.5 * h);
            const Eigen::ArrayXd fm = evaluate(spec.forcing, mid);
            const double mass =
                sphere_area(spec.n) * (fm * mid.pow(spec.n - 1)).sum() * h;
            add("forcing_sign", mass > 0.0,
                "forcing declared with positive integral but mass = " + fmt(mass));
        }
    }
    return report;
}

std::string to_string(SignClass sign) {
    switch (sign) {
        case SignClass::StrictlyPositive: return "positive";
        case SignClass::PositiveIntegral: return "positive-integral";
        case SignClass::Unsigned: return "unsigned";
    }
    return "unsigned";
}

SignClass sign_class_from_string(const std::string& text) {
    if (text == "positive") return SignClass::StrictlyPositive;
    if (text == "positive-integral") return SignClass::PositiveIntegral;
    if (text == "unsigned") return SignClass::Unsigned;
    throw std::invalid_argument("unknown sign class '" + text + "'");
}

}  // namespace pcrit
