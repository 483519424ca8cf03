#include "pcrit/exponents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcrit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_operator(int n, double p) {
    if (n < 1 || !(p > p_lower_bound(n)))
        throw std::invalid_argument("critical exponents need n >= 1 and p > 2n/(n+1)");
}

// value <= threshold, ties included
bool at_or_below(double value, double threshold) {
    return value <= threshold || at_threshold(value, threshold);
}

RegimePrediction outside(RegimePrediction pred, std::string reason) {
    pred.verdict = RegimeVerdict::OutsideTheory;
    pred.clause = "none";
    pred.reason = std::move(reason);
    return pred;
}

}  // namespace

CriticalExponents first_critical(int n, double p) {
    require_operator(n, p);
    const double alpha_cr = (n <= p) ? kInf : (p - 1.0) * n / (n - p);
    const double beta_cr = (n == 1) ? kInf : (p - 1.0) * n / (n - 1.0);
    return {alpha_cr, beta_cr, ExponentSource::InhomogeneousThm1};
}

CriticalExponents homogeneous_critical(int n, double p) {
    require_operator(n, p);
    return {p - 1.0 + p / n, p - 1.0 + 1.0 / (n + 1.0), ExponentSource::HomogeneousLuZhang};
}

CriticalExponents fujita_critical(int n) {
    if (n < 1) throw std::invalid_argument("fujita_critical: n must be >= 1");
    return {1.0 + 2.0 / n, kInf, ExponentSource::Fujita};
}

CriticalExponents galaktionov_critical(int n, double p) {
    require_operator(n, p);
    return {p - 1.0 + p / n, kInf, ExponentSource::Galaktionov};
}

CriticalExponents bandle_levine_zhang_critical(int n) {
    if (n < 1) throw std::invalid_argument("bandle_levine_zhang_critical: n must be >= 1");
    return {n <= 2 ? kInf : n / (n - 2.0), kInf, ExponentSource::BandleLevineZhang};
}

double second_critical(double p, double alpha, double beta) {
    const double da = alpha - p + 1.0;
    const double db = beta - p + 1.0;
    if (!(da > 0.0) || !(db > 0.0))
        throw std::invalid_argument("second_critical: needs alpha > p-1 and beta > p-1");
    return std::max(p * alpha / da, beta / db);
}

bool at_threshold(double value, double threshold) {
    if (!std::isfinite(value) || !std::isfinite(threshold)) return value == threshold;
    const double scale = std::max(std::abs(value), std::abs(threshold));
    return std::abs(value - threshold) <= kThresholdTieTolerance * scale;
}

RegimePrediction classify(const ProblemSpec& spec, std::optional<double> r) {
    RegimePrediction pred;
    pred.clause = "none";

    const ValidationReport report = validate_spec(spec, ValidationMode::TheoremBacked);
    if (!report.ok()) return outside(pred, "invalid spec: " + report.failures());

    const auto crit = first_critical(spec.n, spec.p);
    pred.alpha_cr = crit.alpha_cr;
    pred.beta_cr = crit.beta_cr;
    pred.r_star = second_critical(spec.p, spec.alpha, spec.beta);

    if (!(spec.lambda > 0.0)) return outside(pred, "hypothesis lambda > 0 fails");
    if (!(spec.mu > 0.0)) return outside(pred, "hypothesis mu > 0 fails");

    pred.critical_flags.alpha = at_threshold(spec.alpha, crit.alpha_cr);
    pred.critical_flags.beta = at_threshold(spec.beta, crit.beta_cr);
    const bool alpha_low = at_or_below(spec.alpha, crit.alpha_cr);
    const bool beta_low = at_or_below(spec.beta, crit.beta_cr);

    if (alpha_low || beta_low) {
        // Nonexistence needs f > 0 for p != 2 and a positive integral for p = 2.
        const SignClass sign = spec.forcing.sign_info;
        const bool p_is_two = at_threshold(spec.p, 2.0);
        const bool forcing_ok = sign == SignClass::StrictlyPositive ||
                                (p_is_two && sign == SignClass::PositiveIntegral);
        if (!forcing_ok) {
            return outside(pred, p_is_two ? "Thm1(i) needs forcing with positive integral"
                                          : "Thm1(i) needs strictly positive forcing for p != 2");
        }
        pred.verdict = RegimeVerdict::NonexistenceGlobal;
        pred.clause = "Thm1(i)";
        return pred;
    }

    if (!r) {
        // alpha above a finite alpha_cr implies n > p
        pred.verdict = RegimeVerdict::GlobalPossible;
        pred.clause = "Thm1(ii)";
        return pred;
    }

    const double rv = *r;
    const double r_star = *pred.r_star;
    if (!std::isfinite(rv)) return outside(pred, "decay rate r must be finite");
    pred.critical_flags.r = at_threshold(rv, r_star);
    if (pred.critical_flags.r || rv >= r_star) {
        if (rv >= spec.n) return outside(pred, "decay classes are defined for r < n only");
        pred.verdict = RegimeVerdict::GlobalPossible;
        pred.clause = "Thm2(ii)";
        return pred;
    }

    // Remaining branches need a forcing bounded below by C|x|^{-r} at infinity.
    const auto* tail = std::get_if<PowerTailForcing>(&spec.forcing.kind);
    if (tail == nullptr || !(tail->amplitude > 0.0))
        return outside(pred, "Thm2 nonexistence needs a positive power-tail forcing");
    if (tail->r != rv && !at_threshold(tail->r, rv))
        return outside(pred, "power-tail exponent differs from the requested r");

    pred.verdict = RegimeVerdict::NonexistenceGlobal;
    pred.clause = rv <= 0.0 ? "Thm2(iii)" : "Thm2(i)";
    return pred;
}

std::string to_string(RegimeVerdict verdict) {
    switch (verdict) {
        case RegimeVerdict::NonexistenceGlobal: return "NonexistenceGlobal";
        case RegimeVerdict::GlobalPossible: return "GlobalPossible";
        case RegimeVerdict::OutsideTheory: return "OutsideTheory";
    }
    return "OutsideTheory";
}

RegimeVerdict regime_verdict_from_string(const std::string& text) {
    if (text == "NonexistenceGlobal") return RegimeVerdict::NonexistenceGlobal;
    if (text == "GlobalPossible") return RegimeVerdict::GlobalPossible;
    if (text == "OutsideTheory") return RegimeVerdict::OutsideTheory;
    throw std::invalid_argument("unknown regime verdict '" + text + "'");
}

std::string to_string(ExponentSource source) {
    switch (source) {
        case ExponentSource::InhomogeneousThm1: return "InhomogeneousThm1";
        case ExponentSource::HomogeneousLuZhang: return "HomogeneousLuZhang";
        case ExponentSource::Fujita: return "Fujita";
        case ExponentSource::Galaktionov: return "Galaktionov";
        case ExponentSource::BandleLevineZhang: return "BandleLevineZhang";
    }
    return "InhomogeneousThm1";
}

std::string to_string(const CriticalFlags& flags) {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += '+';
        out += name;
    };
    add(flags.alpha, "alpha");
    add(flags.beta, "beta");
    add(flags.r, "r");
    return out.empty() ? "none" : out;
}

CriticalFlags critical_flags_from_string(const std::string& text) {
    CriticalFlags flags;
    if (text == "none" || text.empty()) return flags;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('+', start), text.size());
        const std::string token = text.substr(start, end - start);
        if (token == "alpha") flags.alpha = true;
        else if (token == "beta") flags.beta = true;
        else if (token == "r") flags.r = true;
        else throw std::invalid_argument("unknown critical flag '" + token + "'");
        start = end + 1;
    }
    return flags;
}

}  // namespace pcrit
