#ifndef PCRIT_EXPONENTS_HPP
#define PCRIT_EXPONENTS_HPP

// Critical exponents and the regime classifier for the combined-nonlinearity
// p-Laplace heat equation with forcing.

#include "pcrit/model.hpp"

#include <optional>
#include <string>

namespace pcrit {

enum class ExponentSource {
    InhomogeneousThm1,
    HomogeneousLuZhang,
    Fujita,
    Galaktionov,
    BandleLevineZhang,
};

/// Thresholds on alpha and beta. +infinity when a threshold is absent.
struct CriticalExponents {
    double alpha_cr;
    double beta_cr;
    ExponentSource source;
};

/// ((p-1)n/(n-p), (p-1)n/(n-1)); alpha_cr = +inf for n <= p.
CriticalExponents first_critical(int n, double p);

/// Homogeneous (f = 0) thresholds (p-1+p/n, p-1+1/(n+1)).
CriticalExponents homogeneous_critical(int n, double p);

/// 1 + 2/n (p = 2, no gradient term, no forcing). beta_cr is +inf.
CriticalExponents fujita_critical(int n);

/// p - 1 + p/n (no gradient term, no forcing). beta_cr is +inf.
CriticalExponents galaktionov_critical(int n, double p);

/// +inf for n <= 2, n/(n-2) otherwise (p = 2, forcing with positive mass).
CriticalExponents bandle_levine_zhang_critical(int n);

/// r* = max{p alpha/(alpha-p+1), beta/(beta-p+1)}. Throws on nonpositive denominators.
double second_critical(double p, double alpha, double beta);

enum class RegimeVerdict { NonexistenceGlobal, GlobalPossible, OutsideTheory };

struct CriticalFlags {
    bool alpha = false;
    bool beta = false;
    bool r = false;

    bool any() const { return alpha || beta || r; }
};

struct RegimePrediction {
    RegimeVerdict verdict = RegimeVerdict::OutsideTheory;
    std::string clause;  // "Thm1(i)", "Thm1(ii)", "Thm2(i)", "Thm2(ii)", "Thm2(iii)" or "none"
    CriticalFlags critical_flags;
    std::string reason;
    double alpha_cr = 0.0;
    double beta_cr = 0.0;
    std::optional<double> r_star;
};

/// Relative tie tolerance used when comparing against thresholds.
inline constexpr double kThresholdTieTolerance = 1e-12;

/// true when a == b within kThresholdTieTolerance relative.
bool at_threshold(double value, double threshold);

/// Theorem-backed verdict. Without r, uses the first critical exponents;
/// with r, the second critical exponent for power-tail forcing. Never throws:
/// unmet hypotheses give OutsideTheory with the reason filled in.
RegimePrediction classify(const ProblemSpec& spec, std::optional<double> r = std::nullopt);

std::string to_string(RegimeVerdict verdict);
RegimeVerdict regime_verdict_from_string(const std::string& text);
std::string to_string(ExponentSource source);
/// "none", or a '+'-joined list of "alpha", "beta", "r".
std::string to_string(const CriticalFlags& flags);
CriticalFlags critical_flags_from_string(const std::string& text);

}  // namespace pcrit

#endif  // PCRIT_EXPONENTS_HPP
