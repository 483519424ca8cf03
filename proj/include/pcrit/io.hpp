#ifndef PCRIT_IO_HPP
#define PCRIT_IO_HPP

// JSON documents for problem instances, predictions, verdicts and
// certificates. Infinite thresholds are written as null.

#include "pcrit/exponents.hpp"
#include "pcrit/model.hpp"
#include "pcrit/solver.hpp"
#include "pcrit/supersolution.hpp"
#include "pcrit/testfn.hpp"

#include <json.hpp>

namespace pcrit {

inline constexpr int kSchemaVersion = 1;

void to_json(nlohmann::json& j, const SupersolutionParams& s);
void from_json(const nlohmann::json& j, SupersolutionParams& s);
void to_json(nlohmann::json& j, const ForcingSpec& f);
void to_json(nlohmann::json& j, const InitialDataSpec& u);
void to_json(nlohmann::json& j, const ProblemSpec& spec);
void from_json(const nlohmann::json& j, ProblemSpec& spec);

void to_json(nlohmann::json& j, const CriticalExponents& c);
void to_json(nlohmann::json& j, const RegimePrediction& pred);
void from_json(const nlohmann::json& j, RegimePrediction& pred);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);
void to_json(nlohmann::json& j, const SolverConfig& c);
void from_json(const nlohmann::json& j, SolverConfig& c);
void to_json(nlohmann::json& j, const TrajectoryStats& s);
void to_json(nlohmann::json& j, const ValidationReport& r);
void to_json(nlohmann::json& j, const Certificate& c);
void to_json(nlohmann::json& j, const RescaledIntegrals& r);

/// Parses a barrier object; fields missing from `j` are taken from `spec`,
/// m defaults to the window midpoint and epsilon to safety * eps*.
SupersolutionParams barrier_from_json(const nlohmann::json& j, const ProblemSpec& spec,
                                      double safety = 0.9);

/// Barrier for the instance with m at the window midpoint (or `m` if given)
/// and epsilon = safety * eps* (or `epsilon` if given). Throws when the
/// window is empty.
SupersolutionParams default_barrier(const ProblemSpec& spec, std::optional<double> r = std::nullopt,
                                    std::optional<double> m = std::nullopt,
                                    std::optional<double> epsilon = std::nullopt,
                                    double safety = 0.9);

/// +inf as null, everything else as a number.
nlohmann::json number_or_null(double x);
double number_or_inf(const nlohmann::json& j);

}  // namespace pcrit

#endif  // PCRIT_IO_HPP
