#ifndef PCRIT_SWEEP_HPP
#define PCRIT_SWEEP_HPP

// Batch classification and simulation over (alpha, beta, r) grids, with one
// JSON record per point and a CSV/JSON agreement report.

#include "pcrit/exponents.hpp"
#include "pcrit/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcrit {

struct SweepPlan {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> rs;               // empty: no r axis
    nlohmann::json problem_template;      // ProblemSpec document; alpha, beta (and a power-tail r) are filled per point
    int cells = 512;
    std::optional<double> radius;         // default: default_domain_radius(spec)
    SolverConfig config;
    std::filesystem::path output_dir;     // empty: records are not persisted
    bool simulate = true;                 // false: classification only
    // GlobalPossible points are simulated with the certified barrier residual
    // as forcing and u0 = v/2 instead of the template data.
    bool witness = false;
    std::optional<unsigned> threads;      // default: PCRIT_THREADS or hardware concurrency
};

SweepPlan sweep_plan_from_json(const nlohmann::json& j);

struct RunRecord {
    std::string id;
    int schema_version = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> r;
    nlohmann::json spec;                  // instantiated ProblemSpec, null if instantiation failed
    RegimePrediction prediction;
    std::optional<Verdict> observation;
    nlohmann::json stats;                 // TrajectoryStats summary, null when not simulated
    int cells = 0;
    double radius = 0.0;
    SolverConfig config;
    double classify_seconds = 0.0;
    double simulate_seconds = 0.0;
    bool near_critical = false;
    std::string skipped;                  // why the simulation did not run, empty otherwise
};

void to_json(nlohmann::json& j, const RunRecord& rec);
void from_json(const nlohmann::json& j, RunRecord& rec);

/// Record key, e.g. "a2_b4" or "a4_b3_r-1".
std::string record_id(double alpha, double beta, std::optional<double> r);

/// Within 5% of alpha_cr, beta_cr or r*.
bool near_critical(const RegimePrediction& pred, double alpha, double beta, std::optional<double> r);

/// Worker count: PCRIT_THREADS if set and positive, else hardware concurrency.
unsigned worker_count(std::optional<unsigned> requested = std::nullopt);

/// Classifies (and optionally simulates) every grid point. Point failures go
/// into the record; only an unwritable output directory throws. Records are
/// persisted as <output_dir>/runs/<id>.json and returned sorted by key.
std::vector<RunRecord> run_sweep(const SweepPlan& plan);

/// Loads every *.json record in dir, sorted by key.
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

/// "agree", "disagree", "inconclusive" or "n/a".
std::string agreement(const RunRecord& rec);

struct ReportRow {
    std::optional<double> alpha, beta, r;
    std::string predicted, observed, agree;
    std::optional<double> t_blow, sup_max;
    std::string clause, critical_flag;
    bool near_critical = false;

    bool operator==(const ReportRow&) const = default;
};

inline const std::vector<std::string> kReportColumns = {
    "alpha", "beta", "r", "predicted", "observed", "agree",
    "t_blow", "sup_max", "clause", "critical_flag", "near_critical"};

ReportRow report_row(const RunRecord& rec);
std::string format_report_row(const ReportRow& row);
ReportRow parse_report_row(const std::string& line);

struct Report {
    std::string csv;
    nlohmann::json summary;
};

/// Throws std::invalid_argument on an empty record list.
Report emit_report(const std::vector<RunRecord>& records);

/// Writes sweep.csv and summary.json into dir.
void write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace pcrit

#endif  // PCRIT_SWEEP_HPP
