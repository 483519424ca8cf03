#include "pcrit/sweep.hpp"

#include "pcrit/io.hpp"
#include "pcrit/supersolution.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pcrit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::optional<double> optional_number(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

json optional_to_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::vector<double> axis_from_json(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    return it->get<std::vector<double>>();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct GridPoint {
    double alpha;
    double beta;
    std::optional<double> r;
};

bool key_less(const RunRecord& a, const RunRecord& b) {
    const double ra = a.r.value_or(-std::numeric_limits<double>::infinity());
    const double rb = b.r.value_or(-std::numeric_limits<double>::infinity());
    return std::tie(a.alpha, a.beta, ra) < std::tie(b.alpha, b.beta, rb);
}

RunRecord evaluate_point(const SweepPlan& plan, const GridPoint& pt) {
    RunRecord rec;
    rec.id = record_id(pt.alpha, pt.beta, pt.r);
    rec.schema_version = kSchemaVersion;
    rec.alpha = pt.alpha;
    rec.beta = pt.beta;
    rec.r = pt.r;
    rec.cells = plan.cells;
    rec.config = plan.config;
    rec.stats = nullptr;

    const auto t_classify = std::chrono::steady_clock::now();
    ProblemSpec spec;
    try {
        json doc = plan.problem_template;
        doc["alpha"] = pt.alpha;
        doc["beta"] = pt.beta;
        if (pt.r && doc.contains("forcing") && doc["forcing"].value("kind", "") == "power_tail")
            doc["forcing"]["r"] = *pt.r;
        spec = doc.get<ProblemSpec>();
        rec.spec = spec;
    } catch (const std::exception& e) {
        rec.spec = nullptr;
        rec.prediction.verdict = RegimeVerdict::OutsideTheory;
        rec.prediction.clause = "none";
        rec.prediction.reason = std::string("instantiation failed: ") + e.what();
        rec.skipped = rec.prediction.reason;
        rec.classify_seconds = seconds_since(t_classify);
        return rec;
    }
    rec.prediction = classify(spec, pt.r);
    rec.near_critical = near_critical(rec.prediction, pt.alpha, pt.beta, pt.r);
    rec.classify_seconds = seconds_since(t_classify);

    if (!plan.simulate) {
        rec.skipped = "classification-only";
        return rec;
    }
    const ValidationReport report = validate_spec(spec, ValidationMode::Structural);
    if (!report.ok()) {
        rec.skipped = "invalid spec: " + report.failures();
        return rec;
    }

    const auto t_sim = std::chrono::steady_clock::now();
    try {
        ProblemSpec sim = spec;
        if (plan.witness && rec.prediction.verdict == RegimeVerdict::GlobalPossible) {
            const SupersolutionParams barrier = default_barrier(spec, pt.r);
            sim.forcing = ForcingSpec{ResidualForcing{barrier}, SignClass::StrictlyPositive};
            sim.initial = InitialDataSpec{BarrierFractionInitial{0.5, barrier}};
            rec.spec = sim;
        }
        rec.radius = plan.radius.value_or(default_domain_radius(sim));
        const RunResult result = run(sim, RadialGrid(rec.radius, plan.cells), plan.config);
        rec.observation = result.verdict;
        rec.stats = result.stats;
    } catch (const std::exception& e) {
        rec.skipped = std::string("simulation failed: ") + e.what();
    }
    rec.simulate_seconds = seconds_since(t_sim);
    return rec;
}

void write_record(const RunRecord& rec, const fs::path& runs_dir) {
    const fs::path target = runs_dir / (rec.id + ".json");
    const fs::path tmp = runs_dir / (rec.id + ".json.tmp");
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << json(rec).dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

fs::path prepare_output(const fs::path& dir) {
    const fs::path runs = dir / "runs";
    std::error_code ec;
    fs::create_directories(runs, ec);
    if (ec) throw std::runtime_error("output directory " + runs.string() + " is not writable: " + ec.message());
    const fs::path probe = runs / ".probe";
    {
        std::ofstream out(probe);
        if (!out) throw std::runtime_error("output directory " + runs.string() + " is not writable");
    }
    fs::remove(probe, ec);
    return runs;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> parse_optional(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    double x = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw std::invalid_argument("not a number: '" + cell + "'");
    return x;
}

std::string format_optional(const std::optional<double>& x) { return x ? shortest(*x) : std::string(); }

}  // namespace

SweepPlan sweep_plan_from_json(const json& j) {
    SweepPlan plan;
    plan.alphas = axis_from_json(j, "alphas");
    plan.betas = axis_from_json(j, "betas");
    plan.rs = axis_from_json(j, "rs");
    plan.problem_template = j.at("template");
    if (j.contains("grid")) {
        plan.cells = j["grid"].value("cells", plan.cells);
        plan.radius = optional_number(j["grid"], "radius");
    }
    if (j.contains("config")) plan.config = j["config"].get<SolverConfig>();
    if (j.contains("output_dir")) plan.output_dir = j["output_dir"].get<std::string>();
    plan.simulate = j.value("simulate", true);
    plan.witness = j.value("witness", false);
    if (j.contains("threads") && !j["threads"].is_null()) plan.threads = j["threads"].get<unsigned>();
    return plan;
}

std::string record_id(double alpha, double beta, std::optional<double> r) {
    std::string id = "a" + shortest(alpha) + "_b" + shortest(beta);
    if (r) id += "_r" + shortest(*r);
    return id;
}

bool near_critical(const RegimePrediction& pred, double alpha, double beta, std::optional<double> r) {
    auto close = [](double x, double threshold) {
        return std::isfinite(threshold) && std::abs(x - threshold) <= 0.05 * std::abs(threshold);
    };
    if (close(alpha, pred.alpha_cr) || close(beta, pred.beta_cr)) return true;
    return r && pred.r_star && close(*r, *pred.r_star);
}

unsigned worker_count(std::optional<unsigned> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("PCRIT_THREADS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value > 0) return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunRecord> run_sweep(const SweepPlan& plan) {
    std::vector<GridPoint> points;
    for (double a : plan.alphas)
        for (double b : plan.betas) {
            if (plan.rs.empty()) {
                points.push_back({a, b, std::nullopt});
            } else {
                for (double r : plan.rs) points.push_back({a, b, r});
            }
        }

    fs::path runs_dir;
    if (!plan.output_dir.empty()) runs_dir = prepare_output(plan.output_dir);
    if (points.empty()) return {};

    std::vector<RunRecord> records(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                records[i] = evaluate_point(plan, points[i]);
                if (!runs_dir.empty()) write_record(records[i], runs_dir);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const unsigned count = std::min<std::size_t>(worker_count(plan.threads), points.size());
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < count; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::sort(records.begin(), records.end(), key_less);
    return records;
}

std::vector<RunRecord> load_records(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::invalid_argument(dir.string() + " is not a directory");
    std::vector<RunRecord> records;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        records.push_back(json::parse(in).get<RunRecord>());
    }
    std::sort(records.begin(), records.end(), key_less);
    return records;
}

void to_json(json& j, const RunRecord& rec) {
    j = {{"id", rec.id},
         {"schema_version", rec.schema_version},
         {"alpha", rec.alpha},
         {"beta", rec.beta},
         {"r", optional_to_json(rec.r)},
         {"spec", rec.spec},
         {"prediction", rec.prediction},
         {"observation", rec.observation ? json(*rec.observation) : json(nullptr)},
         {"stats", rec.stats},
         {"grid", {{"cells", rec.cells}, {"radius", rec.radius}}},
         {"config", rec.config},
         {"timings", {{"classify_seconds", rec.classify_seconds}, {"simulate_seconds", rec.simulate_seconds}}},
         {"near_critical", rec.near_critical},
         {"skipped", rec.skipped}};
}

void from_json(const json& j, RunRecord& rec) {
    rec.id = j.at("id").get<std::string>();
    rec.schema_version = j.at("schema_version").get<int>();
    if (rec.schema_version != kSchemaVersion)
        throw std::invalid_argument("unsupported RunRecord schema_version " + std::to_string(rec.schema_version));
    rec.alpha = j.at("alpha").get<double>();
    rec.beta = j.at("beta").get<double>();
    rec.r = optional_number(j, "r");
    rec.spec = j.value("spec", json(nullptr));
    rec.prediction = j.at("prediction").get<RegimePrediction>();
    if (j.contains("observation") && !j["observation"].is_null())
        rec.observation = j["observation"].get<Verdict>();
    else
        rec.observation.reset();
    rec.stats = j.value("stats", json(nullptr));
    rec.cells = j.at("grid").at("cells").get<int>();
    rec.radius = j.at("grid").at("radius").get<double>();
    rec.config = j.at("config").get<SolverConfig>();
    rec.classify_seconds = j.at("timings").value("classify_seconds", 0.0);
    rec.simulate_seconds = j.at("timings").value("simulate_seconds", 0.0);
    rec.near_critical = j.value("near_critical", false);
    rec.skipped = j.value("skipped", "");
}

std::string agreement(const RunRecord& rec) {
    if (!rec.observation) return "n/a";
    if (rec.observation->outcome == Outcome::Inconclusive) return "inconclusive";
    switch (rec.prediction.verdict) {
        case RegimeVerdict::NonexistenceGlobal:
            return rec.observation->outcome == Outcome::BlowUp ? "agree" : "disagree";
        case RegimeVerdict::GlobalPossible:
            return rec.observation->outcome == Outcome::GlobalBounded ? "agree" : "disagree";
        case RegimeVerdict::OutsideTheory: return "n/a";
    }
    return "n/a";
}

ReportRow report_row(const RunRecord& rec) {
    ReportRow row;
    row.alpha = rec.alpha;
    row.beta = rec.beta;
    row.r = rec.r;
    row.predicted = to_string(rec.prediction.verdict);
    row.agree = agreement(rec);
    if (rec.observation) {
        row.observed = to_string(rec.observation->outcome);
        if (rec.observation->outcome == Outcome::BlowUp) row.t_blow = rec.observation->t_blow;
        row.sup_max = rec.observation->sup_max;
    }
    row.clause = rec.prediction.clause;
    row.critical_flag = to_string(rec.prediction.critical_flags);
    row.near_critical = rec.near_critical;
    return row;
}

std::string format_report_row(const ReportRow& row) {
    std::string out;
    out += format_optional(row.alpha) + ',' + format_optional(row.beta) + ',' + format_optional(row.r) + ',';
    out += row.predicted + ',' + row.observed + ',' + row.agree + ',';
    out += format_optional(row.t_blow) + ',' + format_optional(row.sup_max) + ',';
    out += row.clause + ',' + row.critical_flag + ',' + (row.near_critical ? "true" : "false");
    return out;
}

ReportRow parse_report_row(const std::string& line) {
    const auto cells = split_csv(line);
    if (cells.size() != kReportColumns.size())
        throw std::invalid_argument("report row has " + std::to_string(cells.size()) + " columns, expected " +
                                    std::to_string(kReportColumns.size()));
    ReportRow row;
    row.alpha = parse_optional(cells[0]);
    row.beta = parse_optional(cells[1]);
    row.r = parse_optional(cells[2]);
    row.predicted = cells[3];
    row.observed = cells[4];
    row.agree = cells[5];
    row.t_blow = parse_optional(cells[6]);
    row.sup_max = parse_optional(cells[7]);
    row.clause = cells[8];
    row.critical_flag = cells[9];
    if (cells[10] != "true" && cells[10] != "false")
        throw std::invalid_argument("near_critical must be true or false");
    row.near_critical = cells[10] == "true";
    return row;
}

Report emit_report(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("emit_report: no records");
    Report report;
    for (std::size_t k = 0; k < kReportColumns.size(); ++k)
        report.csv += (k ? "," : "") + kReportColumns[k];
    report.csv += '\n';

    std::map<std::string, std::map<std::string, int>> by_clause;
    std::map<std::string, int> totals{{"agree", 0}, {"disagree", 0}, {"inconclusive", 0}, {"n/a", 0}};
    json disagreements = json::array();
    int adjacent = 0;
    for (const auto& rec : records) {
        report.csv += format_report_row(report_row(rec)) + '\n';
        const std::string a = agreement(rec);
        ++totals[a];
        auto& clause = by_clause[rec.prediction.clause];
        for (const char* key : {"agree", "disagree", "inconclusive", "n/a"}) clause.try_emplace(key, 0);
        ++clause[a];
        if (a == "disagree") {
            if (rec.near_critical) ++adjacent;
            disagreements.push_back({{"id", rec.id},
                                     {"alpha", rec.alpha},
                                     {"beta", rec.beta},
                                     {"r", optional_to_json(rec.r)},
                                     {"predicted", to_string(rec.prediction.verdict)},
                                     {"observed", to_string(rec.observation->outcome)},
                                     {"clause", rec.prediction.clause},
                                     {"near_critical", rec.near_critical}});
        }
    }

    json& s = report.summary;
    s["schema_version"] = kSchemaVersion;
    s["total"] = records.size();
    s["counts"] = {{"agree", totals["agree"]},
                   {"disagree", totals["disagree"]},
                   {"inconclusive", totals["inconclusive"]},
                   {"not_compared", totals["n/a"]}};
    const int compared = totals["agree"] + totals["disagree"];
    s["agreement_rate"] = compared > 0 ? json(double(totals["agree"]) / compared) : json(nullptr);
    s["by_clause"] = json::object();
    for (const auto& [clause, counts] : by_clause) {
        s["by_clause"][clause] = {{"agree", counts.at("agree")},
                                  {"disagree", counts.at("disagree")},
                                  {"inconclusive", counts.at("inconclusive")},
                                  {"not_compared", counts.at("n/a")}};
    }
    s["disagreements"] = disagreements;
    s["disagreements_near_critical"] = adjacent;
    s["note"] =
        "A disagreement is not an error. Finite-horizon runs near a critical exponent evolve slowly "
        "and may end before the predicted behaviour shows; inconclusive runs are counted separately.";
    return report;
}

void write_report(const Report& report, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream csv(dir / "sweep.csv");
    std::ofstream summary(dir / "summary.json");
    if (!csv || !summary) throw std::runtime_error("cannot write report into " + dir.string());
    csv << report.csv;
    summary << report.summary.dump(2) << '\n';
}

}  // namespace pcrit
