#include "pcrit/cli.hpp"

#include "pcrit/exponents.hpp"
#include "pcrit/io.hpp"
#include "pcrit/model.hpp"
#include "pcrit/solver.hpp"
#include "pcrit/supersolution.hpp"
#include "pcrit/sweep.hpp"
#include "pcrit/testfn.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pcrit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Flat JSON object of flag values, e.g. {"alpha": 2, "forcing-sign": "positive"}.
// Only options left unset on the command line take the file's value.
void apply_config(CLI::App* app, const std::string& path) {
    std::ifstream in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = app->get_option_no_throw("--" + key);
        if (opt == nullptr && key.size() == 1) opt = app->get_option_no_throw("-" + key);
        if (opt == nullptr || key == "config") throw CLI::ConversionError("config key '" + key + "' is not an option");
        if (opt->count() > 0) continue;
        std::vector<std::string> inputs;
        if (value.is_string()) {
            inputs = {value.get<std::string>()};
        } else if (value.is_boolean()) {
            inputs = {value.get<bool>() ? "true" : "false"};
        } else if (value.is_number()) {
            inputs = {value.dump()};
        } else if (value.is_array()) {
            for (const auto& v : value) inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            throw CLI::ConversionError("config key '" + key + "' must be a scalar or an array");
        }
        for (const auto& input : inputs) opt->add_result(input);
        opt->run_callback();
    }
}

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem instance flags shared by several subcommands.
struct SpecFlags {
    std::string spec_path;
    int n = 3;
    double p = 2.0, lambda = 1.0, mu = 1.0, alpha = 0.0, beta = 0.0;
    std::string forcing;
    double forcing_amplitude = 1.0, forcing_width = 1.0, forcing_r = 0.0, forcing_plateau = 1.0;
    std::string forcing_sign;
    std::string initial;
    double initial_value = 0.0, initial_amplitude = 1.0, initial_width = 1.0, initial_fraction = 0.5;
    double m = 0.0, epsilon = 0.0, barrier_r = 0.0, safety = 0.9;

    CLI::Option *o_n{}, *o_p{}, *o_lambda{}, *o_mu{}, *o_alpha{}, *o_beta{};
    CLI::Option *o_forcing{}, *o_forcing_amplitude{}, *o_forcing_width{}, *o_forcing_r{}, *o_forcing_plateau{};
    CLI::Option *o_forcing_sign{};
    CLI::Option *o_initial{}, *o_initial_value{}, *o_initial_amplitude{}, *o_initial_width{}, *o_initial_fraction{};
    CLI::Option *o_m{}, *o_epsilon{}, *o_barrier_r{};

    void add_exponents(CLI::App* app) {
        app->add_option("--spec", spec_path, "ProblemSpec JSON file; flags override its fields")
            ->check(CLI::ExistingFile);
        o_n = app->add_option("-n,--dimension", n, "spatial dimension")->check(CLI::PositiveNumber);
        o_p = app->add_option("-p,--p", p, "p-Laplacian exponent");
        o_lambda = app->add_option("--lambda", lambda, "coefficient of |u|^alpha (default 1)");
        o_mu = app->add_option("--mu", mu, "coefficient of |grad u|^beta (default 1)");
        o_alpha = app->add_option("--alpha", alpha, "reaction exponent");
        o_beta = app->add_option("--beta", beta, "gradient exponent");
    }

    void add_data(CLI::App* app, const std::string& default_forcing, const std::string& default_initial) {
        forcing = default_forcing;
        initial = default_initial;
        o_forcing = app->add_option("--forcing", forcing, "zero | gaussian | power_tail | residual")
                        ->check(CLI::IsMember({"zero", "gaussian", "power_tail", "residual"}));
        o_forcing_amplitude = app->add_option("--forcing-amplitude", forcing_amplitude);
        o_forcing_width = app->add_option("--forcing-width", forcing_width);
        o_forcing_r = app->add_option("--forcing-r", forcing_r, "power-tail decay exponent (default --r)");
        o_forcing_plateau = app->add_option("--forcing-plateau", forcing_plateau, "power-tail plateau radius R0");
        o_forcing_sign = app->add_option("--forcing-sign", forcing_sign, "positive | positive-integral | unsigned")
                             ->check(CLI::IsMember({"positive", "positive-integral", "unsigned"}));
        o_initial = app->add_option("--initial", initial, "constant | gaussian | barrier_fraction")
                        ->check(CLI::IsMember({"constant", "gaussian", "barrier_fraction"}));
        o_initial_value = app->add_option("--initial-value", initial_value);
        o_initial_amplitude = app->add_option("--initial-amplitude", initial_amplitude);
        o_initial_width = app->add_option("--initial-width", initial_width);
        o_initial_fraction = app->add_option("--initial-fraction", initial_fraction);
        add_barrier(app);
    }

    void add_barrier(CLI::App* app) {
        o_m = app->add_option("--m", m, "barrier decay exponent (default: window midpoint)");
        o_epsilon = app->add_option("--epsilon", epsilon, "barrier amplitude (default: safety * eps*)");
        o_barrier_r = app->add_option("--barrier-r", barrier_r, "decay target for the barrier window");
        app->add_option("--safety", safety, "safety factor on eps*")->capture_default_str();
    }

    bool given(const CLI::Option* o) const { return o != nullptr && o->count() > 0; }

    void require_exponents() const {
        if (!spec_path.empty()) return;
        for (const CLI::Option* o : {o_n, o_p, o_alpha, o_beta})
            if (!given(o)) throw UsageFailure(o->get_name() + " is required (or pass --spec)");
    }

    std::optional<double> barrier_decay() const {
        return given(o_barrier_r) ? std::optional<double>(barrier_r) : std::nullopt;
    }

    SupersolutionParams barrier(const ProblemSpec& spec) const {
        return default_barrier(spec, barrier_decay(), given(o_m) ? std::optional<double>(m) : std::nullopt,
                               given(o_epsilon) ? std::optional<double>(epsilon) : std::nullopt, safety);
    }

    // Exponents and coefficients only; forcing and initial data come from build().
    ProblemSpec base() const {
        require_exponents();
        ProblemSpec spec;
        if (!spec_path.empty()) {
            std::ifstream in(spec_path);
            try {
                spec = json::parse(in).get<ProblemSpec>();
            } catch (const std::exception& e) {
                throw NumericFailure("cannot load " + spec_path + ": " + e.what());
            }
        } else {
            spec.forcing = ForcingSpec{};
            spec.initial = InitialDataSpec{};
        }
        if (given(o_n)) spec.n = n;
        if (given(o_p)) spec.p = p;
        if (given(o_lambda) || spec_path.empty()) spec.lambda = lambda;
        if (given(o_mu) || spec_path.empty()) spec.mu = mu;
        if (given(o_alpha)) spec.alpha = alpha;
        if (given(o_beta)) spec.beta = beta;
        return spec;
    }

    ProblemSpec build(std::optional<double> r = std::nullopt) const {
        ProblemSpec spec = base();
        const bool from_file = !spec_path.empty();
        const bool forcing_flags = given(o_forcing) || given(o_forcing_amplitude) || given(o_forcing_width) ||
                                   given(o_forcing_r) || given(o_forcing_plateau);
        if (!from_file || forcing_flags) {
            std::string kind = forcing;
            if (!given(o_forcing) && r) kind = "power_tail";
            if (kind == "zero") {
                spec.forcing.kind = ZeroForcing{};
            } else if (kind == "gaussian") {
                spec.forcing.kind = GaussianForcing{forcing_amplitude, forcing_width};
            } else if (kind == "power_tail") {
                const double exponent = given(o_forcing_r) ? forcing_r : r.value_or(forcing_r);
                spec.forcing.kind = PowerTailForcing{forcing_amplitude, exponent, forcing_plateau};
            } else {
                spec.forcing.kind = ResidualForcing{barrier(spec)};
            }
            spec.forcing.sign_info = kind == "zero" ? SignClass::Unsigned : SignClass::StrictlyPositive;
        }
        if (given(o_forcing_sign)) spec.forcing.sign_info = sign_class_from_string(forcing_sign);

        const bool initial_flags = given(o_initial) || given(o_initial_value) || given(o_initial_amplitude) ||
                                   given(o_initial_width) || given(o_initial_fraction);
        if (!from_file || initial_flags) {
            if (initial == "constant")
                spec.initial.kind = ConstantInitial{initial_value};
            else if (initial == "gaussian")
                spec.initial.kind = GaussianInitial{initial_amplitude, initial_width};
            else
                spec.initial.kind = BarrierFractionInitial{initial_fraction, barrier(spec)};
        }
        return spec;
    }
};

struct Common {
    bool json_only = false;
    std::string config_path;
    void add(CLI::App* app) {
        app->add_flag("--json", json_only, "print only machine-readable JSON on stdout");
        app->add_option("--config", config_path, "JSON file of flag values (command-line flags win)")
            ->check(CLI::ExistingFile);
    }
};

std::vector<double> default_T(bool log_variant) {
    return log_variant ? std::vector<double>{1e3, 1e4, 1e5, 1e6, 1e7}
                       : std::vector<double>{1e2, 1e3, 1e4, 1e5, 1e6};
}

json fit_json(const std::vector<std::pair<double, double>>& samples, double theory) {
    for (const auto& s : samples)
        if (!(s.second > 0.0)) return nullptr;
    if (samples.size() < 4) return nullptr;
    const ScalingFit fit = scaling_fit(samples);
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"residual", fit.residual},
            {"theoretical", theory},
            {"deviation", fit.slope - theory}};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw NumericFailure("cannot write " + path);
    out << content;
}

// ---------------------------------------------------------------------------

int do_classify(const SpecFlags& f, std::optional<double> r, const Common& c, std::ostream& out) {
    const ProblemSpec spec = f.build(r);
    const RegimePrediction pred = classify(spec, r);
    const json line = {{"alpha_cr", number_or_null(pred.alpha_cr)},
                       {"beta_cr", number_or_null(pred.beta_cr)},
                       {"r_star", pred.r_star ? number_or_null(*pred.r_star) : json(nullptr)},
                       {"verdict", to_string(pred.verdict)},
                       {"clause", pred.clause},
                       {"critical_flags", to_string(pred.critical_flags)},
                       {"reason", pred.reason}};
    if (!c.json_only) {
        out << to_string(pred.verdict) << "  clause " << pred.clause << "  alpha_cr = " << num(pred.alpha_cr)
            << "  beta_cr = " << num(pred.beta_cr);
        if (pred.r_star) out << "  r* = " << num(*pred.r_star);
        out << "  critical: " << to_string(pred.critical_flags) << '\n';
        if (!pred.reason.empty()) out << "  " << pred.reason << '\n';
    }
    out << line.dump() << '\n';
    return validate_spec(spec, ValidationMode::TheoremBacked).ok() ? 0 : 1;
}

int do_supersolution(const SpecFlags& f, int points, double rmax, const std::string& csv_path, const Common& c,
                     std::ostream& out) {
    ProblemSpec spec = f.base();
    const SupersolutionParams params = f.barrier(spec);
    const Eigen::ArrayXd grid = log_grid_with_origin(1e-4, rmax, points);
    Certificate cert;
    try {
        cert = certify(params, grid, f.safety);
    } catch (const CertificationRefused& e) {
        throw NumericFailure(e.what());
    }
    if (!csv_path.empty()) {
        const BarrierProfile prof = evaluate_barrier(params, grid);
        std::ostringstream os;
        os << std::setprecision(17) << "radius,v,grad_norm,p_laplacian,residual\n";
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            os << prof.radius(i) << ',' << prof.v(i) << ',' << prof.grad_norm(i) << ',' << prof.p_laplacian(i)
               << ',' << prof.residual(i) << '\n';
        write_file(csv_path, os.str());
    }
    if (c.json_only) {
        out << json(cert).dump() << '\n';
    } else {
        out << (cert.passed() ? "certified" : "NOT certified") << "  m = " << num(params.m)
            << "  epsilon = " << num(params.epsilon) << "  eps* = " << num(cert.epsilon_star)
            << "  M_eps = " << num(cert.m_eps) << '\n'
            << "  min residual " << num(cert.min_residual) << ", min lower bound " << num(cert.min_lower_bound)
            << " over " << cert.points << " radii\n";
        if (cert.decay)
            out << "  decay: f <= " << num(cert.decay->constant) << " |x|^-" << num(cert.decay->r)
                << (cert.decay->holds ? " holds" : " fails") << '\n';
        out << "  " << cert.comparison << '\n';
        out << json(cert).dump() << '\n';
    }
    return cert.passed() ? 0 : 1;
}

int do_testfn(const SpecFlags& f, const std::string& variant, const CLI::Option* o_kappa, double kappa,
              const CLI::Option* o_theta, double theta, std::vector<double> Ts, const std::string& csv_path,
              const Common& c, std::ostream& out) {
    const ProblemSpec spec = f.build();
    const bool log_variant = variant == "log";
    const TestFunctionSpec tf =
        log_variant ? log_test_function(spec.alpha, spec.beta, spec.p, spec.n,
                                        o_theta->count() ? std::optional<double>(theta) : std::nullopt)
                    : power_test_function(spec.alpha, spec.beta, spec.p,
                                          o_kappa->count() ? std::optional<double>(kappa) : std::nullopt);
    if (Ts.empty()) Ts = default_T(log_variant);
    for (std::size_t i = 1; i < Ts.size(); ++i)
        if (!(Ts[i] > Ts[i - 1])) throw UsageFailure("--T values must be strictly increasing");

    std::vector<std::future<RescaledIntegrals>> jobs;
    for (double T : Ts)
        jobs.push_back(std::async(std::launch::async, [&, T] {
            return rescaled_integrals(tf, spec.n, T, spec.forcing, spec.initial);
        }));
    std::vector<RescaledIntegrals> rows;
    for (auto& job : jobs) rows.push_back(job.get());

    std::ostringstream csv;
    csv << std::setprecision(17) << "T,I1,I2,F,U0\n";
    std::vector<std::pair<double, double>> s1, s2, slog;
    bool converged = true;
    for (const auto& row : rows) {
        csv << row.T << ',' << row.I1.value << ',' << row.I2.value << ',' << row.F.value << ',' << row.U0.value
            << '\n';
        s1.emplace_back(row.T, row.I1.value);
        s2.emplace_back(row.T, row.I2.value);
        slog.emplace_back(std::log(row.T), row.I2.value / row.T);
        converged = converged && row.converged();
    }
    if (!csv_path.empty()) write_file(csv_path, csv.str());

    const double a = tf.time_exponent();
    const double b = tf.space_exponent();
    json summary = {{"variant", variant}, {"n", spec.n}, {"p", spec.p}, {"alpha", spec.alpha},
                    {"beta", spec.beta},  {"T", Ts},     {"converged", converged}};
    json fits = json::object();
    if (log_variant) {
        const double th = std::get<LogScaling>(tf.variant).theta;
        summary["theta"] = th;
        fits["I2_over_T_vs_lnT"] = fit_json(slog, 1.0 - spec.n);
    } else {
        const double k = std::get<PowerScaling>(tf.variant).kappa;
        summary["kappa"] = k;
        fits["I1"] = fit_json(s1, k * spec.n + 1.0 - a);
        fits["I2"] = fit_json(s2, k * spec.n + 1.0 - k * b);
    }
    summary["fits"] = fits;
    summary["plateau_mass"] = rows.empty() ? json(nullptr) : json(rows.back().plateau_mass.value);

    if (!c.json_only) {
        if (csv_path.empty()) out << csv.str();
        for (const auto& [name, fit] : fits.items()) {
            if (fit.is_null()) continue;
            out << name << ": fitted slope " << num(fit["slope"].get<double>()) << ", theoretical "
                << num(fit["theoretical"].get<double>()) << '\n';
        }
        if (!converged) out << "warning: quadrature did not converge at every T\n";
    }
    out << summary.dump() << '\n';
    return converged ? 0 : 1;
}

struct SimFlags {
    int cells = 512;
    double radius = 0.0;
    SolverConfig config;
    double u_blow = 0.0, dt_min = 0.0;
    std::string record_path, snapshots_path;
    CLI::Option *o_radius{}, *o_u_blow{}, *o_dt_min{};

    void add(CLI::App* app) {
        app->add_option("--cells", cells, "radial cell count N (>= 64)")->capture_default_str();
        o_radius = app->add_option("--radius", radius, "domain radius R (default 40 x data length scale)");
        app->add_option("--delta", config.delta, "gradient regularization")->capture_default_str();
        app->add_option("--sigma", config.sigma, "time-step safety factor")->capture_default_str();
        app->add_option("--T-max", config.T_max, "horizon")->capture_default_str();
        o_u_blow = app->add_option("--U-blow", u_blow, "blow-up threshold");
        o_dt_min = app->add_option("--dt-min", dt_min, "minimum time step");
        app->add_option("--snapshots", config.snapshot_count, "stored frames")->capture_default_str();
        app->add_option("--max-steps", config.max_steps)->capture_default_str();
        app->add_option("--truncation-tol", config.truncation_tol)->capture_default_str();
        app->add_option("--record", record_path, "write the RunRecord JSON here");
        app->add_option("--snapshots-csv", snapshots_path, "write (t, r, u) snapshot CSV here");
    }

    SolverConfig resolved() const {
        SolverConfig c = config;
        if (o_u_blow->count()) c.U_blow = u_blow;
        if (o_dt_min->count()) c.dt_min = dt_min;
        return c;
    }
};

int do_simulate(const SpecFlags& f, const SimFlags& s, const Common& c, std::ostream& out) {
    const ProblemSpec spec = f.build();
    const ValidationReport report = validate_spec(spec, ValidationMode::Structural);
    if (!report.ok()) throw NumericFailure("invalid spec: " + report.failures());

    RunRecord rec;
    rec.schema_version = kSchemaVersion;
    rec.alpha = spec.alpha;
    rec.beta = spec.beta;
    rec.id = record_id(spec.alpha, spec.beta, std::nullopt);
    rec.spec = spec;
    rec.cells = s.cells;
    rec.config = s.resolved();
    const auto t0 = std::chrono::steady_clock::now();
    rec.prediction = classify(spec);
    rec.near_critical = near_critical(rec.prediction, spec.alpha, spec.beta, std::nullopt);
    const auto t1 = std::chrono::steady_clock::now();
    rec.radius = s.o_radius->count() ? s.radius : default_domain_radius(spec);
    const RunResult result = [&] {
        try {
            return run(spec, RadialGrid(rec.radius, s.cells), rec.config);
        } catch (const std::invalid_argument& e) {
            throw NumericFailure(e.what());
        }
    }();
    const auto t2 = std::chrono::steady_clock::now();
    rec.classify_seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.simulate_seconds = std::chrono::duration<double>(t2 - t1).count();
    rec.observation = result.verdict;
    rec.stats = result.stats;

    json doc = rec;
    if (const auto barrier = barrier_in_play(spec))
        doc["compare_to_supersolution"] = compare_to_supersolution(result.trajectory, *barrier);
    if (!s.record_path.empty()) write_file(s.record_path, doc.dump(2) + "\n");
    if (!s.snapshots_path.empty()) {
        std::ostringstream os;
        os << std::setprecision(17) << "t,r,u\n";
        const auto& traj = result.trajectory;
        for (std::size_t k = 0; k < traj.times.size(); ++k)
            for (int i = 0; i < traj.grid.N(); ++i)
                os << traj.times[k] << ',' << traj.grid.center(i) << ',' << traj.snapshots[k](i) << '\n';
        write_file(s.snapshots_path, os.str());
    }

    if (c.json_only) {
        out << doc.dump() << '\n';
        return 0;
    }
    const Verdict& v = result.verdict;
    out << "predicted " << to_string(rec.prediction.verdict) << " (" << rec.prediction.clause << "), observed "
        << to_string(v.outcome);
    if (v.outcome == Outcome::BlowUp) out << " at t = " << num(v.t_blow) << " [" << v.trigger << "]";
    if (v.outcome == Outcome::Inconclusive) out << ": " << v.reason;
    out << '\n'
        << "  sup|u| max " << num(v.sup_max) << ", final time " << num(v.final_time) << ", " << v.step_count
        << " steps, N = " << s.cells << ", R = " << num(rec.radius) << '\n';
    if (doc.contains("compare_to_supersolution"))
        out << "  max(u - v) = " << num(doc["compare_to_supersolution"].get<double>()) << '\n';
    return 0;
}

json print_report(const std::vector<RunRecord>& records, const fs::path& dir, const Common& c, std::ostream& out) {
    if (records.empty()) {
        json empty = {{"total", 0}};
        out << empty.dump() << '\n';
        return empty;
    }
    const Report report = emit_report(records);
    write_report(report, dir);
    if (!c.json_only) {
        const json& counts = report.summary["counts"];
        out << records.size() << " points: " << counts["agree"] << " agree, " << counts["disagree"]
            << " disagree, " << counts["inconclusive"] << " inconclusive, " << counts["not_compared"]
            << " not compared\n"
            << "  wrote " << (dir / "sweep.csv").string() << " and " << (dir / "summary.json").string() << '\n';
    }
    out << report.summary.dump() << '\n';
    return report.summary;
}

int do_sweep(const std::string& plan_path, const std::string& out_dir, bool classify_only, unsigned threads,
             const Common& c, std::ostream& out) {
    std::ifstream in(plan_path);
    SweepPlan plan;
    try {
        plan = sweep_plan_from_json(json::parse(in));
    } catch (const std::exception& e) {
        throw NumericFailure("cannot load plan " + plan_path + ": " + e.what());
    }
    if (!out_dir.empty()) plan.output_dir = out_dir;
    if (plan.output_dir.empty()) plan.output_dir = fs::path(plan_path).parent_path() / "sweep_out";
    if (classify_only) plan.simulate = false;
    if (threads > 0) plan.threads = threads;
    const auto records = run_sweep(plan);
    print_report(records, plan.output_dir, c, out);
    return 0;
}

int do_report(const std::string& runs, const std::string& out_dir, const Common& c, std::ostream& out) {
    fs::path dir = runs;
    if (fs::is_directory(dir / "runs")) dir /= "runs";
    const auto records = load_records(dir);
    const fs::path target = out_dir.empty() ? dir.parent_path() : fs::path(out_dir);
    print_report(records, target, c, out);
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical-exponent laboratory for u_t - Delta_p u = lambda|u|^alpha + mu|grad u|^beta + f",
                 "pcrit"};
    app.require_subcommand(1);
    app.fallthrough(false);

    Common common;
    SpecFlags classify_flags, super_flags, testfn_flags, simulate_flags;
    SimFlags sim_flags;

    auto* classify_cmd = app.add_subcommand("classify", "theoretical regime of an instance");
    double r_value = 0.0;
    common.add(classify_cmd);
    classify_flags.add_exponents(classify_cmd);
    classify_flags.add_data(classify_cmd, "gaussian", "gaussian");
    auto* o_r = classify_cmd->add_option("--r", r_value, "forcing decay rate (second critical exponent mode)");

    auto* super_cmd = app.add_subcommand("supersolution", "build and certify the stationary barrier");
    int points = 4096;
    double rmax = 1e4;
    std::string super_csv;
    common.add(super_cmd);
    super_flags.add_exponents(super_cmd);
    super_flags.add_barrier(super_cmd);
    super_cmd->add_option("--points", points, "certification grid size")->capture_default_str();
    super_cmd->add_option("--rmax", rmax, "largest certification radius")->capture_default_str();
    super_cmd->add_option("--csv", super_csv, "write (radius, v, grad_norm, p_laplacian, residual) here");

    auto* testfn_cmd = app.add_subcommand("testfn", "rescaled test-function integrals and scaling fits");
    std::string variant = "power";
    double kappa = 0.0, theta = 0.0;
    std::vector<double> Ts;
    std::string testfn_csv;
    common.add(testfn_cmd);
    testfn_flags.add_exponents(testfn_cmd);
    testfn_flags.add_data(testfn_cmd, "gaussian", "constant");
    testfn_cmd->add_option("--variant", variant, "power | log")->check(CLI::IsMember({"power", "log"}));
    auto* o_kappa = testfn_cmd->add_option("--kappa", kappa, "spatial scaling exponent (power variant)");
    auto* o_theta = testfn_cmd->add_option("--theta", theta, "log scaling exponent (log variant)");
    testfn_cmd->add_option("--T", Ts, "scales T (>= 10), increasing")->delimiter(',');
    testfn_cmd->add_option("--csv", testfn_csv, "write (T, I1, I2, F, U0) here instead of stdout");

    auto* simulate_cmd = app.add_subcommand("simulate", "radial simulation of one instance");
    common.add(simulate_cmd);
    simulate_flags.add_exponents(simulate_cmd);
    simulate_flags.add_data(simulate_cmd, "gaussian", "gaussian");
    sim_flags.add(simulate_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "classify and simulate over a parameter grid");
    std::string plan_path, sweep_out;
    bool classify_only = false;
    unsigned threads = 0;
    common.add(sweep_cmd);
    sweep_cmd->add_option("--plan", plan_path, "JSON sweep plan")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sweep_out, "output directory (overrides the plan)");
    sweep_cmd->add_flag("--classify-only", classify_only, "skip simulations");
    sweep_cmd->add_option("--threads", threads, "worker count (default PCRIT_THREADS or all cores)");

    auto* report_cmd = app.add_subcommand("report", "re-emit sweep.csv and summary.json from run records");
    std::string runs_dir, report_out;
    common.add(report_cmd);
    report_cmd->add_option("--runs", runs_dir, "directory of run records")->required()->check(CLI::ExistingDirectory);
    report_cmd->add_option("--out", report_out, "output directory (default: parent of the records)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (!common.config_path.empty()) apply_config(app.get_subcommands().front(), common.config_path);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run 'pcrit " << (app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name() + " ")
            << "--help' for usage\n";
        return 2;
    }

    try {
        if (*classify_cmd)
            return do_classify(classify_flags, o_r->count() ? std::optional<double>(r_value) : std::nullopt, common,
                               out);
        if (*super_cmd) return do_supersolution(super_flags, points, rmax, super_csv, common, out);
        if (*testfn_cmd)
            return do_testfn(testfn_flags, variant, o_kappa, kappa, o_theta, theta, Ts, testfn_csv, common, out);
        if (*simulate_cmd) return do_simulate(simulate_flags, sim_flags, common, out);
        if (*sweep_cmd) return do_sweep(plan_path, sweep_out, classify_only, threads, common, out);
        if (*report_cmd) return do_report(runs_dir, report_out, common, out);
    } catch (const UsageFailure& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, out, err);
}

}  // namespace pcrit::cli
