#include "larx/cli.hpp"

#include "larx/checks.hpp"
#include "larx/config.hpp"
#include "larx/diagnostics.hpp"
#include "larx/error.hpp"
#include "larx/harness.hpp"
#include "larx/io.hpp"
#include "larx/special.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace larx {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string command;
    std::string config;
    std::vector<std::string> data;
    std::string out_dir;
    std::string format = "json";
    std::string variant;
    std::optional<std::uint64_t> seed;
};

// Artifact name and contents, in the order they are written.
struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::string stdout_json;
    std::string stdout_csv;
};

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json vector_json(const VectorXd& v)
{
    json j = json::array();
    for (Index i = 0; i < v.size(); ++i)
        j.push_back(number(v(i)));
    return j;
}

json named(const std::vector<std::string>& names, const auto& v)
{
    json j = json::object();
    for (std::size_t i = 0; i < names.size(); ++i)
        j[names[i]] = number(v(static_cast<Index>(i)));
    return j;
}

std::string lag_name(int lag)
{
    return "lag" + std::to_string(lag);
}

std::vector<std::string> lag_names(const std::vector<int>& lags)
{
    std::vector<std::string> out;
    for (int l : lags)
        out.push_back(lag_name(l));
    return out;
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

RunConfig load(const Options& o)
{
    if (o.config.empty())
        throw Error(Errc::config, "command '" + o.command + "' needs --config");
    RunConfig c = load_config(o.config);
    if (!o.data.empty()) {
        c.data = o.data;
        c.data_paths.assign(o.data.begin(), o.data.end());
    }
    for (auto& p : c.data_paths)
        p = fs::absolute(p).lexically_normal();
    if (!o.variant.empty())
        c.variant = parse_variant(o.variant);
    return c;
}

json config_json(const RunConfig& c, const SeriesTable* table)
{
    json j = resolved_config(c, table);
    j["data"] = json::array();
    for (const auto& p : c.data_paths)
        j["data"].push_back(p.string());
    return j;
}

Artifacts fit_command(const Options& o)
{
    const RunConfig c = load(o);
    const SeriesTable table = load_data(c);
    const ModelSpec spec = resolve_spec(c, table);
    const Dataset data = assemble_dataset(spec, table);
    const FitResult f = fit(data, spec);
    const Prediction p = predict(f, data);

    json coef;
    coef["c"] = number(f.c);
    coef["w"] = named(spec.dependent.proxies, f.w);
    coef["phi"] = named(lag_names(spec.ar_lags), f.phi);
    coef["groups"] = json::array();
    std::ostringstream csv;
    csv << "block,name,value\n";
    csv << "intercept,c," << format_number(f.c) << '\n';
    for (std::size_t i = 0; i < spec.dependent.proxies.size(); ++i)
        csv << "w," << spec.dependent.proxies[i] << ',' << format_number(f.w(static_cast<Index>(i))) << '\n';
    for (std::size_t i = 0; i < spec.ar_lags.size(); ++i)
        csv << "phi," << lag_name(spec.ar_lags[i]) << ',' << format_number(f.phi(static_cast<Index>(i))) << '\n';
    for (std::size_t j = 0; j < spec.groups.size(); ++j) {
        const auto& g = spec.groups[j];
        const auto jj = static_cast<Index>(j);
        coef["groups"].push_back({{"name", g.name},
                                  {"omega", named(g.proxies, f.omega.block(jj))},
                                  {"beta", named(lag_names(g.lags), f.beta.block(jj))}});
        for (std::size_t i = 0; i < g.proxies.size(); ++i)
            csv << "omega:" << g.name << ',' << g.proxies[i] << ','
                << format_number(f.omega.block(jj)(static_cast<Index>(i))) << '\n';
        for (std::size_t i = 0; i < g.lags.size(); ++i)
            csv << "beta:" << g.name << ',' << lag_name(g.lags[i]) << ','
                << format_number(f.beta.block(jj)(static_cast<Index>(i))) << '\n';
    }
    csv << "multiplier,rho_y," << format_number(f.multipliers.rho_y) << '\n';
    csv << "multiplier,rho_l," << format_number(f.multipliers.rho_l) << '\n';
    for (Index i = 0; i < f.multipliers.lambda_x.size(); ++i)
        csv << "multiplier,lambda_x" << i << ',' << format_number(f.multipliers.lambda_x(i)) << '\n';
    for (Index i = 0; i < f.multipliers.lambda_p.size(); ++i)
        csv << "multiplier,lambda_p" << i << ',' << format_number(f.multipliers.lambda_p(i)) << '\n';

    json residuals;
    residuals["dependent_variance"] = number(f.residuals.dependent_variance);
    residuals["dependent_sum"] = f.residuals.dependent_sum ? number(*f.residuals.dependent_sum) : json(nullptr);
    residuals["group_variance"] = json::array();
    residuals["group_sum"] = json::array();
    for (const auto& v : f.residuals.group_variance)
        residuals["group_variance"].push_back(v ? number(*v) : json(nullptr));
    for (const auto& v : f.residuals.group_sum)
        residuals["group_sum"].push_back(v ? number(*v) : json(nullptr));

    json views = json::array();
    for (Coefficient which : {Coefficient::w, Coefficient::phi, Coefficient::omega, Coefficient::beta}) {
        json v;
        v["coefficient"] = std::string(coefficient_name(which));
        try {
            const OlsView view = ols_view(f, data, which);
            v["fit"] = vector_json(view.fit_coefficients);
            v["ols"] = vector_json(view.ols_coefficients);
            v["ols_intercept"] = number(view.ols_intercept);
            v["stderr"] = vector_json(conditional_stderr(view));
            v["agreement_gap"] = number(view.agreement_gap);
        } catch (const Error& e) {
            v["unavailable"] = {{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
        }
        views.push_back(v);
    }

    const Index params = spec.parameter_count();
    json report;
    report["label"] = c.label;
    report["variant"] = variant_name(c.variant);
    report["config"] = config_json(c, &table);
    report["sample"] = {{"rows", data.rows()},
                        {"first", data.dates.empty() ? json(nullptr) : json(data.dates.front().iso())},
                        {"last", data.dates.empty() ? json(nullptr) : json(data.dates.back().iso())},
                        {"parameter_count", params},
                        {"dof", data.rows() - params}};
    report["coefficients"] = coef;
    report["multipliers"] = {{"rho_y", number(f.multipliers.rho_y)},
                             {"rho_l", number(f.multipliers.rho_l)},
                             {"lambda_x", vector_json(f.multipliers.lambda_x)},
                             {"lambda_p", vector_json(f.multipliers.lambda_p)}};
    report["constraint_residuals"] = residuals;
    report["convergence"] = {{"converged", f.converged},
                             {"iterations", f.iterations},
                             {"objective", number(f.objective)},
                             {"initial_objective", number(f.initial_objective)},
                             {"pseudo_inverse_used", f.pseudo_inverse_used}};
    report["ols_views"] = views;

    std::ostringstream series;
    series << "date,latent,fitted,residual\n";
    for (Index i = 0; i < data.rows(); ++i)
        series << data.dates[static_cast<std::size_t>(i)].iso() << ',' << format_number(p.latent(i)) << ','
               << format_number(p.fitted(i)) << ',' << format_number(p.residuals(i)) << '\n';

    Artifacts a;
    a.stdout_json = dump(report);
    a.stdout_csv = csv.str();
    a.files = {{"fit.json", a.stdout_json}, {"fit.csv", a.stdout_csv}, {"fitted.csv", series.str()}};
    return a;
}

Artifacts forecast_command(const Options& o)
{
    const RunConfig c = load(o);
    const SeriesTable table = load_data(c);
    const ModelSpec spec = resolve_spec(c, table);
    const ForecastRun run = rolling_oos_forecast(table, spec, c.label);

    std::ostringstream csv;
    csv << "date,actual,forecast,benchmark,skipped,reason\n";
    json records = json::array();
    Index skipped = 0;
    for (const auto& r : run.records) {
        std::string reason = r.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        csv << r.date.iso() << ',' << format_number(r.actual) << ',' << (r.skipped ? "" : format_number(r.forecast))
            << ',' << (r.skipped ? "" : format_number(r.benchmark)) << ',' << (r.skipped ? 1 : 0) << ',' << reason << '\n';
        records.push_back({{"date", r.date.iso()},
                           {"actual", number(r.actual)},
                           {"forecast", r.skipped ? json(nullptr) : number(r.forecast)},
                           {"benchmark", r.skipped ? json(nullptr) : number(r.benchmark)},
                           {"skipped", r.skipped},
                           {"reason", r.reason},
                           {"history_rows", r.history_rows},
                           {"dof", r.dof},
                           {"iterations", r.iterations}});
        skipped += r.skipped ? 1 : 0;
    }
    json summary;
    summary["label"] = run.label;
    summary["variant"] = variant_name(c.variant);
    summary["config"] = config_json(c, &table);
    summary["oos_r2"] = run.oos_r2 ? number(*run.oos_r2) : json(nullptr);
    summary["windows"] = run.records.size();
    summary["usable"] = run.usable();
    summary["skipped"] = skipped;
    summary["records"] = records;

    Artifacts a;
    a.stdout_json = dump(summary);
    a.stdout_csv = csv.str();
    a.files = {{"forecast.json", a.stdout_json}, {"forecast.csv", a.stdout_csv}};
    return a;
}

Artifacts caa_command(const Options& o, std::ostream& err)
{
    const RunConfig c = load(o);
    const SeriesTable table = load_data(c);
    ModelSpec spec = resolve_spec(c, table);
    // Latent AR(1) in the dependent proxies, no exogenous groups.
    spec.dependent.proxies = c.dependent.proxies.empty() ? spec.dependent.proxies : c.dependent.proxies;
    spec.dependent.sum_target.reset();
    spec.ar_lags = {1};
    spec.groups.clear();
    const Dataset data = assemble_dataset(spec, table);
    const CaaDecomposition d = caa_decompose(data.moments());
    if (d.warning)
        err << json({{"warning", *d.warning}}).dump() << '\n';

    const auto& names = spec.dependent.proxies;
    std::ostringstream csv;
    csv << "rank,eigenvalue";
    for (const auto& n : names)
        csv << ',' << n;
    csv << '\n';
    json pairs = json::array();
    for (Index i = 0; i < d.eigenvalues.size(); ++i) {
        csv << i + 1 << ',' << format_number(d.eigenvalues(i));
        for (Index r = 0; r < d.eigenvectors.rows(); ++r)
            csv << ',' << format_number(d.eigenvectors(r, i));
        csv << '\n';
        pairs.push_back({{"rank", i + 1},
                         {"eigenvalue", number(d.eigenvalues(i))},
                         {"weights", named(names, d.eigenvectors.col(i))}});
    }
    json j;
    j["label"] = c.label;
    j["rows"] = data.rows();
    j["eigenpairs"] = pairs;
    j["stationarity_gap"] = number(d.stationarity_gap);
    j["warning"] = d.warning ? json(*d.warning) : json(nullptr);

    Artifacts a;
    a.stdout_json = dump(j);
    a.stdout_csv = csv.str();
    a.files = {{"caa.json", a.stdout_json}, {"caa.csv", a.stdout_csv}};
    return a;
}

Artifacts synth_command(const Options& o)
{
    const RunConfig c = load(o);
    const ModelSpec spec = resolve_spec(c);
    SynthParams params;
    params.rows = c.synth.rows;
    params.c = c.synth.c;
    if (c.synth.phi)
        params.phi = Eigen::Map<const VectorXd>(c.synth.phi->data(), static_cast<Index>(c.synth.phi->size()));
    const std::uint64_t seed = o.seed.value_or(c.synth.seed);
    const SynthOutput s = synth_generate(spec, params, c.synth.noise_sd, seed);

    json truth;
    truth["seed"] = seed;
    truth["noise_sd"] = number(s.truth.noise_sd);
    truth["c"] = number(s.truth.c);
    truth["w"] = named(spec.dependent.proxies, s.truth.w);
    truth["phi"] = named(lag_names(spec.ar_lags), s.truth.phi);
    truth["groups"] = json::array();
    for (std::size_t j = 0; j < spec.groups.size(); ++j) {
        const auto jj = static_cast<Index>(j);
        const auto& g = spec.groups[j];
        truth["groups"].push_back({{"name", g.name},
                                   {"omega", named(g.proxies, s.truth.omega.block(jj))},
                                   {"beta", named(lag_names(g.lags), s.truth.beta.block(jj))}});
    }

    std::ostringstream csv;
    write_csv(csv, s.table);
    std::ostringstream latent;
    latent << "date,latent_y";
    for (const auto& g : spec.groups)
        latent << ",latent_" << g.name;
    latent << '\n';
    for (Index r = 0; r < s.table.rows(); ++r) {
        latent << s.table.dates[static_cast<std::size_t>(r)].iso() << ',' << format_number(s.truth.latent_y(r));
        for (Index j = 0; j < s.truth.latent_x.cols(); ++j)
            latent << ',' << format_number(s.truth.latent_x(r, j));
        latent << '\n';
    }

    Artifacts a;
    a.stdout_json = dump(truth);
    a.stdout_csv = csv.str();
    a.files = {{"synth.csv", a.stdout_csv}, {"truth.json", a.stdout_json}, {"latent.csv", latent.str()}};
    return a;
}

Artifacts check_command(const Options& o, bool& all_passed)
{
    std::uint64_t seed = 0;
    if (!o.config.empty())
        seed = load(o).solver.seed;
    seed = o.seed.value_or(seed);
    const auto results = run_property_suite(seed);
    all_passed = true;
    json checks = json::array();
    std::ostringstream csv;
    csv << "id,name,passed,detail\n";
    for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        checks.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        csv << r.id << ',' << r.name << ',' << (r.passed ? 1 : 0) << ',' << detail << '\n';
    }
    json j{{"seed", seed}, {"passed", all_passed}, {"checks", checks}};
    Artifacts a;
    a.stdout_json = dump(j);
    a.stdout_csv = csv.str();
    a.files = {{"check.json", a.stdout_json}, {"check.csv", a.stdout_csv}};
    return a;
}

void emit(const Artifacts& a, const Options& o, std::ostream& out)
{
    if (o.out_dir.empty()) {
        out << (o.format == "csv" ? a.stdout_csv : a.stdout_json);
        return;
    }
    const fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(Errc::io, "cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, body] : a.files) {
        std::ofstream f(dir / name, std::ios::binary);
        f << body;
        if (!f)
            throw Error(Errc::io, "cannot write " + (dir / name).string());
    }
}

void report_error(std::ostream& err, std::string_view code, const std::string& message)
{
    err << json({{"error", {{"code", code}, {"message", message}}}}).dump() << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Latent ARX estimation, forecasting and checks", "larx"};
    app.add_option("command", o.command, "fit | forecast | caa | synth | check")
        ->required()
        ->check(CLI::IsMember({"fit", "forecast", "caa", "synth", "check"}));
    app.add_option("--config", o.config, "Run config (JSON)");
    app.add_option("--data", o.data, "Data CSV, replaces the config's data list (repeatable)");
    app.add_option("--out", o.out_dir, "Output directory; without it the main artifact goes to stdout");
    app.add_option("--format", o.format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--variant", o.variant, "Model variant override");
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed override for synth and check");

    std::vector<std::string> argv_store{"larx"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return 2;
    }
    if (seed_opt->count() > 0)
        o.seed = seed;

    try {
        bool passed = true;
        Artifacts a;
        if (o.command == "fit")
            a = fit_command(o);
        else if (o.command == "forecast")
            a = forecast_command(o);
        else if (o.command == "caa")
            a = caa_command(o, err);
        else if (o.command == "synth")
            a = synth_command(o);
        else
            a = check_command(o, passed);
        emit(a, o, out);
        return passed ? 0 : 1;
    } catch (const Error& e) {
        report_error(err, code_name(e.code()), e.what());
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
    }
    return 1;
}

} // namespace larx
