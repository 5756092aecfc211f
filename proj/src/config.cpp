#include "larx/config.hpp"

#include "larx/error.hpp"
#include "larx/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace larx {

using nlohmann::json;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

constexpr std::string_view kFullSample = "full_sample";

Error bad(const std::string& what)
{
    return Error(Errc::config, what);
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!j.is_object())
        throw bad(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed)
            known = known || key == a;
        if (!known)
            throw bad("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw bad(where + "." + key + " has the wrong type");
    }
}

std::optional<TargetSetting> parse_target(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    const json& v = j.at(key);
    TargetSetting t;
    if (v.is_number()) {
        t.literal = v.get<double>();
        return t;
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == kFullSample) {
            t.full_sample = true;
            return t;
        }
        if (s.rfind(std::string(kFullSample) + ":", 0) == 0 && s.size() > kFullSample.size() + 1) {
            t.full_sample = true;
            t.full_sample_of = s.substr(kFullSample.size() + 1);
            return t;
        }
    }
    throw bad(where + "." + key + " must be a number, \"full_sample\" or \"full_sample:<series>\"");
}

std::vector<std::string> string_list(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key))
        return {};
    auto v = get<std::vector<std::string>>(j, key, where);
    std::set<std::string> seen;
    for (const auto& s : v)
        if (s.empty() || !seen.insert(s).second)
            throw bad(where + "." + key + " has an empty or repeated name");
    return v;
}

BlockSetting parse_block(const json& j, const std::string& where, bool group)
{
    if (group)
        check_keys(j, {"name", "proxies", "observed", "lags", "variance_target", "sum_target", "constrained_version"}, where);
    else
        check_keys(j, {"proxies", "observed", "variance_target", "sum_target"}, where);
    BlockSetting b;
    b.name = group ? get<std::string>(j, "name", where) : "dependent";
    b.proxies = string_list(j, "proxies", where);
    if (j.contains("observed") && !j.at("observed").is_null())
        b.observed = get<std::string>(j, "observed", where);
    if (b.proxies.empty() && !b.observed)
        throw bad(where + " needs proxies or an observed series");
    if (group) {
        if (j.contains("lags"))
            b.lags = get<std::vector<int>>(j, "lags", where);
        if (j.contains("constrained_version"))
            b.constrained_version = get<int>(j, "constrained_version", where);
    }
    b.variance = parse_target(j, "variance_target", where);
    if (j.contains("sum_target") && !j.at("sum_target").is_null()) {
        if (!j.at("sum_target").is_number())
            throw bad(where + ".sum_target must be a number");
        b.sum = j.at("sum_target").get<double>();
    }
    return b;
}

std::optional<std::string> observed_of(const BlockSetting& b)
{
    if (b.observed)
        return b.observed;
    if (b.proxies.size() == 1)
        return b.proxies.front();
    return std::nullopt;
}

double full_sample_variance(const SeriesTable& t, const std::string& name, const std::vector<DateWindow>& outliers)
{
    const Index col = t.column(name);
    double sum = 0.0, sq = 0.0;
    Index count = 0;
    for (Index r = 0; r < t.rows(); ++r) {
        const double v = t.values(r, col);
        const Date& d = t.dates[static_cast<std::size_t>(r)];
        const bool excluded = std::any_of(outliers.begin(), outliers.end(), [&](const DateWindow& w) { return w.contains(d); });
        if (std::isnan(v) || excluded)
            continue;
        sum += v;
        ++count;
    }
    if (count < 2)
        throw Error(Errc::degenerate_sample, "full-sample variance of '" + name + "' needs at least 2 observations");
    const double mean = sum / static_cast<double>(count);
    for (Index r = 0; r < t.rows(); ++r) {
        const double v = t.values(r, col);
        const Date& d = t.dates[static_cast<std::size_t>(r)];
        const bool excluded = std::any_of(outliers.begin(), outliers.end(), [&](const DateWindow& w) { return w.contains(d); });
        if (!std::isnan(v) && !excluded)
            sq += (v - mean) * (v - mean);
    }
    const double var = sq / static_cast<double>(count);
    if (!(var > 0.0))
        throw Error(Errc::zero_variance, "full-sample variance of '" + name + "' is zero");
    return var;
}

std::optional<double> resolve_target(const std::optional<TargetSetting>& t, const BlockSetting& b, const RunConfig& c,
                                     const SeriesTable* table)
{
    if (!t)
        return std::nullopt;
    if (t->literal)
        return t->literal;
    if (!table)
        throw bad("block '" + b.name + "' uses a full-sample target, which needs data");
    std::string name = t->full_sample_of;
    if (name.empty())
        name = observed_of(b).value_or(b.proxies.empty() ? std::string() : b.proxies.front());
    return full_sample_variance(*table, name, c.sample.outliers);
}

std::vector<std::string> block_proxies(const BlockSetting& b, bool latent)
{
    if (latent) {
        if (b.proxies.empty())
            throw bad("block '" + b.name + "' has no proxies for a latent variant");
        return b.proxies;
    }
    const auto obs = observed_of(b);
    if (!obs)
        throw bad("block '" + b.name + "' has no observed series for a non-latent variant");
    return {*obs};
}

ModelSpec build_spec(const RunConfig& c, const SeriesTable* table)
{
    const bool ly = latent_dependent(c.variant), lx = latent_explanatory(c.variant);
    ModelSpec s;
    s.dependent.proxies = block_proxies(c.dependent, ly);
    s.dependent.variance_target = resolve_target(c.dependent.variance, c.dependent, c, table).value_or(1.0);
    if (ly)
        s.dependent.sum_target = c.dependent.sum;
    s.ar_lags = c.ar_lags;
    for (const auto& b : c.groups) {
        GroupSpec g;
        g.name = b.name;
        g.proxies = block_proxies(b, lx);
        g.lags = b.lags;
        g.constrained_version = b.constrained_version;
        // Targets on a single observed regressor only rescale β, so they apply to latent groups.
        if (lx) {
            g.variance_target = resolve_target(b.variance, b, c, table);
            g.sum_target = b.sum;
        }
        s.groups.push_back(g);
    }
    s.solver = c.solver;
    s.sample = c.sample;
    s.validate();
    return s;
}

json target_json(const std::optional<TargetSetting>& t, const BlockSetting& b, const RunConfig& c, const SeriesTable* table)
{
    if (!t)
        return nullptr;
    if (t->literal || table)
        return *resolve_target(t, b, c, table);
    return t->full_sample_of.empty() ? std::string(kFullSample) : std::string(kFullSample) + ":" + t->full_sample_of;
}

json block_json(const BlockSetting& b, const RunConfig& c, const SeriesTable* table, bool group)
{
    json j;
    if (group)
        j["name"] = b.name;
    j["proxies"] = b.proxies;
    j["observed"] = b.observed ? json(*b.observed) : json(nullptr);
    if (group)
        j["lags"] = b.lags;
    j["variance_target"] = target_json(b.variance, b, c, table);
    j["sum_target"] = b.sum ? json(*b.sum) : json(nullptr);
    if (group)
        j["constrained_version"] = b.constrained_version;
    return j;
}

} // namespace

Variant parse_variant(const std::string& name)
{
    for (Variant v : {Variant::baseline, Variant::latent_x, Variant::latent_y, Variant::latent_both, Variant::reversed_baseline,
                      Variant::reversed_latent_x, Variant::reversed_latent_y, Variant::reversed_latent_both})
        if (variant_name(v) == name)
            return v;
    throw bad("unknown model variant '" + name + "'");
}

std::string variant_name(Variant v)
{
    switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::latent_x: return "latent_x";
    case Variant::latent_y: return "latent_y";
    case Variant::latent_both: return "latent_both";
    case Variant::reversed_baseline: return "reversed_baseline";
    case Variant::reversed_latent_x: return "reversed_latent_x";
    case Variant::reversed_latent_y: return "reversed_latent_y";
    case Variant::reversed_latent_both: return "reversed_latent_both";
    }
    return "?";
}

bool latent_dependent(Variant v)
{
    return v == Variant::latent_y || v == Variant::latent_both || v == Variant::reversed_latent_y ||
           v == Variant::reversed_latent_both;
}

bool latent_explanatory(Variant v)
{
    return v == Variant::latent_x || v == Variant::latent_both || v == Variant::reversed_latent_x ||
           v == Variant::reversed_latent_both;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base)
{
    check_keys(j, {"label", "data", "transform", "variant", "dependent", "ar_lags", "groups", "solver", "sample", "synth"},
               "config");
    RunConfig c;
    if (j.contains("label"))
        c.label = get<std::string>(j, "label", "config");
    if (j.contains("data"))
        c.data = get<std::vector<std::string>>(j, "data", "config");
    for (const auto& d : c.data)
        c.data_paths.push_back(std::filesystem::path(d).is_absolute() ? std::filesystem::path(d) : base / d);
    if (j.contains("transform")) {
        const auto t = get<std::string>(j, "transform", "config");
        if (t == "log_returns")
            c.transform = Transform::log_returns;
        else if (t == "none")
            c.transform = Transform::none;
        else
            throw bad("transform must be \"log_returns\" or \"none\"");
    }
    if (j.contains("variant"))
        c.variant = parse_variant(get<std::string>(j, "variant", "config"));
    if (!j.contains("dependent"))
        throw bad("config needs a dependent block");
    c.dependent = parse_block(j.at("dependent"), "dependent", false);
    if (j.contains("ar_lags"))
        c.ar_lags = get<std::vector<int>>(j, "ar_lags", "config");
    if (j.contains("groups")) {
        if (!j.at("groups").is_array())
            throw bad("groups must be an array");
        for (std::size_t i = 0; i < j.at("groups").size(); ++i)
            c.groups.push_back(parse_block(j.at("groups")[i], "groups[" + std::to_string(i) + "]", true));
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, {"max_iter", "tol", "objective_tol", "seed"}, "solver");
        if (s.contains("max_iter"))
            c.solver.max_iter = get<int>(s, "max_iter", "solver");
        if (s.contains("tol"))
            c.solver.tol = get<double>(s, "tol", "solver");
        if (s.contains("objective_tol"))
            c.solver.objective_tol = get<double>(s, "objective_tol", "solver");
        if (s.contains("seed"))
            c.solver.seed = get<std::uint64_t>(s, "seed", "solver");
    }
    if (j.contains("sample")) {
        const json& s = j.at("sample");
        check_keys(s, {"half_life", "min_dof", "outliers", "forecast_start"}, "sample");
        if (s.contains("half_life") && !s.at("half_life").is_null()) {
            c.sample.half_life = get<double>(s, "half_life", "sample");
            if (!(c.sample.half_life > 0.0))
                throw bad("sample.half_life must be positive");
        }
        if (s.contains("min_dof"))
            c.sample.min_dof = get<int>(s, "min_dof", "sample");
        if (s.contains("outliers")) {
            for (const auto& o : s.at("outliers")) {
                check_keys(o, {"from", "to"}, "sample.outliers");
                DateWindow w{Date::parse(get<std::string>(o, "from", "sample.outliers")),
                             Date::parse(get<std::string>(o, "to", "sample.outliers"))};
                if (w.to < w.from)
                    throw bad("outlier window ends before it starts");
                c.sample.outliers.push_back(w);
            }
        }
        if (s.contains("forecast_start") && !s.at("forecast_start").is_null())
            c.sample.forecast_start = Date::parse(get<std::string>(s, "forecast_start", "sample"));
    }
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        check_keys(s, {"rows", "noise_sd", "seed", "phi", "c"}, "synth");
        if (s.contains("rows"))
            c.synth.rows = get<Index>(s, "rows", "synth");
        if (s.contains("noise_sd"))
            c.synth.noise_sd = get<double>(s, "noise_sd", "synth");
        if (s.contains("seed"))
            c.synth.seed = get<std::uint64_t>(s, "seed", "synth");
        if (s.contains("phi") && !s.at("phi").is_null())
            c.synth.phi = get<std::vector<double>>(s, "phi", "synth");
        if (s.contains("c"))
            c.synth.c = get<double>(s, "c", "synth");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io, "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw bad("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, path.parent_path());
}

SeriesTable load_data(const RunConfig& c)
{
    if (c.data_paths.empty())
        throw bad("no data files given");
    std::vector<SeriesTable> tables;
    for (const auto& p : c.data_paths)
        tables.push_back(load_csv(p));
    SeriesTable t = align_tables(std::move(tables));
    return c.transform == Transform::log_returns ? log_returns(t) : t;
}

ModelSpec resolve_spec(const RunConfig& c, const SeriesTable& table)
{
    return build_spec(c, &table);
}

ModelSpec resolve_spec(const RunConfig& c)
{
    return build_spec(c, nullptr);
}

json resolved_config(const RunConfig& c, const SeriesTable* table)
{
    json j;
    j["label"] = c.label;
    j["data"] = c.data;
    j["transform"] = c.transform == Transform::log_returns ? "log_returns" : "none";
    j["variant"] = variant_name(c.variant);
    j["dependent"] = block_json(c.dependent, c, table, false);
    j["ar_lags"] = c.ar_lags;
    j["groups"] = json::array();
    for (const auto& g : c.groups)
        j["groups"].push_back(block_json(g, c, table, true));
    j["solver"] = {{"max_iter", c.solver.max_iter}, {"tol", c.solver.tol}, {"objective_tol", c.solver.objective_tol},
                   {"seed", c.solver.seed}};
    json outliers = json::array();
    for (const auto& w : c.sample.outliers)
        outliers.push_back({{"from", w.from.iso()}, {"to", w.to.iso()}});
    j["sample"] = {{"half_life", std::isinf(c.sample.half_life) ? json(nullptr) : json(c.sample.half_life)},
                   {"min_dof", c.sample.min_dof},
                   {"outliers", outliers},
                   {"forecast_start", c.sample.forecast_start ? json(c.sample.forecast_start->iso()) : json(nullptr)}};
    j["synth"] = {{"rows", c.synth.rows},
                  {"noise_sd", c.synth.noise_sd},
                  {"seed", c.synth.seed},
                  {"phi", c.synth.phi ? json(*c.synth.phi) : json(nullptr)},
                  {"c", c.synth.c}};
    return j;
}

} // namespace larx
