#include "larx/checks.hpp"
#include "larx/cli.hpp"
#include "larx/config.hpp"
#include "larx/error.hpp"
#include "larx/harness.hpp"
#include "larx/io.hpp"
#include "larx/special.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace larx;

namespace {

SeriesTable make_table(const MatrixXd& values, const std::vector<std::string>& names,
                       const std::vector<std::string>& dates)
{
    SeriesTable t;
    t.names = names;
    t.values = values;
    if (dates.empty()) {
        for (Index r = 0; r < values.rows(); ++r) {
            const int q = static_cast<int>(r);
            t.dates.push_back(Date(1990 + q / 4, static_cast<unsigned>(3 * (q % 4) + 1), 1).quarter_end());
        }
    } else {
        for (const auto& d : dates)
            t.dates.push_back(Date::parse(d));
    }
    t.frequency = detect_frequency(t.dates);
    t.validate();
    return t;
}

py::list blocks(const BlockVec& v)
{
    py::list out;
    for (Index i = 0; i < v.blocks(); ++i)
        out.append(VectorXd(v.block(i)));
    return out;
}

py::dict fit_table(const MatrixXd& values, const std::vector<std::string>& names, const std::string& config,
                   const std::vector<std::string>& dates)
{
    const SeriesTable table = make_table(values, names, dates);
    const RunConfig c = parse_config(nlohmann::json::parse(config));
    const ModelSpec spec = resolve_spec(c, table);
    const Dataset data = assemble_dataset(spec, table);
    const FitResult f = fit(data, spec);
    const Prediction p = predict(f, data);
    py::dict d;
    d["w"] = f.w;
    d["phi"] = f.phi;
    d["omega"] = blocks(f.omega);
    d["beta"] = blocks(f.beta);
    d["c"] = f.c;
    d["rho_y"] = f.multipliers.rho_y;
    d["converged"] = f.converged;
    d["iterations"] = f.iterations;
    d["objective"] = f.objective;
    d["latent"] = p.latent;
    d["fitted"] = p.fitted;
    d["residuals"] = p.residuals;
    std::vector<std::string> iso;
    for (const auto& date : data.dates)
        iso.push_back(date.iso());
    d["dates"] = iso;
    return d;
}

py::dict table_dict(const SeriesTable& t)
{
    std::vector<std::string> dates;
    for (const auto& d : t.dates)
        dates.push_back(d.iso());
    py::dict d;
    d["dates"] = dates;
    d["names"] = t.names;
    d["values"] = t.values;
    return d;
}

} // namespace

PYBIND11_MODULE(_pylarx, m)
{
    m.doc() = "Latent ARX estimation";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, (std::string(code_name(e.code())) + ": " + e.what()).c_str());
        }
    });

    m.def("fit", &fit_table, py::arg("values"), py::arg("names"), py::arg("config"), py::arg("dates"));

    m.def(
        "fit_lvmr",
        [](const MatrixXd& y, const MatrixXd& x, const VectorXd& weights, double sigma_y2) {
            const LvmrResult r = fit_lvmr(y, x, WeightVector(weights), sigma_y2);
            py::dict d;
            d["w"] = r.w;
            d["omega"] = r.omega;
            d["rho_y"] = r.rho_y;
            d["c"] = r.c;
            d["canonical_correlation"] = r.canonical_correlation;
            d["converged"] = r.converged;
            return d;
        },
        py::arg("y"), py::arg("x"), py::arg("weights"), py::arg("sigma_y2"));

    m.def(
        "load_csv", [](const std::string& path) { return table_dict(load_csv(path)); }, py::arg("path"));

    m.def(
        "oos_r2",
        [](const VectorXd& actual, const VectorXd& forecast, const VectorXd& benchmark) {
            if (actual.size() != forecast.size() || actual.size() != benchmark.size())
                throw Error(Errc::dimension_mismatch, "oos_r2: series lengths differ");
            std::vector<ForecastRecord> records(static_cast<std::size_t>(actual.size()));
            for (Index i = 0; i < actual.size(); ++i) {
                auto& r = records[static_cast<std::size_t>(i)];
                r.actual = actual(i);
                r.forecast = forecast(i);
                r.benchmark = benchmark(i);
            }
            return oos_r2(records);
        },
        py::arg("actual"), py::arg("forecast"), py::arg("benchmark"));

    m.def(
        "run_property_suite",
        [](std::uint64_t seed) {
            py::list out;
            for (const auto& r : run_property_suite(seed)) {
                py::dict d;
                d["id"] = r.id;
                d["name"] = r.name;
                d["passed"] = r.passed;
                d["detail"] = r.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("seed") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int status = run_cli(args, out, err);
            return py::make_tuple(status, out.str(), err.str());
        },
        py::arg("args"));
}
