// Rationals cross the boundary as "num/den" text; the Python package converts
// them to and from fractions.Fraction. Reports cross as JSON text.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "padicprob/complexity.hpp"
#include "padicprob/frequency.hpp"
#include "padicprob/padic.hpp"
#include "padicprob/realization.hpp"
#include "padicprob/scenario.hpp"
#include "padicprob/stats.hpp"

namespace py = pybind11;
using namespace padicprob;

namespace {

Rational rational(const std::string& text) {
    return Rational::parse(text);
}

std::string verdict_json(const StabilizationVerdict& v) {
    nlohmann::ordered_json doc{{"status", to_string(v.status)}, {"evidence", v.evidence.to_string()}};
    if (v.real_limit) {
        doc["limit"] = v.real_limit->to_string();
    } else if (v.padic_limit) {
        doc["limit"] = v.padic_limit->to_literal();
    } else {
        doc["limit"] = nullptr;
    }
    return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = PADICPROB_VERSION;

    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted", PyExc_ArithmeticError);
    py::register_exception<UnsupportedBase>(m, "UnsupportedBase", PyExc_ValueError);

    // --- p-adic core --------------------------------------------------------

    py::class_<PAdicApprox>(m, "PAdic")
        .def(py::init([](std::uint64_t p, std::int64_t valuation, std::vector<std::uint64_t> digits) {
                 return PAdicApprox(PrimeBase(p), valuation, std::move(digits));
             }),
             py::arg("prime"), py::arg("valuation"), py::arg("digits"))
        .def_static("parse", &PAdicApprox::parse)
        .def_static("zero", [](std::uint64_t p, std::int64_t n) { return PAdicApprox::zero(PrimeBase(p), n); })
        .def_property_readonly("prime", [](const PAdicApprox& x) { return x.base().value(); })
        .def_property_readonly("valuation", &PAdicApprox::valuation)
        .def_property_readonly("digits", &PAdicApprox::digits)
        .def_property_readonly("precision", &PAdicApprox::precision)
        .def_property_readonly("absolute_precision", &PAdicApprox::absolute_precision)
        .def_property_readonly("is_zero", &PAdicApprox::is_zero)
        .def("render", &PAdicApprox::render)
        .def("literal", &PAdicApprox::to_literal)
        .def("rational", [](const PAdicApprox& x) { return from_digits(x).to_string(); })
        .def("truncated", &PAdicApprox::truncated)
        .def("__add__", [](const PAdicApprox& a, const PAdicApprox& b) { return a + b; })
        .def("__sub__", [](const PAdicApprox& a, const PAdicApprox& b) { return a - b; })
        .def("__mul__", [](const PAdicApprox& a, const PAdicApprox& b) { return a * b; })
        .def("__truediv__", [](const PAdicApprox& a, const PAdicApprox& b) { return a / b; })
        .def("__neg__", [](const PAdicApprox& a) { return -a; })
        .def("__eq__", [](const PAdicApprox& a, const PAdicApprox& b) { return a == b; })
        .def("__str__", &PAdicApprox::render)
        .def("__repr__", [](const PAdicApprox& x) { return "PAdic('" + x.to_literal() + "')"; });

    m.def("valuation", [](const std::string& q, std::uint64_t p) { return valuation(rational(q), PrimeBase(p)); });
    m.def("norm", [](const std::string& q, std::uint64_t p) { return norm(rational(q), PrimeBase(p)).to_string(); });
    m.def("distance", [](const std::string& a, const std::string& b, std::uint64_t p) {
        return distance(rational(a), rational(b), PrimeBase(p)).to_string();
    });
    m.def("to_digits", [](const std::string& q, std::uint64_t p, std::int64_t precision) {
        return to_digits(rational(q), PrimeBase(p), precision);
    });
    m.def("hensel_sqrt", [](const std::string& q, std::uint64_t p, std::int64_t precision) {
        return hensel_sqrt(rational(q), PrimeBase(p), precision);
    });
    m.def("is_prime", [](std::uint64_t p) {
        try {
            PrimeBase base(p);
            return true;
        } catch (const std::invalid_argument&) {
            return false;
        }
    });

    // --- sequences, frequency, realization ----------------------------------

    py::class_<EventSequence>(m, "EventSequence")
        .def(py::init<>())
        .def_static("from_string", &EventSequence::from_string)
        .def_static("from_bytes",
                    [](const py::bytes& data, std::size_t length) {
                        const std::string raw = data;
                        const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
                        return EventSequence::from_bytes(bytes, length);
                    })
        .def("to_string", &EventSequence::to_string)
        .def("to_bytes",
             [](const EventSequence& s) {
                 const auto bytes = s.to_bytes();
                 return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
             })
        .def("count_ones", py::overload_cast<std::size_t>(&EventSequence::count_ones, py::const_))
        .def("__len__", &EventSequence::size)
        .def("__getitem__",
             [](const EventSequence& s, std::int64_t i) {
                 if (i < 0) i += static_cast<std::int64_t>(s.size());
                 if (i < 0 || static_cast<std::size_t>(i) >= s.size()) throw py::index_error();
                 return static_cast<int>(s[static_cast<std::size_t>(i)]);
             })
        .def("__eq__", [](const EventSequence& a, const EventSequence& b) { return a == b; });

    py::class_<CheckpointPlan>(m, "CheckpointPlan")
        .def_property_readonly("prime", [](const CheckpointPlan& pl) { return pl.base.value(); })
        .def_readonly("target", &CheckpointPlan::target)
        .def_readonly("depth", &CheckpointPlan::depth)
        .def_readonly("shift", &CheckpointPlan::shift)
        .def_property_readonly("rows",
                               [](const CheckpointPlan& pl) {
                                   std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
                                   for (const auto& r : pl.rows) rows.emplace_back(r.total, r.ones);
                                   return rows;
                               })
        .def("checkpoints", &CheckpointPlan::checkpoints)
        .def("to_csv", &CheckpointPlan::to_csv);

    m.def("plan", &plan, py::arg("target"), py::arg("depth"), py::arg("growth") = 1.0);
    m.def(
        "generate",
        [](const CheckpointPlan& pl, const std::string& fill) { return generate(pl, FillPolicy::parse(fill)); },
        py::arg("plan"), py::arg("fill") = "block");
    m.def("verify", [](const EventSequence& seq, const CheckpointPlan& pl) {
        return verify(seq, pl.target, pl.depth, pl.rows).to_json();
    });

    m.def(
        "classify_collective",
        [](const EventSequence& seq, std::uint64_t p, std::vector<std::uint64_t> checkpoints, double tolerance,
           std::size_t tail, std::int64_t digits) {
            CollectiveParams params;
            params.checkpoints = std::move(checkpoints);
            params.tolerance = tolerance;
            params.tail = tail;
            params.digits = digits;
            const auto report = classify_collective(seq, PrimeBase(p), params);
            return py::make_tuple(to_string(report.kind), verdict_json(report.real), verdict_json(report.padic),
                                  report.trace.to_csv());
        },
        py::arg("seq"), py::arg("prime"), py::arg("checkpoints") = std::vector<std::uint64_t>{},
        py::arg("tolerance") = 1e-3, py::arg("tail") = 3, py::arg("digits") = 8);

    // --- complexity ---------------------------------------------------------

    m.def("lz76", &lz76);
    m.def("profile", [](const EventSequence& seq, double growth_base) {
        std::vector<std::pair<std::uint64_t, double>> points;
        for (const auto& p : profile(seq, growth_base).points) points.emplace_back(p.n, p.complexity);
        return points;
    });
    m.def(
        "fit_growth",
        [](const std::vector<std::pair<std::uint64_t, double>>& points, double dead_zone, double ceiling) {
            ComplexityProfile pr{"python", {}};
            for (const auto& [n, c] : points) pr.points.push_back({n, c});
            return fit_growth(pr, GrowthThresholds{dead_zone, ceiling}).to_json();
        },
        py::arg("points"), py::arg("dead_zone") = 0.5, py::arg("ceiling") = 0.25);

    // --- interference -------------------------------------------------------

    m.def("run_scenario", [](const std::string& spec_text) {
        const auto spec = ScenarioSpec::parse(spec_text);
        const auto records = run_scenario(spec);
        return py::make_tuple(to_ndjson(spec, records), scenario_metrics(spec, records).dump());
    });
    m.def("canonical_spec", [](const std::string& spec_text) { return ScenarioSpec::parse(spec_text).to_json().dump(); });
    m.def("spec_hash", [](const std::string& spec_text) { return ScenarioSpec::parse(spec_text).hash(); });

    m.def("dispersion_test", [](const std::vector<std::uint64_t>& counts, double alpha) {
        return poisson_dispersion_test(counts, alpha).to_json();
    });

    // --- command line -------------------------------------------------------

    m.def("cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    });
}
