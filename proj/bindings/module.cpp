// Python face of the harness: parse/serialize scenarios, run them, inspect
// logs. Everything crosses the boundary as plain strings, ints, and dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skytest/harness.hpp"
#include "skytest/scenario.hpp"
#include "skytest/telemetry.hpp"
#include "skytest/worldgen.hpp"

namespace py = pybind11;
using namespace skytest;

namespace {

Scenario parse_or_throw(const std::string& text) {
    Expected<Scenario, ParseError> parsed = parse_scenario(text);
    if (!parsed.ok()) {
        const ParseError& e = parsed.error();
        throw py::value_error("line " + std::to_string(e.line) + ": " + e.message +
                              (e.token.empty() ? "" : " ('" + e.token + "')"));
    }
    return parsed.value();
}

TelemetryLog parse_log_or_throw(const std::string& text) {
    Expected<TelemetryLog, LogError> log = parse_log(text);
    if (!log.ok()) {
        throw py::value_error("record " + std::to_string(log.error().record_index) +
                              ": " + log.error().message);
    }
    return log.value();
}

MlsPreset preset_or_throw(const std::string& name) {
    MlsPreset p;
    if (!mls_preset_from_name(name, p)) throw py::value_error("unknown preset " + name);
    return p;
}

py::dict metrics_dict(const RunMetrics& m) {
    py::dict d;
    d["outcome"] = outcome_name(m.outcome);
    d["abort_reason"] = abort_reason_name(m.abort_reason);
    d["final_phase"] = phase_name(m.final_phase);
    d["flight_time"] = m.flight_time;
    if (m.landed) {
        d["landing_error"] = m.landing_error;
        d["touchdown_time"] = m.touchdown_time;
    } else {
        d["landing_error"] = py::none();
        d["touchdown_time"] = py::none();
    }
    d["detection_availability"] = m.detection_availability;
    d["commands_issued"] = m.commands_issued;
    d["commands_delivered"] = m.commands_delivered;
    d["recoveries"] = m.recoveries;
    d["cmd_latencies"] = m.cmd_latencies;
    d["map_voxels"] = m.map_voxels;
    d["map_bytes"] = m.map_bytes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_skytest, mod) {
    mod.doc() = "deterministic marker-landing SIL harness";

    py::class_<Scenario>(mod, "Scenario")
        .def_property_readonly("name", [](const Scenario& s) { return s.name; })
        .def_property("seed", [](const Scenario& s) { return s.seed; },
                      [](Scenario& s, std::uint64_t v) { s.seed = v; })
        .def_property_readonly("stage", [](const Scenario& s) {
            return s.stage == Stage::Sil ? "sil" : "hilemu";
        })
        .def("__repr__", [](const Scenario& s) {
            return "<Scenario '" + s.name + "' seed " + std::to_string(s.seed) + ">";
        });

    mod.def("parse_scenario", &parse_or_throw, py::arg("text"),
            "Parse scenario text; raises ValueError with the offending line.");
    mod.def("canonicalize", &skytest::canonicalize, py::arg("scenario"),
            "Deterministic serialization with every default materialized.");
    mod.def("scenario_hash", &scenario_hash, py::arg("scenario"),
            "FNV-1a 64 of the canonical form, as used in log headers.");
    mod.def(
        "apply_preset",
        [](Scenario& s, const std::string& preset) {
            apply_mls_preset(s, preset_or_throw(preset));
        },
        py::arg("scenario"), py::arg("preset"),
        "Apply a system generation preset (mls1|mls2|mls3|none) in place.");

    mod.def(
        "run",
        [](const Scenario& s) {
            RunResult res = run_scenario(s);
            py::dict d = metrics_dict(res.metrics);
            d["log"] = serialize_log(res.log);
            return d;
        },
        py::arg("scenario"),
        "Run one scenario; returns run metrics plus the serialized log.");

    mod.def(
        "log_info",
        [](const std::string& text) {
            TelemetryLog log = parse_log_or_throw(text);
            py::dict d;
            d["scenario"] = log.header.scenario;
            d["seed"] = log.header.seed;
            d["scnhash"] = log.header.scnhash;
            d["records"] = log.records.size();
            return d;
        },
        py::arg("text"), "Header fields and record count of a serialized log.");

    mod.def(
        "diff_logs",
        [](const std::string& a, const std::string& b,
           const std::map<std::string, double>& tolerances) {
            DiffReport rep =
                diff_logs(parse_log_or_throw(a), parse_log_or_throw(b), tolerances);
            py::list out;
            for (const Divergence& d : rep.divergences) {
                py::dict row;
                row["t_us"] = d.t_us;
                row["channel"] = d.channel;
                row["key"] = d.key;
                row["a"] = d.value_a;
                row["b"] = d.value_b;
                row["note"] = d.note;
                out.append(row);
            }
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("tolerances") = std::map<std::string, double>{},
        "Structured differences between two serialized logs.");

    mod.def(
        "generate",
        [](const std::string& family, int count, std::uint64_t seed) {
            Family f;
            if (!family_from_name(family, f)) {
                throw py::value_error("unknown family " + family);
            }
            Expected<std::vector<Scenario>, WorldgenError> gen =
                generate_family(f, count, seed);
            if (!gen.ok()) throw py::value_error(gen.error().message);
            return gen.value();
        },
        py::arg("family"), py::arg("count"), py::arg("seed"),
        "Deterministically generate a scenario family.");
}
