// skytest: deterministic SIL landing-system test harness.
//
// Exit codes: 0 success, 1 gate/diff/replay failure, 2 usage or scenario
// parse error, 3 corrupt or unusable input file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skytest/harness.hpp"
#include "skytest/scenario.hpp"
#include "skytest/telemetry.hpp"
#include "skytest/worldgen.hpp"

namespace fs = std::filesystem;
using namespace skytest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCorrupt = 3;

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return out.good();
}

int load_scenario(const std::string& path, Scenario& out) {
    std::optional<std::string> text = slurp(path);
    if (!text) {
        std::cerr << path << ": cannot read\n";
        return kExitCorrupt;
    }
    Expected<Scenario, ParseError> parsed = parse_scenario(*text);
    if (!parsed.ok()) {
        const ParseError& e = parsed.error();
        std::cerr << path << ":" << e.line << ": " << e.message;
        if (!e.token.empty()) std::cerr << " ('" << e.token << "')";
        std::cerr << "\n";
        return kExitUsage;
    }
    out = parsed.value();
    return kExitOk;
}

void print_pretty(const TelemetryLog& log) {
    std::printf("SKYLOG %d scenario=%s seed=%llu scnhash=%016llx\n", log.header.version,
                log.header.scenario.c_str(),
                static_cast<unsigned long long>(log.header.seed),
                static_cast<unsigned long long>(log.header.scnhash));
    for (const TelemetryRecord& r : log.records) {
        std::printf("%10.4f %-11s", r.t_us / 1e6, channel_name(r.channel));
        for (const auto& [k, v] : r.payload) {
            std::printf(" %s=%s", k.c_str(), format_value_pretty(v).c_str());
        }
        std::printf("\n");
    }
}

void print_run_summary(const Scenario& scn, const RunMetrics& m) {
    std::printf("scenario   %s\n", scn.name.c_str());
    std::printf("seed       %llu\n", static_cast<unsigned long long>(scn.seed));
    std::printf("outcome    %s", outcome_name(m.outcome));
    if (m.outcome == Outcome::Abort) std::printf(" (%s)", abort_reason_name(m.abort_reason));
    std::printf("\n");
    if (m.landed) {
        std::printf("landing    err %.3f m at t=%.2f s\n", m.landing_error, m.touchdown_time);
    }
    std::printf("flight     %.2f s, %zu commands, %d recoveries\n", m.flight_time,
                m.commands_issued, m.recoveries);
    std::printf("detection  %.3f availability\n", m.detection_availability);
    if (m.map_voxels > 0) {
        std::printf("map        %zu voxels, %zu bytes\n", m.map_voxels, m.map_bytes);
    }
}

int cmd_run(const std::string& file, std::optional<std::uint64_t> seed,
            const std::string& preset_name, const std::string& out_path, bool pretty) {
    MlsPreset preset = MlsPreset::None;
    if (!preset_name.empty() && !mls_preset_from_name(preset_name, preset)) {
        std::cerr << "unknown preset '" << preset_name << "'\n";
        return kExitUsage;
    }
    Scenario scn;
    if (int rc = load_scenario(file, scn); rc != kExitOk) return rc;
    if (seed) scn.seed = *seed;
    apply_mls_preset(scn, preset);

    RunResult res = run_scenario(scn);
    if (!out_path.empty() && !write_log_file(res.log, out_path)) {
        std::cerr << out_path << ": cannot write\n";
        return kExitCorrupt;
    }
    if (pretty) print_pretty(res.log);
    print_run_summary(scn, res.metrics);
    return kExitOk;
}

int cmd_suite(const std::string& dir, int seeds, const std::string& report_path,
              const std::string& gates_path, const std::string& preset_name) {
    MlsPreset preset = MlsPreset::None;
    if (!preset_name.empty() && !mls_preset_from_name(preset_name, preset)) {
        std::cerr << "unknown preset '" << preset_name << "'\n";
        return kExitUsage;
    }
    if (!fs::is_directory(dir)) {
        std::cerr << dir << ": not a directory\n";
        return kExitUsage;
    }
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".scn") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << dir << ": no .scn files\n";
        return kExitUsage;
    }
    std::vector<std::pair<std::string, Scenario>> scenarios;
    for (const std::string& f : files) {
        Scenario scn;
        if (int rc = load_scenario(f, scn); rc != kExitOk) return rc;
        apply_mls_preset(scn, preset);
        scenarios.emplace_back(fs::path(f).filename().string(), std::move(scn));
    }

    SuiteReport report = run_suite(scenarios, seeds);

    std::vector<GateResult> gate_results;
    if (!gates_path.empty()) {
        std::optional<std::string> text = slurp(gates_path);
        if (!text) {
            std::cerr << gates_path << ": cannot read\n";
            return kExitCorrupt;
        }
        Expected<std::vector<Gate>, GateParseError> gates = parse_gates(*text);
        if (!gates.ok()) {
            std::cerr << gates_path << ":" << gates.error().line << ": "
                      << gates.error().message << "\n";
            return kExitUsage;
        }
        Expected<std::vector<GateResult>, GateParseError> evaluated =
            evaluate_gates(report, gates.value());
        if (!evaluated.ok()) {
            std::cerr << gates_path << ": gate " << evaluated.error().line << ": "
                      << evaluated.error().message << "\n";
            return kExitUsage;
        }
        gate_results = evaluated.value();
    }

    std::string json = suite_report_json(report, gate_results, preset, seeds);
    if (!report_path.empty() && !spill(report_path, json)) {
        std::cerr << report_path << ": cannot write\n";
        return kExitCorrupt;
    }

    std::printf("%zu runs over %zu scenarios\n", report.rows.size(), scenarios.size());
    for (const char* key : {"success_rate", "mean_landing_error", "max_landing_error",
                            "collision_rate", "detection_availability"}) {
        auto it = report.metrics.find(key);
        if (it != report.metrics.end()) std::printf("%-24s %.6g\n", key, it->second);
    }
    bool all_pass = true;
    for (const GateResult& g : gate_results) {
        static const char* ops[] = {"<=", ">=", "<", ">"};
        std::printf("%s: %s %s %g (actual %.6g)\n", g.pass ? "PASS" : "FAIL",
                    g.gate.metric.c_str(), ops[static_cast<int>(g.gate.op)],
                    g.gate.threshold, g.actual);
        all_pass = all_pass && g.pass;
    }
    return all_pass ? kExitOk : kExitFailure;
}

// A log pins the scenario by content hash. The sibling .scn files are tried
// with the header seed and every preset until one matches.
std::optional<Scenario> recover_scenario(const TelemetryLog& log,
                                         const std::string& log_path,
                                         const std::string& scenario_hint) {
    std::vector<std::string> candidates;
    if (!scenario_hint.empty()) {
        candidates.push_back(scenario_hint);
    } else {
        fs::path dir = fs::path(log_path).parent_path();
        if (dir.empty()) dir = ".";
        if (fs::is_directory(dir)) {
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (entry.path().extension() == ".scn")
                    candidates.push_back(entry.path().string());
            }
            std::sort(candidates.begin(), candidates.end());
        }
    }
    for (const std::string& file : candidates) {
        std::optional<std::string> text = slurp(file);
        if (!text) continue;
        Expected<Scenario, ParseError> parsed = parse_scenario(*text);
        if (!parsed.ok()) continue;
        for (MlsPreset p :
             {MlsPreset::None, MlsPreset::Mls1, MlsPreset::Mls2, MlsPreset::Mls3}) {
            Scenario scn = parsed.value();
            scn.seed = log.header.seed;
            apply_mls_preset(scn, p);
            if (scenario_hash(scn) == log.header.scnhash) return scn;
        }
    }
    return std::nullopt;
}

int cmd_replay(const std::string& log_path, const std::string& scenario_hint) {
    Expected<TelemetryLog, LogError> stored = read_log_file(log_path);
    if (!stored.ok()) {
        std::cerr << log_path << ": record " << stored.error().record_index << ": "
                  << stored.error().message << "\n";
        return kExitCorrupt;
    }
    std::optional<Scenario> scn =
        recover_scenario(stored.value(), log_path, scenario_hint);
    if (!scn) {
        std::cerr << log_path << ": no .scn matching scnhash "
                  << std::hex << stored.value().header.scnhash << std::dec
                  << " (searched the log's directory; pass --scenario)\n";
        return kExitCorrupt;
    }
    RunResult res = run_scenario(*scn);
    if (serialize_log(res.log) == serialize_log(stored.value())) {
        std::printf("replay ok: %zu records match bit-exactly\n",
                    res.log.records.size());
        return kExitOk;
    }
    DiffReport diff = diff_logs(stored.value(), res.log, {});
    std::printf("replay DIVERGED: %zu difference(s)%s\n", diff.divergences.size(),
                diff.truncated ? " (truncated)" : "");
    for (std::size_t i = 0; i < diff.divergences.size() && i < 5; ++i) {
        const Divergence& d = diff.divergences[i];
        std::printf("  t=%.4f %s %s: %s vs %s %s\n", d.t_us / 1e6, d.channel.c_str(),
                    d.key.c_str(), d.value_a.c_str(), d.value_b.c_str(), d.note.c_str());
    }
    return kExitFailure;
}

int cmd_diff(const std::string& a_path, const std::string& b_path,
             const std::vector<std::string>& tol_args) {
    std::map<std::string, double> tolerances;
    for (const std::string& t : tol_args) {
        auto eq = t.find('=');
        double v = 0.0;
        if (eq == std::string::npos) {
            std::cerr << "--tol expects ch=value, got '" << t << "'\n";
            return kExitUsage;
        }
        try {
            std::size_t used = 0;
            v = std::stod(t.substr(eq + 1), &used);
            if (used != t.size() - eq - 1) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            std::cerr << "--tol expects ch=value, got '" << t << "'\n";
            return kExitUsage;
        }
        tolerances[t.substr(0, eq)] = v;
    }
    Expected<TelemetryLog, LogError> a = read_log_file(a_path);
    if (!a.ok()) {
        std::cerr << a_path << ": record " << a.error().record_index << ": "
                  << a.error().message << "\n";
        return kExitCorrupt;
    }
    Expected<TelemetryLog, LogError> b = read_log_file(b_path);
    if (!b.ok()) {
        std::cerr << b_path << ": record " << b.error().record_index << ": "
                  << b.error().message << "\n";
        return kExitCorrupt;
    }
    DiffReport report = diff_logs(a.value(), b.value(), tolerances);
    if (report.empty()) {
        std::printf("identical (%zu records)\n", a.value().records.size());
        return kExitOk;
    }
    for (const Divergence& d : report.divergences) {
        std::printf("t=%.4f %s %s: %s vs %s", d.t_us / 1e6, d.channel.c_str(),
                    d.key.c_str(), d.value_a.c_str(), d.value_b.c_str());
        if (!d.note.empty()) std::printf(" (%s)", d.note.c_str());
        std::printf("\n");
    }
    if (report.truncated) std::printf("... more differences truncated\n");
    std::printf("%zu difference(s)\n", report.divergences.size());
    return kExitFailure;
}

int cmd_gen(const std::string& family_arg, int count, std::uint64_t seed,
            const std::string& out_dir) {
    Family family;
    if (!family_from_name(family_arg, family)) {
        std::cerr << "unknown family '" << family_arg
                  << "' (calm|cluttered|windy|occlusion|latency)\n";
        return kExitUsage;
    }
    Expected<std::vector<Scenario>, WorldgenError> generated =
        generate_family(family, count, seed);
    if (!generated.ok()) {
        std::cerr << "generation failed: " << generated.error().message << "\n";
        return kExitFailure;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << out_dir << ": " << ec.message() << "\n";
        return kExitCorrupt;
    }
    for (const Scenario& scn : generated.value()) {
        std::string path = (fs::path(out_dir) / (scn.name + ".scn")).string();
        if (!spill(path, canonicalize(scn))) {
            std::cerr << path << ": cannot write\n";
            return kExitCorrupt;
        }
    }
    std::printf("wrote %d scenarios to %s\n", count, out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic marker-landing SIL test harness"};
    app.require_subcommand(1);

    std::string run_file, run_preset, run_out;
    std::optional<std::uint64_t> run_seed;
    bool run_pretty = false;
    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("file", run_file, "scenario (.scn)")->required();
    run->add_option("--seed", run_seed, "override the scenario seed");
    run->add_option("--preset", run_preset, "mls1|mls2|mls3");
    run->add_option("--out", run_out, "write the telemetry log here");
    run->add_flag("--pretty", run_pretty, "print records with decimal floats");

    std::string suite_dir, suite_report, suite_gates, suite_preset;
    int suite_seeds = 1;
    CLI::App* suite = app.add_subcommand("suite", "run a directory of scenarios");
    suite->add_option("dir", suite_dir, "directory of .scn files")->required();
    suite->add_option("--seeds", suite_seeds, "seeds per scenario")
        ->check(CLI::PositiveNumber);
    suite->add_option("--report", suite_report, "write a JSON report here");
    suite->add_option("--gates", suite_gates, "metric gates file");
    suite->add_option("--preset", suite_preset, "mls1|mls2|mls3");

    std::string replay_log, replay_scn;
    CLI::App* replay = app.add_subcommand("replay", "re-run a log's scenario and compare");
    replay->add_option("log", replay_log, "telemetry log (.sklog)")->required();
    replay->add_option("--scenario", replay_scn, "scenario file (skips the hash search)");

    std::string diff_a, diff_b;
    std::vector<std::string> diff_tols;
    CLI::App* diff = app.add_subcommand("diff", "compare two telemetry logs");
    diff->add_option("a", diff_a)->required();
    diff->add_option("b", diff_b)->required();
    diff->add_option("--tol", diff_tols, "per-channel tolerance, ch=value");

    std::string gen_family, gen_out;
    int gen_count = 0;
    std::uint64_t gen_seed = 0;
    CLI::App* gen = app.add_subcommand("gen", "generate a scenario family");
    gen->add_option("family", gen_family, "calm|cluttered|windy|occlusion|latency")
        ->required();
    gen->add_option("--count", gen_count, "scenarios to generate")
        ->required()
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "generation seed")->required();
    gen->add_option("--out", gen_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (run->parsed()) return cmd_run(run_file, run_seed, run_preset, run_out, run_pretty);
    if (suite->parsed())
        return cmd_suite(suite_dir, suite_seeds, suite_report, suite_gates, suite_preset);
    if (replay->parsed()) return cmd_replay(replay_log, replay_scn);
    if (diff->parsed()) return cmd_diff(diff_a, diff_b, diff_tols);
    if (gen->parsed()) return cmd_gen(gen_family, gen_count, gen_seed, gen_out);
    return kExitUsage;
}
