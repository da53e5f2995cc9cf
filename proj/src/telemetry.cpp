#include "skytest/telemetry.hpp"

#include <bit>
#include <cassert>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace skytest {

namespace {

constexpr const char* kChannelNames[] = {
    "fault",      "gps.fix",     "range.read", "marker.obs",
    "marker.est", "phase",       "cmd.issue",  "cmd.deliver",
    "collision",  "touchdown",   "truth.pose",
};
constexpr int kChannelCount = 11;

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool parse_hex16(const std::string& s, std::uint64_t& out) {
    if (s.size() != 16) return false;
    out = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else return false;
        out = (out << 4) | static_cast<std::uint64_t>(d);
    }
    return true;
}

}  // namespace

const char* channel_name(Channel c) { return kChannelNames[static_cast<int>(c)]; }

bool channel_from_name(const std::string& name, Channel& out) {
    for (int i = 0; i < kChannelCount; ++i) {
        if (name == kChannelNames[i]) {
            out = static_cast<Channel>(i);
            return true;
        }
    }
    return false;
}

std::string format_value(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        return "f:" + hex16(std::bit_cast<std::uint64_t>(*d));
    }
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

std::string format_value_pretty(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", *d);
        return buf;
    }
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

std::string serialize_record(const TelemetryRecord& r) {
    std::string out = "t=" + std::to_string(r.t_us) + " ch=" + channel_name(r.channel);
    for (const auto& [k, v] : r.payload) {
        out += ' ';
        out += k;
        out += '=';
        out += format_value(v);
    }
    return out;
}

std::string serialize_log(const TelemetryLog& log) {
    std::string out = "SKYLOG " + std::to_string(log.header.version) +
                      " scenario=" + log.header.scenario +
                      " seed=" + std::to_string(log.header.seed) +
                      " scnhash=" + hex16(log.header.scnhash) + "\n";
    for (const auto& r : log.records) {
        out += serialize_record(r);
        out += '\n';
    }
    return out;
}

void TelemetryWriter::append(TelemetryRecord r) {
    if (!log_.records.empty()) {
        const auto& prev = log_.records.back();
        assert(r.t_us >= prev.t_us && "telemetry time must be nondecreasing");
        assert((r.t_us > prev.t_us || r.channel >= prev.channel) &&
               "channel emission order violated within a timestamp");
    }
    log_.records.push_back(std::move(r));
}

namespace {

bool parse_kv(const std::string& tok, std::string& key, Value& value) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 > tok.size()) return false;
    key = tok.substr(0, eq);
    std::string raw = tok.substr(eq + 1);
    if (raw.rfind("f:", 0) == 0) {
        std::uint64_t bits;
        if (!parse_hex16(raw.substr(2), bits)) return false;
        value = std::bit_cast<double>(bits);
        return true;
    }
    std::int64_t i;
    auto res = std::from_chars(raw.data(), raw.data() + raw.size(), i);
    if (res.ec == std::errc{} && res.ptr == raw.data() + raw.size()) {
        value = i;
        return true;
    }
    if (raw.empty()) return false;
    value = raw;
    return true;
}

}  // namespace

Expected<TelemetryLog, LogError> parse_log(const std::string& text) {
    TelemetryLog log;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) return LogError{0, "empty file"};
    {
        std::istringstream hl(line);
        std::string magic, scenario_kv, seed_kv, hash_kv;
        int version = 0;
        if (!(hl >> magic >> version >> scenario_kv >> seed_kv >> hash_kv) ||
            magic != "SKYLOG") {
            return LogError{0, "bad header"};
        }
        std::string extra;
        if (hl >> extra) return LogError{0, "bad header"};
        if (version != 1) return LogError{0, "unsupported format version"};
        if (scenario_kv.rfind("scenario=", 0) != 0 || seed_kv.rfind("seed=", 0) != 0 ||
            hash_kv.rfind("scnhash=", 0) != 0) {
            return LogError{0, "bad header"};
        }
        log.header.version = version;
        log.header.scenario = scenario_kv.substr(9);
        std::string seed_raw = seed_kv.substr(5);
        auto res = std::from_chars(seed_raw.data(), seed_raw.data() + seed_raw.size(),
                                   log.header.seed);
        if (res.ec != std::errc{} || res.ptr != seed_raw.data() + seed_raw.size()) {
            return LogError{0, "bad header seed"};
        }
        if (!parse_hex16(hash_kv.substr(8), log.header.scnhash)) {
            return LogError{0, "bad header hash"};
        }
    }

    std::size_t index = 0;
    std::uint64_t prev_t = 0;
    while (std::getline(in, line)) {
        if (line.empty()) return LogError{index, "empty record line"};
        std::istringstream rl(line);
        std::string tok;
        TelemetryRecord rec;
        if (!(rl >> tok) || tok.rfind("t=", 0) != 0) {
            return LogError{index, "record must start with t="};
        }
        {
            std::string raw = tok.substr(2);
            auto res = std::from_chars(raw.data(), raw.data() + raw.size(), rec.t_us);
            if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size()) {
                return LogError{index, "bad timestamp"};
            }
        }
        if (!(rl >> tok) || tok.rfind("ch=", 0) != 0 ||
            !channel_from_name(tok.substr(3), rec.channel)) {
            return LogError{index, "bad channel"};
        }
        while (rl >> tok) {
            std::string key;
            Value value;
            if (!parse_kv(tok, key, value)) return LogError{index, "malformed field '" + tok + "'"};
            rec.payload.push_back({key, value});
        }
        if (!log.records.empty() && rec.t_us < prev_t) {
            return LogError{index, "time went backwards"};
        }
        prev_t = rec.t_us;
        log.records.push_back(std::move(rec));
        ++index;
    }
    return log;
}

Expected<TelemetryLog, LogError> read_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return LogError{0, "cannot open " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_log(buf.str());
}

bool write_log_file(const TelemetryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << serialize_log(log);
    return static_cast<bool>(out);
}

namespace {

void header_diff(const TelemetryLog& a, const TelemetryLog& b, DiffReport& report) {
    auto add = [&](const std::string& key, const std::string& va, const std::string& vb) {
        report.divergences.push_back({0, "header", key, va, vb, "header mismatch"});
    };
    if (a.header.scenario != b.header.scenario) add("scenario", a.header.scenario, b.header.scenario);
    if (a.header.seed != b.header.seed) {
        add("seed", std::to_string(a.header.seed), std::to_string(b.header.seed));
    }
    if (a.header.scnhash != b.header.scnhash) {
        add("scnhash", hex16(a.header.scnhash), hex16(b.header.scnhash));
    }
}

bool values_match(const Value& va, const Value& vb, double tol) {
    if (va.index() != vb.index()) return false;
    if (const auto* da = std::get_if<double>(&va)) {
        double db = std::get<double>(vb);
        if (tol <= 0.0) return std::bit_cast<std::uint64_t>(*da) == std::bit_cast<std::uint64_t>(db);
        return std::abs(*da - db) <= tol;
    }
    return va == vb;
}

}  // namespace

DiffReport diff_logs(const TelemetryLog& a, const TelemetryLog& b,
                     const std::map<std::string, double>& tolerances,
                     std::size_t max_divergences) {
    DiffReport report;
    header_diff(a, b, report);

    auto tol_for = [&](Channel c) {
        auto it = tolerances.find(channel_name(c));
        return it == tolerances.end() ? 0.0 : it->second;
    };
    auto push = [&](Divergence d) {
        if (report.divergences.size() >= max_divergences) {
            report.truncated = true;
            return false;
        }
        report.divergences.push_back(std::move(d));
        return true;
    };

    std::size_t i = 0, j = 0;
    while (i < a.records.size() || j < b.records.size()) {
        if (report.divergences.size() >= max_divergences) {
            report.truncated = true;
            break;
        }
        auto order_key = [](const TelemetryRecord& r) {
            return std::pair<std::uint64_t, int>(r.t_us, static_cast<int>(r.channel));
        };
        bool only_a = j >= b.records.size();
        bool only_b = i >= a.records.size();
        if (!only_a && !only_b) {
            auto ka = order_key(a.records[i]);
            auto kb = order_key(b.records[j]);
            if (ka < kb) only_a = true;
            else if (kb < ka) only_b = true;
        }
        if (only_a) {
            const auto& r = a.records[i++];
            push({r.t_us, channel_name(r.channel), "", serialize_record(r), "", "record only in first log"});
            continue;
        }
        if (only_b) {
            const auto& r = b.records[j++];
            push({r.t_us, channel_name(r.channel), "", "", serialize_record(r), "record only in second log"});
            continue;
        }
        const auto& ra = a.records[i++];
        const auto& rb = b.records[j++];
        double tol = tol_for(ra.channel);
        std::size_t n = std::max(ra.payload.size(), rb.payload.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (k >= ra.payload.size() || k >= rb.payload.size() ||
                ra.payload[k].first != rb.payload[k].first) {
                push({ra.t_us, channel_name(ra.channel), "", serialize_record(ra),
                      serialize_record(rb), "payload structure mismatch"});
                break;
            }
            if (!values_match(ra.payload[k].second, rb.payload[k].second, tol)) {
                if (!push({ra.t_us, channel_name(ra.channel), ra.payload[k].first,
                           format_value(ra.payload[k].second),
                           format_value(rb.payload[k].second), ""})) {
                    break;
                }
            }
        }
    }
    return report;
}

}  // namespace skytest
