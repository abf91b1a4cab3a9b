#include "sass/trace.hpp"

#include <fstream>
#include <sstream>

namespace sass {

namespace {

constexpr const char* kKindNames[] = {
    "Spawn", "Move", "Send", "Deliver", "Drop", "Propose", "Bid", "Award",
    "Ack", "Assign", "Rescue", "Expire", "Encounter", "Solve", "TrustSnapshot", "EpisodeEnd",
};

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

const char* event_kind_name(EventKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<EventKind> event_kind_from_name(const std::string& name) {
    for (int i = 0; i < static_cast<int>(std::size(kKindNames)); ++i) {
        if (name == kKindNames[i]) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

const std::string* TraceEvent::find(const std::string& key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) return &v;
    }
    return nullptr;
}

long long TraceEvent::get_int(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ValidationError("trace event missing field '" + key + "'");
    return parse_int(*v);
}

double TraceEvent::get_double(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ValidationError("trace event missing field '" + key + "'");
    return parse_double(*v);
}

std::string TraceEvent::get_str(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ValidationError("trace event missing field '" + key + "'");
    return *v;
}

std::string Trace::serialize() const {
    std::string out;
    out += "sass-trace v1\n";
    out += "scenario_hash " + format_hex64(header_.scenario_hash) + "\n";
    out += "seed " + format_int(static_cast<long long>(header_.seed)) + "\n";
    out += "version " + header_.version + "\n";
    out += "grid " + format_int(header_.grid_width) + " " + format_int(header_.grid_height) + "\n";
    for (const auto& e : events_) {
        out += "E " + format_int(e.tick) + " " + event_kind_name(e.kind);
        for (const auto& [k, v] : e.fields) {
            out += " " + k + "=" + v;
        }
        out += "\n";
    }
    out += "hash " + format_hex64(Fnv1a64::of(out)) + "\n";
    return out;
}

void Trace::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write trace file '" + path + "'");
    f << serialize();
}

Trace Trace::parse(const std::string& text) {
    // Integrity first: the last line must be "hash 0x...." over everything before it.
    size_t last_nl = text.find_last_of('\n');
    if (last_nl == std::string::npos || last_nl + 1 != text.size())
        throw IntegrityError("trace truncated: missing final newline");
    size_t prev_nl = text.find_last_of('\n', last_nl - 1);
    size_t hash_line_start = (prev_nl == std::string::npos) ? 0 : prev_nl + 1;
    std::string hash_line = text.substr(hash_line_start, last_nl - hash_line_start);
    auto toks = split_ws(hash_line);
    if (toks.size() != 2 || toks[0] != "hash") throw IntegrityError("trace truncated: missing hash line");
    std::string body = text.substr(0, hash_line_start);
    uint64_t expect = Fnv1a64::of(body);
    if (toks[1] != format_hex64(expect)) throw IntegrityError("trace hash mismatch");

    Trace t;
    std::istringstream ss(body);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto parts = split_ws(line);
        if (lineno == 1) {
            if (line != "sass-trace v1") throw ValidationError("unknown trace format header");
            continue;
        }
        if (parts[0] == "scenario_hash") {
            t.header_.scenario_hash = std::stoull(parts.at(1), nullptr, 16);
        } else if (parts[0] == "seed") {
            t.header_.seed = static_cast<uint64_t>(parse_int(parts.at(1)));
        } else if (parts[0] == "version") {
            t.header_.version = parts.at(1);
        } else if (parts[0] == "grid") {
            t.header_.grid_width = static_cast<int>(parse_int(parts.at(1)));
            t.header_.grid_height = static_cast<int>(parse_int(parts.at(2)));
        } else if (parts[0] == "E") {
            if (parts.size() < 3) throw ValidationError("trace line " + format_int(lineno) + ": short event record");
            TraceEvent e;
            e.tick = static_cast<int>(parse_int(parts[1]));
            auto k = event_kind_from_name(parts[2]);
            if (!k) throw ValidationError("trace line " + format_int(lineno) + ": unknown event kind " + parts[2]);
            e.kind = *k;
            for (size_t i = 3; i < parts.size(); ++i) {
                auto eq = parts[i].find('=');
                if (eq == std::string::npos)
                    throw ValidationError("trace line " + format_int(lineno) + ": bad field " + parts[i]);
                e.fields.emplace_back(parts[i].substr(0, eq), parts[i].substr(eq + 1));
            }
            t.events_.push_back(std::move(e));
        } else {
            throw ValidationError("trace line " + format_int(lineno) + ": unknown record " + parts[0]);
        }
    }
    return t;
}

Trace Trace::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot read trace file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

}  // namespace sass
