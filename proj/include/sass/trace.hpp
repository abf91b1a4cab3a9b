#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sass/core.hpp"

namespace sass {

enum class EventKind {
    Spawn,
    Move,
    Send,
    Deliver,
    Drop,
    Propose,
    Bid,
    Award,
    Ack,
    Assign,
    Rescue,
    Expire,
    Encounter,
    Solve,
    TrustSnapshot,
    EpisodeEnd,
};

const char* event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from_name(const std::string& name);

struct TraceEvent {
    int tick = 0;
    EventKind kind = EventKind::Spawn;
    // Ordered key=value payload; order is part of the serialized form.
    std::vector<std::pair<std::string, std::string>> fields;

    const std::string* find(const std::string& key) const;
    long long get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::string get_str(const std::string& key) const;
};

// Append-only event log of one run. The serialized form is newline-delimited
// records with a trailing FNV-1a hash line; load() rejects tampered files.
class Trace {
public:
    struct Header {
        uint64_t scenario_hash = 0;
        uint64_t seed = 0;
        std::string version;
        int grid_width = 0;
        int grid_height = 0;
    };

    Trace() = default;
    explicit Trace(Header h) : header_(std::move(h)) {}

    const Header& header() const { return header_; }
    Header& header() { return header_; }

    TraceEvent& add(int tick, EventKind kind) {
        events_.push_back(TraceEvent{tick, kind, {}});
        return events_.back();
    }
    TraceEvent& add(int tick, EventKind kind, std::vector<std::pair<std::string, std::string>> fields) {
        events_.push_back(TraceEvent{tick, kind, std::move(fields)});
        return events_.back();
    }

    const std::vector<TraceEvent>& events() const { return events_; }
    size_t size() const { return events_.size(); }

    std::string serialize() const;
    uint64_t content_hash() const { return Fnv1a64::of(serialize()); }

    void save(const std::string& path) const;
    // Throws IntegrityError on hash mismatch or truncation, ValidationError on
    // malformed records.
    static Trace parse(const std::string& text);
    static Trace load(const std::string& path);

private:
    Header header_;
    std::vector<TraceEvent> events_;
};

// Field helpers keep call sites short.
inline std::pair<std::string, std::string> f_int(const std::string& k, long long v) {
    return {k, format_int(v)};
}
inline std::pair<std::string, std::string> f_dbl(const std::string& k, double v) {
    return {k, format_double(v)};
}
inline std::pair<std::string, std::string> f_str(const std::string& k, std::string v) {
    return {k, std::move(v)};
}

}  // namespace sass
