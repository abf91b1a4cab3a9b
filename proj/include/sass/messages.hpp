#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sass/core.hpp"

namespace sass {

enum class OpKind { Selection, Formation, Routing };

inline const char* op_kind_name(OpKind k) {
    constexpr const char* names[] = {"selection", "formation", "routing"};
    return names[static_cast<int>(k)];
}

struct SessionId {
    int initiator = 0;
    int tick = 0;
    int counter = 0;
    auto operator<=>(const SessionId&) const = default;

    std::string str() const {
        return format_int(initiator) + "." + format_int(tick) + "." + format_int(counter);
    }
};

struct ProposeMsg {
    SessionId sid;
    OpKind kind = OpKind::Selection;
    std::vector<int> items;
};

struct BidMsg {
    SessionId sid;
    int item = 0;
    double utility = 0.0;
    int bidder = 0;
};

struct AwardMsg {
    SessionId sid;
    int item = 0;
    int winner = 0;
};

struct AckMsg {
    SessionId sid;
    int item = 0;
    int agent = 0;
};

using NegotiationMessage = std::variant<ProposeMsg, BidMsg, AwardMsg, AckMsg>;

inline const char* message_kind_name(const NegotiationMessage& m) {
    constexpr const char* names[] = {"propose", "bid", "award", "ack"};
    return names[m.index()];
}

// One bus unit: a message addressed to a single recipient.
struct Envelope {
    uint64_t seq = 0;
    int sender = 0;
    int recipient = 0;
    int sent_tick = 0;
    int deliver_at = 0;
    NegotiationMessage msg;
};

inline constexpr int kBroadcast = -1;

}  // namespace sass
