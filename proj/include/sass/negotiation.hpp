#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "sass/messages.hpp"
#include "sass/world.hpp"

namespace sass {

struct Assignment {
    std::map<int, int> item_to_agent;
    std::set<int> unassigned;
};

struct NegotiationConfig {
    int retry_budget = 10;  // award re-sends, and extra rounds under loss
};

// One Bid per proposed item with finite utility; ineligible items are skipped.
std::vector<BidMsg> make_bids(int agent, const ProposeMsg& propose, const std::map<int, double>& utilities);

// One winner per open item (max utility, ties lowest agent id), then at most
// one item per agent (its best win stands, others roll to the next round).
std::vector<AwardMsg> resolve_round(OpKind kind, const std::vector<BidMsg>& bids, const std::set<int>& open_items);

using UtilityFn = std::function<std::map<int, double>(World&, int agent, const ProposeMsg&)>;
using AwardFn = std::function<void(World&, Trace&, const SessionId&, OpKind, int item, int winner)>;
using BindFn = std::function<void(World&, Trace&, const SessionId&, OpKind, int item, int agent)>;

// Per-agent protocol state machine for the synchronous-round auction. The
// initiator broadcasts Propose, collects Bids until the round deadline,
// broadcasts Awards and binds them on Ack; expired awards are re-offered to
// the same winner until the retry budget runs out, so no item is ever named
// to two agents. Feed it with handle() on delivery and advance() once per tick.
class NegotiationEngine {
public:
    NegotiationEngine(int agent_id, UtilityFn utility, NegotiationConfig cfg = {});

    int agent_id() const { return agent_id_; }
    void set_on_award(AwardFn fn) { on_award_ = std::move(fn); }  // winner side
    void set_on_bind(BindFn fn) { on_bind_ = std::move(fn); }     // initiator side

    SessionId open_session(World& w, Trace& trace, OpKind kind, std::vector<int> items);
    void handle(World& w, Trace& trace, const Envelope& env);
    void advance(World& w, Trace& trace);

    bool is_initiator(const SessionId& sid) const { return sessions_.count(sid) > 0; }
    bool session_done(const SessionId& sid) const;
    Assignment session_result(const SessionId& sid) const;
    bool has_open_session() const;

    // Bidder view: item awarded to this agent in the given session, if any.
    std::optional<int> award_in(const SessionId& sid) const;

private:
    struct PendingAward {
        int winner = 0;
        int expire = 0;
        int retries = 0;
    };

    struct InitiatorSession {
        SessionId sid;
        OpKind kind = OpKind::Selection;
        std::set<int> open_items;
        std::map<int, int> bound;  // item -> agent
        std::set<int> failed;
        std::map<int, PendingAward> pending;
        std::vector<BidMsg> bids;
        enum class Phase { Collecting, Awarding, Done } phase = Phase::Collecting;
        int round_deadline = 0;
        int rounds_used = 0;
        int round_cap = 0;
    };

    void start_round(World& w, Trace& trace, InitiatorSession& s);
    void issue_awards(World& w, Trace& trace, InitiatorSession& s, const std::vector<AwardMsg>& awards);
    void bind(World& w, Trace& trace, InitiatorSession& s, int item, int agent);
    void finalize(InitiatorSession& s);
    void progress(World& w, Trace& trace, InitiatorSession& s);
    int window(const World& w) const { return std::max(2 * w.bus.delay + 1, 2); }

    int agent_id_;
    UtilityFn utility_;
    NegotiationConfig cfg_;
    AwardFn on_award_;
    BindFn on_bind_;
    int session_counter_ = 0;
    std::map<SessionId, InitiatorSession> sessions_;    // initiator side
    std::map<SessionId, int> received_awards_;          // bidder side: sid -> item
    std::map<SessionId, OpKind> session_kinds_;         // bidder side, learned from Proposes
};

// Stand-alone driver: builds one engine per agent, opens the session on the
// initiator and steps the world until the session settles. Terminates within
// min(#agents, #items) + 1 rounds on a lossless bus; under loss the retry
// budget bounds it and the result may carry unassigned items.
Assignment run_negotiation(World& w, Trace& trace, OpKind kind, int initiator, const std::vector<int>& items,
                           const UtilityFn& utility, const NegotiationConfig& cfg = {},
                           const BindFn& on_bind = nullptr);

}  // namespace sass
