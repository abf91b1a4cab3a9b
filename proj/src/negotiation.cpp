#include "sass/negotiation.hpp"

#include <algorithm>
#include <cmath>

namespace sass {

std::vector<BidMsg> make_bids(int agent, const ProposeMsg& propose, const std::map<int, double>& utilities) {
    std::vector<BidMsg> bids;
    for (int item : propose.items) {
        auto it = utilities.find(item);
        if (it == utilities.end()) continue;
        if (!(it->second > -std::numeric_limits<double>::infinity())) continue;  // abstain
        bids.push_back(BidMsg{propose.sid, item, it->second, agent});
    }
    return bids;
}

std::vector<AwardMsg> resolve_round(OpKind kind, const std::vector<BidMsg>& bids, const std::set<int>& open_items) {
    (void)kind;  // the one-item-per-agent rule applies uniformly
    std::map<int, BidMsg> best;  // item -> winning bid
    for (const auto& b : bids) {
        if (!open_items.count(b.item)) continue;
        if (!std::isfinite(b.utility)) continue;
        auto it = best.find(b.item);
        if (it == best.end() || b.utility > it->second.utility ||
            (b.utility == it->second.utility && b.bidder < it->second.bidder)) {
            best[b.item] = b;
        }
    }
    // Each agent keeps its highest-utility win (ties: lowest item id via the
    // ascending iteration); its other wins roll to the next round.
    std::map<int, std::pair<int, double>> agent_best;  // agent -> (item, utility)
    for (const auto& [item, bid] : best) {
        auto it = agent_best.find(bid.bidder);
        if (it == agent_best.end() || bid.utility > it->second.second) agent_best[bid.bidder] = {item, bid.utility};
    }
    std::vector<AwardMsg> awards;
    for (const auto& [item, bid] : best) {
        if (agent_best[bid.bidder].first == item) awards.push_back(AwardMsg{bid.sid, item, bid.bidder});
    }
    return awards;
}

NegotiationEngine::NegotiationEngine(int agent_id, UtilityFn utility, NegotiationConfig cfg)
    : agent_id_(agent_id), utility_(std::move(utility)), cfg_(cfg) {}

SessionId NegotiationEngine::open_session(World& w, Trace& trace, OpKind kind, std::vector<int> items) {
    if (items.empty()) throw ValidationError("open_session: empty item list");
    std::sort(items.begin(), items.end());
    SessionId sid{agent_id_, w.tick, session_counter_++};
    InitiatorSession s;
    s.sid = sid;
    s.kind = kind;
    s.open_items.insert(items.begin(), items.end());
    s.round_cap = static_cast<int>(std::min(w.agents.size(), items.size())) + 1;
    sessions_[sid] = std::move(s);
    start_round(w, trace, sessions_[sid]);
    return sid;
}

void NegotiationEngine::start_round(World& w, Trace& trace, InitiatorSession& s) {
    s.phase = InitiatorSession::Phase::Collecting;
    s.rounds_used += 1;
    s.round_deadline = w.tick + window(w);
    s.bids.clear();

    ProposeMsg propose{s.sid, s.kind, std::vector<int>(s.open_items.begin(), s.open_items.end())};
    auto& e = trace.add(w.tick, EventKind::Propose,
                        {f_str("session", s.sid.str()), f_int("initiator", agent_id_),
                         f_str("op", op_kind_name(s.kind)), f_int("round", s.rounds_used)});
    std::string items_str;
    for (size_t i = 0; i < propose.items.size(); ++i) {
        if (i) items_str += ",";
        items_str += format_int(propose.items[i]);
    }
    e.fields.push_back(f_str("items", items_str));

    send(w, trace, agent_id_, kBroadcast, propose);

    // The initiator bids locally, no bus hop.
    if (utility_ && !award_in(s.sid)) {
        auto utilities = utility_(w, agent_id_, propose);
        for (const auto& b : make_bids(agent_id_, propose, utilities)) {
            trace.add(w.tick, EventKind::Bid,
                      {f_str("session", b.sid.str()), f_int("agent", agent_id_), f_int("item", b.item),
                       f_dbl("util", b.utility)});
            s.bids.push_back(b);
        }
    }
}

void NegotiationEngine::issue_awards(World& w, Trace& trace, InitiatorSession& s, const std::vector<AwardMsg>& awards) {
    s.phase = InitiatorSession::Phase::Awarding;
    for (const auto& a : awards) {
        s.open_items.erase(a.item);
        trace.add(w.tick, EventKind::Award,
                  {f_str("session", a.sid.str()), f_int("item", a.item), f_int("winner", a.winner)});
        if (a.winner == agent_id_) {
            // Self-award: no bus round trip, bind immediately.
            received_awards_[s.sid] = a.item;
            if (on_award_) on_award_(w, trace, s.sid, s.kind, a.item, a.winner);
            trace.add(w.tick, EventKind::Ack,
                      {f_str("session", a.sid.str()), f_int("item", a.item), f_int("agent", agent_id_)});
            bind(w, trace, s, a.item, a.winner);
        } else {
            send(w, trace, agent_id_, a.winner, a);
            s.pending[a.item] = PendingAward{a.winner, w.tick + window(w), 0};
        }
    }
}

void NegotiationEngine::bind(World& w, Trace& trace, InitiatorSession& s, int item, int agent) {
    s.bound[item] = agent;
    s.pending.erase(item);
    trace.add(w.tick, EventKind::Assign,
              {f_str("session", s.sid.str()), f_int("item", item), f_int("agent", agent)});
    if (on_bind_) on_bind_(w, trace, s.sid, s.kind, item, agent);
}

void NegotiationEngine::finalize(InitiatorSession& s) {
    s.phase = InitiatorSession::Phase::Done;
}

void NegotiationEngine::progress(World& w, Trace& trace, InitiatorSession& s) {
    if (s.phase == InitiatorSession::Phase::Collecting) {
        if (w.tick < s.round_deadline) return;
        // Defensive filter: agents already bound in this session cannot win twice.
        std::set<int> bound_agents;
        for (const auto& [item, agent] : s.bound) bound_agents.insert(agent);
        for (const auto& [item, p] : s.pending) bound_agents.insert(p.winner);
        std::vector<BidMsg> usable;
        for (const auto& b : s.bids)
            if (!bound_agents.count(b.bidder)) usable.push_back(b);

        auto awards = resolve_round(s.kind, usable, s.open_items);
        if (awards.empty()) {
            bool lossless = w.bus.loss_prob <= 0.0;
            if (lossless || s.rounds_used >= s.round_cap + cfg_.retry_budget) {
                finalize(s);
            } else {
                start_round(w, trace, s);  // lost messages get another chance
            }
            return;
        }
        issue_awards(w, trace, s, awards);
        if (s.pending.empty()) {
            // Everything self-awarded; next round or done.
            if (s.open_items.empty())
                finalize(s);
            else if (s.rounds_used >= s.round_cap + (w.bus.loss_prob > 0.0 ? cfg_.retry_budget : 0))
                finalize(s);
            else
                start_round(w, trace, s);
        }
        return;
    }
    if (s.phase == InitiatorSession::Phase::Awarding) {
        for (auto it = s.pending.begin(); it != s.pending.end();) {
            PendingAward& p = it->second;
            if (w.tick >= p.expire) {
                if (p.retries < cfg_.retry_budget) {
                    // Re-offer to the same winner only; an item is never
                    // named to two agents.
                    p.retries += 1;
                    p.expire = w.tick + window(w);
                    send(w, trace, agent_id_, p.winner, AwardMsg{s.sid, it->first, p.winner});
                    ++it;
                } else {
                    s.failed.insert(it->first);
                    it = s.pending.erase(it);
                }
            } else {
                ++it;
            }
        }
        if (s.pending.empty()) {
            if (s.open_items.empty()) {
                finalize(s);
            } else if (s.rounds_used >= s.round_cap + (w.bus.loss_prob > 0.0 ? cfg_.retry_budget : 0)) {
                finalize(s);
            } else {
                start_round(w, trace, s);
            }
        }
        return;
    }
}

void NegotiationEngine::advance(World& w, Trace& trace) {
    for (auto& [sid, s] : sessions_) {
        if (s.phase != InitiatorSession::Phase::Done) progress(w, trace, s);
    }
}

void NegotiationEngine::handle(World& w, Trace& trace, const Envelope& env) {
    if (const auto* propose = std::get_if<ProposeMsg>(&env.msg)) {
        session_kinds_[propose->sid] = propose->kind;
        if (award_in(propose->sid)) return;  // already hold an item in this session
        if (!utility_) return;
        auto utilities = utility_(w, agent_id_, *propose);
        for (const auto& b : make_bids(agent_id_, *propose, utilities)) {
            trace.add(w.tick, EventKind::Bid,
                      {f_str("session", b.sid.str()), f_int("agent", agent_id_), f_int("item", b.item),
                       f_dbl("util", b.utility)});
            send(w, trace, agent_id_, propose->sid.initiator, b);
        }
        return;
    }
    if (const auto* bid = std::get_if<BidMsg>(&env.msg)) {
        auto it = sessions_.find(bid->sid);
        if (it == sessions_.end()) return;
        InitiatorSession& s = it->second;
        if (s.phase != InitiatorSession::Phase::Collecting) return;  // late bid, next round will re-propose
        if (!s.open_items.count(bid->item)) return;
        s.bids.push_back(*bid);
        return;
    }
    if (const auto* award = std::get_if<AwardMsg>(&env.msg)) {
        if (award->winner != agent_id_) return;
        auto it = received_awards_.find(award->sid);
        bool first_receipt = (it == received_awards_.end());
        received_awards_[award->sid] = award->item;
        trace.add(w.tick, EventKind::Ack,
                  {f_str("session", award->sid.str()), f_int("item", award->item), f_int("agent", agent_id_)});
        send(w, trace, agent_id_, award->sid.initiator, AckMsg{award->sid, award->item, agent_id_});
        if (first_receipt && on_award_) {
            auto kit = session_kinds_.find(award->sid);
            OpKind kind = kit == session_kinds_.end() ? OpKind::Selection : kit->second;
            on_award_(w, trace, award->sid, kind, award->item, agent_id_);
        }
        return;
    }
    if (const auto* ack = std::get_if<AckMsg>(&env.msg)) {
        auto it = sessions_.find(ack->sid);
        if (it == sessions_.end()) return;
        InitiatorSession& s = it->second;
        auto pit = s.pending.find(ack->item);
        if (pit == s.pending.end() || pit->second.winner != ack->agent) return;  // stale
        bind(w, trace, s, ack->item, ack->agent);
        return;
    }
}

bool NegotiationEngine::session_done(const SessionId& sid) const {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) throw ValidationError("unknown session " + sid.str());
    return it->second.phase == InitiatorSession::Phase::Done;
}

Assignment NegotiationEngine::session_result(const SessionId& sid) const {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) throw ValidationError("unknown session " + sid.str());
    const InitiatorSession& s = it->second;
    Assignment a;
    a.item_to_agent = s.bound;
    a.unassigned = s.failed;
    a.unassigned.insert(s.open_items.begin(), s.open_items.end());
    for (const auto& [item, p] : s.pending) a.unassigned.insert(item);
    return a;
}

bool NegotiationEngine::has_open_session() const {
    for (const auto& [sid, s] : sessions_)
        if (s.phase != InitiatorSession::Phase::Done) return true;
    return false;
}

std::optional<int> NegotiationEngine::award_in(const SessionId& sid) const {
    auto it = received_awards_.find(sid);
    if (it == received_awards_.end()) return std::nullopt;
    return it->second;
}

Assignment run_negotiation(World& w, Trace& trace, OpKind kind, int initiator, const std::vector<int>& items,
                           const UtilityFn& utility, const NegotiationConfig& cfg, const BindFn& on_bind) {
    if (!w.agents.count(initiator)) throw ValidationError("run_negotiation: unknown initiator");
    std::map<int, std::unique_ptr<NegotiationEngine>> engines;
    for (const auto& [id, a] : w.agents) engines[id] = std::make_unique<NegotiationEngine>(id, utility, cfg);
    if (on_bind) engines[initiator]->set_on_bind(on_bind);

    SessionId sid = engines[initiator]->open_session(w, trace, kind, items);

    StepHooks hooks;
    hooks.on_agent = [&](World& world, Trace& tr, int id, const std::vector<Envelope>& inbox) {
        for (const auto& env : inbox) engines[id]->handle(world, tr, env);
        engines[id]->advance(world, tr);
    };

    const int span = std::max(2 * w.bus.delay + 1, 2);
    const int rounds_max = static_cast<int>(std::min(w.agents.size(), items.size())) + 1 + cfg.retry_budget;
    const int tick_cap = w.tick + rounds_max * (span * (cfg.retry_budget + 3) + 2) + 4;
    while (!engines[initiator]->session_done(sid) && w.tick < tick_cap) {
        step(w, trace, hooks);
    }
    return engines[initiator]->session_result(sid);
}

}  // namespace sass
